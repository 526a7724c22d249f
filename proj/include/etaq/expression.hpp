#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <string>

namespace etaq::expr {

/// Half-open byte range [begin, end) into the text an expression was parsed
/// from. Nodes built programmatically carry a zero span; offsets in errors
/// are only meaningful for parsed expressions.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class NodeKind { Number, Variable, Unary, Binary, Call };

/// Binding family a variable name resolves to: x<i> and p<i> index into
/// vectors, u and r are scalars.
enum class VarFamily { X, P, U, R };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Number;
  Span span;
  double number = 0.0;              // Number
  VarFamily family = VarFamily::U;  // Variable
  int index = 0;                    // Variable: 0-based slot within X/P
  std::string name;                 // Variable and Call: source spelling
  char op = 0;                      // Unary '-', Binary '+','-','*','/','^'
  NodePtr lhs;                      // Unary operand, Binary lhs, Call argument
  NodePtr rhs;                      // Binary rhs
};

/// Node builders used by the parser, the differentiator, and tests.
/// make_variable and make_call validate the name and throw input_error
/// on anything outside the declared vocabulary.
NodePtr make_number(double value);
NodePtr make_variable(const std::string& name);
NodePtr make_unary(NodePtr operand);
NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs);
NodePtr make_call(const std::string& func, NodePtr argument);

/// Values available to an evaluation. Families left unbound cause an
/// input_error at eval time pointing at the variable's span.
class EvalContext {
 public:
  void bind_x(const Eigen::VectorXd& x) {
    x_ = x;
    has_x_ = true;
  }
  void bind_p(const Eigen::VectorXd& p) {
    p_ = p;
    has_p_ = true;
  }
  void bind_u(double u) {
    u_ = u;
    has_u_ = true;
  }
  void bind_r(double r) {
    r_ = r;
    has_r_ = true;
  }

  bool has_x() const { return has_x_; }
  bool has_p() const { return has_p_; }
  bool has_u() const { return has_u_; }
  bool has_r() const { return has_r_; }
  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& p() const { return p_; }
  double u() const { return u_; }
  double r() const { return r_; }

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd p_;
  double u_ = 0.0;
  double r_ = 0.0;
  bool has_x_ = false;
  bool has_p_ = false;
  bool has_u_ = false;
  bool has_r_ = false;
};

/// An immutable expression tree plus the source it came from (empty for
/// programmatically built trees). Cheap to copy; subtrees are shared.
class Expression {
 public:
  Expression(NodePtr root, std::string source);

  /// Evaluates against the bound values. Domain failures (log of a
  /// nonpositive value, square root of a negative value, division by
  /// zero, invalid powers) and unbound variables throw input_error
  /// carrying the byte offset of the failing subexpression.
  double eval(const EvalContext& ctx) const;

  /// Renders with canonical spacing and the minimal parentheses needed
  /// so that parse_expression(print()) rebuilds the same tree.
  std::string print() const;

  const NodePtr& root() const { return root_; }
  const std::string& source() const { return source_; }

 private:
  NodePtr root_;
  std::string source_;
};

/// Parses the expression grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' factor)?
///   unary  := '-' unary | atom
///   atom   := number | name | func '(' expr ')' | '(' expr ')'
/// so '+','-','*','/' associate left and '^' associates right with a
/// signed base binding tighter than the power: -x^2 means (-x)^2.
/// Names are x<i>, p<i> (1-based), u, r; functions are sin, cos, sinh,
/// cosh, exp, log, sqrt, abs. Malformed input throws input_error with
/// the byte offset of the first offending character.
Expression parse_expression(const std::string& text);

/// Analytic derivative with respect to one variable name ("u", "r",
/// "x2", "p1"). abs differentiates to its sign, so the result is only
/// meaningful away from the kink. Performs light constant folding.
Expression derivative(const Expression& e, const std::string& var);

/// Tree equality ignoring spans and source text.
bool structurally_equal(const Expression& a, const Expression& b);

}  // namespace etaq::expr
