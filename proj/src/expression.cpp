#include <etaq/expression.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <utility>

#include <etaq/errors.hpp>

namespace etaq::expr {

namespace {

const std::array<const char*, 8> kFunctions = {"sin", "cos",  "sinh", "cosh",
                                               "exp", "log",  "sqrt", "abs"};

bool is_function_name(const std::string& name) {
  for (const char* f : kFunctions) {
    if (name == f) return true;
  }
  return false;
}

/// Resolves a variable spelling to its family and 0-based slot;
/// returns false for names outside the vocabulary.
bool classify_variable(const std::string& name, VarFamily& family, int& index) {
  if (name == "u") {
    family = VarFamily::U;
    index = 0;
    return true;
  }
  if (name == "r") {
    family = VarFamily::R;
    index = 0;
    return true;
  }
  if (name.size() < 2) return false;
  if (name[0] != 'x' && name[0] != 'p') return false;
  if (name[1] == '0') return false;  // 1-based indices, no leading zero
  int value = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
    value = value * 10 + (name[i] - '0');
    if (value > 1000000) return false;
  }
  family = name[0] == 'x' ? VarFamily::X : VarFamily::P;
  index = value - 1;
  return true;
}

std::shared_ptr<Node> fresh(NodeKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

}  // namespace

NodePtr make_number(double value) {
  if (value == 0.0) value = 0.0;  // normalize -0
  if (value < 0.0) return make_unary(make_number(-value));
  auto n = fresh(NodeKind::Number);
  n->number = value;
  return n;
}

NodePtr make_variable(const std::string& name) {
  auto n = fresh(NodeKind::Variable);
  if (!classify_variable(name, n->family, n->index)) {
    throw input_error("unknown variable '" + name +
                      "'; expected x<i>, p<i>, u, or r");
  }
  n->name = name;
  return n;
}

NodePtr make_unary(NodePtr operand) {
  auto n = fresh(NodeKind::Unary);
  n->op = '-';
  n->lhs = std::move(operand);
  return n;
}

NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
  if (std::strchr("+-*/^", op) == nullptr) {
    throw input_error(std::string("unknown operator '") + op + "'");
  }
  auto n = fresh(NodeKind::Binary);
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_call(const std::string& func, NodePtr argument) {
  if (!is_function_name(func)) {
    throw input_error("unknown function '" + func + "'");
  }
  auto n = fresh(NodeKind::Call);
  n->name = func;
  n->lhs = std::move(argument);
  return n;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& message, std::size_t at) const {
    throw input_error(message, at);
  }

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }

  bool peek_is(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  NodePtr parse_expr() {
    NodePtr node = parse_term();
    while (true) {
      skip_ws();
      if (pos >= text.size() || (text[pos] != '+' && text[pos] != '-')) break;
      const char op = text[pos++];
      NodePtr rhs = parse_term();
      auto combined = std::const_pointer_cast<Node>(make_binary(op, node, rhs));
      combined->span = {node->span.begin, rhs->span.end};
      node = combined;
    }
    return node;
  }

  NodePtr parse_term() {
    NodePtr node = parse_factor();
    while (true) {
      skip_ws();
      if (pos >= text.size() || (text[pos] != '*' && text[pos] != '/')) break;
      const char op = text[pos++];
      NodePtr rhs = parse_factor();
      auto combined = std::const_pointer_cast<Node>(make_binary(op, node, rhs));
      combined->span = {node->span.begin, rhs->span.end};
      node = combined;
    }
    return node;
  }

  NodePtr parse_factor() {
    NodePtr base = parse_unary();
    skip_ws();
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      NodePtr exponent = parse_factor();  // right-associative
      auto combined =
          std::const_pointer_cast<Node>(make_binary('^', base, exponent));
      combined->span = {base->span.begin, exponent->span.end};
      return combined;
    }
    return base;
  }

  NodePtr parse_unary() {
    skip_ws();
    if (pos < text.size() && text[pos] == '-') {
      const std::size_t start = pos++;
      NodePtr operand = parse_unary();
      auto node = std::const_pointer_cast<Node>(make_unary(operand));
      node->span = {start, operand->span.end};
      return node;
    }
    return parse_atom();
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input", pos);
    const char c = text[pos];
    if (c == '(') {
      const std::size_t open = pos++;
      NodePtr inner = parse_expr();
      if (!peek_is(')')) fail("expected ')' to match '('", open);
      ++pos;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return parse_name();
    }
    fail("expected a number, a name, '(', or '-'", pos);
  }

  NodePtr parse_number() {
    const std::size_t start = pos;
    double value = 0.0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) {
      fail("malformed number", start);
    }
    pos = static_cast<std::size_t>(ptr - text.data());
    auto node = std::const_pointer_cast<Node>(make_number(value));
    node->span = {start, pos};
    return node;
  }

  NodePtr parse_name() {
    const std::size_t start = pos;
    while (pos < text.size() &&
           std::isalnum(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    const std::string name = text.substr(start, pos - start);
    if (peek_is('(')) {
      if (!is_function_name(name)) {
        fail("unknown function '" + name + "'", start);
      }
      ++pos;  // consume '('
      NodePtr argument = parse_expr();
      if (!peek_is(')')) fail("expected ')' closing call to " + name, start);
      ++pos;
      auto node = std::const_pointer_cast<Node>(make_call(name, argument));
      node->span = {start, pos};
      return node;
    }
    VarFamily family;
    int index;
    if (!classify_variable(name, family, index)) {
      fail("unknown name '" + name + "'; expected x<i>, p<i>, u, or r", start);
    }
    auto node = std::const_pointer_cast<Node>(make_variable(name));
    node->span = {start, pos};
    return node;
  }
};

}  // namespace

Expression parse_expression(const std::string& text) {
  Parser parser(text);
  NodePtr root = parser.parse_expr();
  parser.skip_ws();
  if (parser.pos < text.size()) {
    throw input_error("unexpected trailing input", parser.pos);
  }
  return Expression(std::move(root), text);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double eval_node(const Node& nd, const EvalContext& ctx) {
  switch (nd.kind) {
    case NodeKind::Number:
      return nd.number;
    case NodeKind::Variable: {
      switch (nd.family) {
        case VarFamily::X:
          if (!ctx.has_x() || nd.index >= ctx.x().size()) {
            throw input_error("variable '" + nd.name + "' is not bound",
                              nd.span.begin);
          }
          return ctx.x()(nd.index);
        case VarFamily::P:
          if (!ctx.has_p() || nd.index >= ctx.p().size()) {
            throw input_error("variable '" + nd.name + "' is not bound",
                              nd.span.begin);
          }
          return ctx.p()(nd.index);
        case VarFamily::U:
          if (!ctx.has_u()) {
            throw input_error("variable 'u' is not bound", nd.span.begin);
          }
          return ctx.u();
        case VarFamily::R:
          if (!ctx.has_r()) {
            throw input_error("variable 'r' is not bound", nd.span.begin);
          }
          return ctx.r();
      }
      throw input_error("corrupt variable node", nd.span.begin);
    }
    case NodeKind::Unary:
      return -eval_node(*nd.lhs, ctx);
    case NodeKind::Binary: {
      const double a = eval_node(*nd.lhs, ctx);
      const double b = eval_node(*nd.rhs, ctx);
      switch (nd.op) {
        case '+':
          return a + b;
        case '-':
          return a - b;
        case '*':
          return a * b;
        case '/':
          if (b == 0.0) throw input_error("division by zero", nd.span.begin);
          return a / b;
        case '^':
          if (a == 0.0 && b < 0.0) {
            throw input_error("zero raised to a negative power",
                              nd.span.begin);
          }
          if (a < 0.0 && b != std::trunc(b)) {
            throw input_error("negative base with a non-integer exponent",
                              nd.span.begin);
          }
          return std::pow(a, b);
      }
      throw input_error("corrupt operator node", nd.span.begin);
    }
    case NodeKind::Call: {
      const double a = eval_node(*nd.lhs, ctx);
      if (nd.name == "sin") return std::sin(a);
      if (nd.name == "cos") return std::cos(a);
      if (nd.name == "sinh") return std::sinh(a);
      if (nd.name == "cosh") return std::cosh(a);
      if (nd.name == "exp") return std::exp(a);
      if (nd.name == "abs") return std::abs(a);
      if (nd.name == "log") {
        if (a <= 0.0) {
          throw input_error("log of a nonpositive value", nd.span.begin);
        }
        return std::log(a);
      }
      if (nd.name == "sqrt") {
        if (a < 0.0) {
          throw input_error("square root of a negative value", nd.span.begin);
        }
        return std::sqrt(a);
      }
      throw input_error("unknown function '" + nd.name + "'", nd.span.begin);
    }
  }
  throw input_error("corrupt expression node", nd.span.begin);
}

}  // namespace

// ---------------------------------------------------------------------------
// Printing

namespace {

/// Grammar slot levels: additive 10, multiplicative 20, power 30,
/// negation 35, atoms 40. A node prints bare only where its level meets
/// the slot's minimum; otherwise it gets parentheses.
int node_level(const Node& nd) {
  switch (nd.kind) {
    case NodeKind::Number:
    case NodeKind::Variable:
    case NodeKind::Call:
      return 40;
    case NodeKind::Unary:
      return 35;
    case NodeKind::Binary:
      switch (nd.op) {
        case '+':
        case '-':
          return 10;
        case '*':
        case '/':
          return 20;
        case '^':
          return 30;
      }
      return 0;
  }
  return 0;
}

void format_number(double value, std::string& out) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  out.append(buffer, ptr);
  static_cast<void>(ec);
}

void print_node(const Node& nd, int min_level, std::string& out) {
  const bool needs_parens = node_level(nd) < min_level;
  if (needs_parens) out.push_back('(');
  switch (nd.kind) {
    case NodeKind::Number:
      format_number(nd.number, out);
      break;
    case NodeKind::Variable:
      out += nd.name;
      break;
    case NodeKind::Unary:
      out.push_back('-');
      print_node(*nd.lhs, 35, out);
      break;
    case NodeKind::Binary:
      switch (nd.op) {
        case '+':
        case '-':
          print_node(*nd.lhs, 10, out);
          out.push_back(' ');
          out.push_back(nd.op);
          out.push_back(' ');
          print_node(*nd.rhs, 20, out);
          break;
        case '*':
        case '/':
          print_node(*nd.lhs, 20, out);
          out.push_back(nd.op);
          print_node(*nd.rhs, 30, out);
          break;
        case '^':
          print_node(*nd.lhs, 35, out);
          out.push_back('^');
          print_node(*nd.rhs, 30, out);
          break;
      }
      break;
    case NodeKind::Call:
      out += nd.name;
      out.push_back('(');
      print_node(*nd.lhs, 0, out);
      out.push_back(')');
      break;
  }
  if (needs_parens) out.push_back(')');
}

}  // namespace

Expression::Expression(NodePtr root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {
  if (!root_) throw input_error("empty expression");
}

double Expression::eval(const EvalContext& ctx) const {
  return eval_node(*root_, ctx);
}

std::string Expression::print() const {
  std::string out;
  print_node(*root_, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

bool is_number(const NodePtr& n, double value) {
  return n->kind == NodeKind::Number && n->number == value;
}

bool is_any_number(const NodePtr& n) { return n->kind == NodeKind::Number; }

NodePtr fold_add(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0)) return b;
  if (is_number(b, 0.0)) return a;
  if (is_any_number(a) && is_any_number(b)) {
    return make_number(a->number + b->number);
  }
  return make_binary('+', std::move(a), std::move(b));
}

NodePtr fold_neg(NodePtr a) {
  if (is_any_number(a)) return make_number(-a->number);
  if (a->kind == NodeKind::Unary) return a->lhs;
  return make_unary(std::move(a));
}

NodePtr fold_sub(NodePtr a, NodePtr b) {
  if (is_number(b, 0.0)) return a;
  if (is_number(a, 0.0)) return fold_neg(std::move(b));
  if (is_any_number(a) && is_any_number(b)) {
    return make_number(a->number - b->number);
  }
  return make_binary('-', std::move(a), std::move(b));
}

NodePtr fold_mul(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0) || is_number(b, 0.0)) return make_number(0.0);
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  if (is_any_number(a) && is_any_number(b)) {
    return make_number(a->number * b->number);
  }
  return make_binary('*', std::move(a), std::move(b));
}

NodePtr fold_div(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0)) return make_number(0.0);
  if (is_number(b, 1.0)) return a;
  if (is_any_number(a) && is_any_number(b) && b->number != 0.0) {
    return make_number(a->number / b->number);
  }
  return make_binary('/', std::move(a), std::move(b));
}

NodePtr fold_pow(NodePtr a, NodePtr b) {
  if (is_number(b, 1.0)) return a;
  if (is_number(b, 0.0)) return make_number(1.0);
  return make_binary('^', std::move(a), std::move(b));
}

NodePtr diff(const NodePtr& n, VarFamily family, int index) {
  switch (n->kind) {
    case NodeKind::Number:
      return make_number(0.0);
    case NodeKind::Variable:
      return make_number(n->family == family && n->index == index ? 1.0 : 0.0);
    case NodeKind::Unary:
      return fold_neg(diff(n->lhs, family, index));
    case NodeKind::Binary: {
      NodePtr da = diff(n->lhs, family, index);
      NodePtr db = diff(n->rhs, family, index);
      switch (n->op) {
        case '+':
          return fold_add(std::move(da), std::move(db));
        case '-':
          return fold_sub(std::move(da), std::move(db));
        case '*':
          return fold_add(fold_mul(std::move(da), n->rhs),
                          fold_mul(n->lhs, std::move(db)));
        case '/':
          return fold_div(fold_sub(fold_mul(std::move(da), n->rhs),
                                   fold_mul(n->lhs, std::move(db))),
                          fold_pow(n->rhs, make_number(2.0)));
        case '^':
          if (is_any_number(n->rhs)) {
            // d(f^c) = c f^(c-1) f'
            const double c = n->rhs->number;
            return fold_mul(
                fold_mul(make_number(c), fold_pow(n->lhs, make_number(c - 1))),
                std::move(da));
          }
          // d(f^g) = f^g (g' log f + g f'/f)
          return fold_mul(
              fold_pow(n->lhs, n->rhs),
              fold_add(fold_mul(std::move(db), make_call("log", n->lhs)),
                       fold_mul(n->rhs, fold_div(std::move(da), n->lhs))));
      }
      throw input_error("corrupt operator node");
    }
    case NodeKind::Call: {
      NodePtr da = diff(n->lhs, family, index);
      const std::string& f = n->name;
      NodePtr outer;
      if (f == "sin") {
        outer = make_call("cos", n->lhs);
      } else if (f == "cos") {
        outer = fold_neg(make_call("sin", n->lhs));
      } else if (f == "sinh") {
        outer = make_call("cosh", n->lhs);
      } else if (f == "cosh") {
        outer = make_call("sinh", n->lhs);
      } else if (f == "exp") {
        outer = make_call("exp", n->lhs);
      } else if (f == "log") {
        outer = fold_div(make_number(1.0), n->lhs);
      } else if (f == "sqrt") {
        outer = fold_div(make_number(1.0),
                         fold_mul(make_number(2.0), make_call("sqrt", n->lhs)));
      } else if (f == "abs") {
        // sign(f), undefined at the kink
        outer = fold_div(n->lhs, make_call("abs", n->lhs));
      } else {
        throw input_error("unknown function '" + f + "'");
      }
      return fold_mul(std::move(outer), std::move(da));
    }
  }
  throw input_error("corrupt expression node");
}

}  // namespace

Expression derivative(const Expression& e, const std::string& var) {
  VarFamily family;
  int index;
  if (!classify_variable(var, family, index)) {
    throw input_error("unknown variable '" + var +
                      "'; expected x<i>, p<i>, u, or r");
  }
  return Expression(diff(e.root(), family, index), "");
}

// ---------------------------------------------------------------------------
// Structural comparison

namespace {

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Number:
      return a.number == b.number;
    case NodeKind::Variable:
      return a.family == b.family && a.index == b.index;
    case NodeKind::Unary:
      return nodes_equal(*a.lhs, *b.lhs);
    case NodeKind::Binary:
      return a.op == b.op && nodes_equal(*a.lhs, *b.lhs) &&
             nodes_equal(*a.rhs, *b.rhs);
    case NodeKind::Call:
      return a.name == b.name && nodes_equal(*a.lhs, *b.lhs);
  }
  return false;
}

}  // namespace

bool structurally_equal(const Expression& a, const Expression& b) {
  return nodes_equal(*a.root(), *b.root());
}

}  // namespace etaq::expr
