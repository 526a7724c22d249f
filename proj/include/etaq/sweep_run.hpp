#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <etaq/eta_operator.hpp>

namespace etaq {

/// Batch inequality sweep over cone samples. Each (n,k,l) entry is
/// crossed with each (theta, mu) pair, in listed order.
struct SweepSpec {
  std::vector<std::array<int, 3>> nkl;
  std::vector<std::array<double, 2>> theta_mu;
  int count = 1;
  std::uint64_t seed = 0;
  /// Failure threshold for the margin rows (margin < -tolerance counts
  /// as a failure). Identity rows are held to 1e-12 relative to the
  /// magnitudes of their participating terms, and concavity to 1e-9
  /// absolute, regardless of this field; those match their own
  /// numerical noise floors.
  double tolerance = 1e-10;
  int concavity_directions = 100;
  /// CSV report written here when nonempty.
  std::string output_path;
};

struct SweepConfigKey {
  int n = 0;
  int k = 0;
  int l = 0;
  double theta = 0.0;
  double mu = 0.0;
};

/// One inequality aggregated over all samples of one configuration.
/// min_margin is an empirical infimum over the sample set, not a
/// certified constant.
struct InequalityRow {
  SweepConfigKey config;
  std::string inequality;
  double min_margin = 0.0;
  double mean_margin = 0.0;
  /// The sampled lambda (ascending) achieving min_margin; serialized in
  /// the CSV as semicolon-joined floats for replay.
  Eigen::VectorXd argmin_sample;
  std::int64_t failures = 0;
};

struct SweepReport {
  std::vector<InequalityRow> rows;
  std::int64_t total_failures() const;
};

/// Evaluates, per sample: the sigma expansion identities, quotient
/// comparison margins, the surviving-pivot ratio, concavity gaps along
/// random unit directions, and the diagonal ratio bounds. Failures are
/// recorded in the report (never thrown) so the offending sample stays
/// available for replay. Deterministic: same spec, same bytes out.
SweepReport sweep(const SweepSpec& spec);

/// Renders the report as CSV (header plus one row per inequality).
std::string to_csv(const SweepReport& report);

struct ProbeRow {
  double epsilon = 0.0;
  double min_ratio = 0.0;
  double second_min_ratio = 0.0;
};

/// Feeds lambda = (eps, 1, ..., 1) directly to the diagonal-ratio
/// evaluator for each eps. For k = n the smallest ratio collapses with
/// eps while the second smallest stays bounded away from zero.
std::vector<ProbeRow> degeneration_probe(const QuotientOp& op, const EtaParams& params,
                                         const std::vector<double>& eps_list);

}  // namespace etaq
