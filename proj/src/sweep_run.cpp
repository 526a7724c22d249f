#include <etaq/sweep_run.hpp>

#include <cmath>
#include <fstream>
#include <limits>

#include <etaq/csv.hpp>
#include <etaq/errors.hpp>
#include <etaq/sampling.hpp>
#include <etaq/symfunc.hpp>

namespace etaq {

namespace {

constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

/// Streaming min/mean/argmin for one inequality of one configuration.
struct Accum {
  const char* id;
  double threshold;
  double min = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::int64_t added = 0;
  std::int64_t failures = 0;
  Eigen::VectorXd argmin;

  void add(double margin, const Eigen::VectorXd& sample) {
    if (margin < min) {
      min = margin;
      argmin = sample;
    }
    sum += margin;
    ++added;
    if (margin < -threshold) ++failures;
  }
};

}  // namespace

std::int64_t SweepReport::total_failures() const {
  std::int64_t total = 0;
  for (const auto& row : rows) total += row.failures;
  return total;
}

SweepReport sweep(const SweepSpec& spec) {
  if (spec.count < 1) throw input_error("sample count must be >= 1");
  if (!(spec.tolerance > 0.0)) throw input_error("tolerance must be positive");
  if (spec.concavity_directions < 1) {
    throw input_error("need at least one concavity direction");
  }

  SweepReport report;
  std::uint64_t cfg_index = 0;
  for (const auto& nkl : spec.nkl) {
    for (const auto& tm : spec.theta_mu) {
      const QuotientOp op(nkl[0], nkl[1], nkl[2]);
      const EtaParams params(tm[0], tm[1]);
      const int n = op.n;
      const int k = op.k;
      const int l = op.l;

      std::vector<Accum> accums;
      auto push = [&](const char* id, double threshold) {
        accums.push_back(Accum{id, threshold});
        return accums.size() - 1;
      };
      const std::size_t ix_expand = push("identity_expand", 1e-12);
      const std::size_t ix_euler = push("identity_euler", 1e-12);
      const std::size_t ix_compl = push("identity_complement", 1e-12);
      std::size_t ix_mac_step = kAbsent;
      std::size_t ix_mac_base = kAbsent;
      std::size_t ix_mac_special = kAbsent;
      if (k >= 2) {
        ix_mac_step = push("maclaurin_step", spec.tolerance);
        ix_mac_base = push("maclaurin_base", spec.tolerance);
        ix_mac_special = push("maclaurin_special", spec.tolerance);
      }
      const std::size_t ix_reverse = push("reverse_ratio", spec.tolerance);
      const std::size_t ix_concavity = push("concavity_gap", 1e-9);
      const std::size_t ix_key = push("key_lemma_ratio", spec.tolerance);
      const std::size_t ix_second = push("second_min_ratio", spec.tolerance);

      const double dinv = 1.0 - 1.0 / (k - l);
      auto samples =
          sample_gamma_k(n, k, derive_seed(spec.seed, cfg_index, 0), spec.count);

      for (std::size_t si = 0; si < samples.size(); ++si) {
        const Spectrum& sample = samples[si];
        const Eigen::VectorXd& lam = sample.values();

        // Expansion identities at order k. Residuals are measured
        // relative to the magnitudes of the terms entering each identity
        // (not the result), since near the cone boundary the terms
        // nearly cancel and the result is far smaller than the inputs.
        const Eigen::MatrixXd table = sigma_excl_table(lam, k);
        const double sk = sigma(k, lam);
        double worst_expand = 0.0;
        double euler_sum = 0.0;
        double euler_scale = std::abs(k * sk);
        double compl_sum = 0.0;
        double compl_scale = std::abs((n - k) * sk);
        for (int i = 0; i < n; ++i) {
          const double sk_less_i = k <= n - 1 ? table(i, k) : 0.0;
          const double weighted = lam(i) * table(i, k - 1);
          const double expand_resid = sk - sk_less_i - weighted;
          const double expand_scale =
              std::abs(sk) + std::abs(sk_less_i) + std::abs(weighted);
          worst_expand =
              std::max(worst_expand, std::abs(expand_resid) / expand_scale);
          euler_sum += weighted;
          euler_scale += std::abs(weighted);
          compl_sum += sk_less_i;
          compl_scale += std::abs(sk_less_i);
        }
        accums[ix_expand].add(-worst_expand, lam);
        accums[ix_euler].add(-std::abs(euler_sum - k * sk) / euler_scale, lam);
        const double compl_resid = std::abs(compl_sum - (n - k) * sk);
        accums[ix_compl].add(
            compl_scale > 0.0 ? -compl_resid / compl_scale : -compl_resid, lam);

        if (k >= 2) {
          const QuotientOp step_pair(n, k - 1, l >= 1 ? l - 1 : 0);
          const MaclaurinMargins step = check_maclaurin(op, step_pair, lam);
          accums[ix_mac_step].add(step.normalized, lam);
          accums[ix_mac_special].add(step.special, lam);
          const QuotientOp base_pair(n, 1, 0);
          accums[ix_mac_base].add(check_maclaurin(op, base_pair, lam).normalized,
                                  lam);
        }

        accums[ix_reverse].add(check_reverse(k, sample).ratio, lam);

        // One gradient/Hessian per sample, reused across directions.
        const double q = quotient(op, lam);
        const Eigen::VectorXd grad = quotient_gradient(op, lam);
        const Eigen::MatrixXd hess = quotient_hessian(op, lam);
        std::mt19937_64 xi_rng(derive_seed(spec.seed, cfg_index, 1 + si));
        double min_gap = std::numeric_limits<double>::infinity();
        for (int j = 0; j < spec.concavity_directions; ++j) {
          const Eigen::VectorXd xi = unit_direction(xi_rng, n);
          const double gdot = grad.dot(xi);
          min_gap = std::min(min_gap,
                             dinv * gdot * gdot / q - xi.dot(hess * xi));
        }
        accums[ix_concavity].add(min_gap, lam);

        const KeyLemmaRatio ratios = key_lemma_ratio_lambda(op, params, sample);
        accums[ix_key].add(ratios.min_ratio, lam);
        accums[ix_second].add(ratios.second_min_ratio, lam);
      }

      for (const Accum& a : accums) {
        InequalityRow row;
        row.config = SweepConfigKey{n, k, l, params.theta, params.mu};
        row.inequality = a.id;
        row.min_margin = a.min;
        row.mean_margin = a.sum / static_cast<double>(a.added);
        row.argmin_sample = a.argmin;
        row.failures = a.failures;
        report.rows.push_back(std::move(row));
      }
      ++cfg_index;
    }
  }

  if (!spec.output_path.empty()) {
    std::ofstream out(spec.output_path, std::ios::binary);
    if (!out) throw input_error("cannot open '" + spec.output_path + "' for writing");
    out << to_csv(report);
    if (!out.flush()) {
      throw input_error("failed writing '" + spec.output_path + "'");
    }
  }
  return report;
}

std::string to_csv(const SweepReport& report) {
  csv::Writer w;
  w.line("# min margins are empirical infima over the sample set, not certified constants");
  w.cell("n").cell("k").cell("l").cell("theta").cell("mu").cell("inequality");
  w.cell("min_margin").cell("mean_margin").cell("failures").cell("argmin_sample");
  w.endrow();
  for (const auto& row : report.rows) {
    w.cell(row.config.n).cell(row.config.k).cell(row.config.l);
    w.cell(row.config.theta).cell(row.config.mu);
    w.cell(row.inequality);
    w.cell(row.min_margin).cell(row.mean_margin).cell(row.failures);
    std::string packed;
    for (Eigen::Index i = 0; i < row.argmin_sample.size(); ++i) {
      if (i) packed.push_back(';');
      packed += csv::format(row.argmin_sample(i));
    }
    w.cell(packed);
    w.endrow();
  }
  return w.str();
}

std::vector<ProbeRow> degeneration_probe(const QuotientOp& op, const EtaParams& params,
                                         const std::vector<double>& eps_list) {
  std::vector<ProbeRow> rows;
  rows.reserve(eps_list.size());
  for (const double eps : eps_list) {
    if (!(eps > 0.0)) throw input_error("probe epsilon must be positive");
    Eigen::VectorXd lam = Eigen::VectorXd::Ones(op.n);
    lam(0) = eps;
    const KeyLemmaRatio r = key_lemma_ratio_lambda(op, params, Spectrum(lam));
    rows.push_back(ProbeRow{eps, r.min_ratio, r.second_min_ratio});
  }
  return rows;
}

}  // namespace etaq
