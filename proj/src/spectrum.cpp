#include <etaq/spectrum.hpp>

#include <algorithm>
#include <numeric>

namespace etaq {

Spectrum::Spectrum(const Eigen::VectorXd& raw) : raw_(raw) {
  const int n = static_cast<int>(raw.size());
  if (n < 2) throw index_error("spectrum needs at least 2 entries, got " + std::to_string(n));
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](int a, int b) { return raw_(a) < raw_(b); });
  sorted_.resize(n);
  for (int i = 0; i < n; ++i) sorted_(i) = raw_(order_[i]);
}

QuotientOp::QuotientOp(int n_, int k_, int l_) : n(n_), k(k_), l(l_) {
  if (n < 2) throw index_error("quotient op needs n >= 2");
  if (!(0 <= l && l < k && k <= n))
    throw index_error("quotient op needs 0 <= l < k <= n, got (n,k,l)=(" + std::to_string(n) +
                      "," + std::to_string(k) + "," + std::to_string(l) + ")");
}

}  // namespace etaq
