#include <etaq/sampling.hpp>

#include <cmath>

#include <etaq/errors.hpp>
#include <etaq/symfunc.hpp>

namespace etaq {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

namespace {

/// One standard-normal pair by the polar method; no trig, rejection
/// loop deterministic for a fixed engine state.
void normal_pair(std::mt19937_64& rng, double& z0, double& z1) {
  double v0, v1, s;
  do {
    v0 = 2.0 * uniform01(rng) - 1.0;
    v1 = 2.0 * uniform01(rng) - 1.0;
    s = v0 * v0 + v1 * v1;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  z0 = v0 * f;
  z1 = v1 * f;
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Eigen::VectorXd unit_direction(std::mt19937_64& rng, int n) {
  if (n < 1) throw index_error("direction dimension must be positive");
  Eigen::VectorXd d(n);
  double norm2 = 0.0;
  while (norm2 == 0.0) {  // astronomically unlikely to loop
    int i = 0;
    while (i + 1 < n) {
      normal_pair(rng, d(i), d(i + 1));
      i += 2;
    }
    if (i < n) {
      double z0, z1;
      normal_pair(rng, z0, z1);
      d(i) = z0;
    }
    norm2 = d.squaredNorm();
  }
  return d / std::sqrt(norm2);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix(master ^ splitmix(a ^ splitmix(b)));
}

std::vector<Spectrum> sample_gamma_k(int n, int k, std::uint64_t seed, int count) {
  if (n < 2) throw index_error("need dimension >= 2");
  if (k < 1 || k > n) throw index_error("cone order outside [1, n]");
  if (count < 0) throw index_error("negative sample count");

  std::mt19937_64 rng(seed);
  std::vector<Spectrum> out;
  out.reserve(static_cast<std::size_t>(count));

  double spread = 0.5;
  const int block = 64;
  int draws = 0;
  int rejects = 0;
  Eigen::VectorXd lambda(n);
  while (static_cast<int>(out.size()) < count) {
    const double c = uniform_in(rng, 0.1, 2.0);
    for (int i = 0; i < n; ++i) {
      lambda(i) = c + uniform_in(rng, -spread, spread);
    }
    ++draws;
    if (cone_contains(k, lambda).contained) {
      out.emplace_back(lambda);
    } else {
      ++rejects;
    }
    if (draws == block) {
      const double rate = static_cast<double>(rejects) / draws;
      if (rate < 0.2) {
        spread *= 1.25;
      } else if (rate > 0.8) {
        spread /= 1.12;
      }
      draws = 0;
      rejects = 0;
    }
  }
  return out;
}

}  // namespace etaq
