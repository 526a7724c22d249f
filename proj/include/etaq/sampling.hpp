#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include <etaq/spectrum.hpp>

namespace etaq {

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
/// std::uniform_real_distribution is implementation-defined, so sampled
/// sequences would not be reproducible across standard libraries; this is.
double uniform01(std::mt19937_64& rng);

/// Uniform double in [lo, hi).
double uniform_in(std::mt19937_64& rng, double lo, double hi);

/// Standard normal via the Marsaglia polar method (pairs are drawn and
/// one is cached per engine call site, so consume sequentially).
/// Deterministic for a fixed engine state.
Eigen::VectorXd unit_direction(std::mt19937_64& rng, int n);

/// Splits one master seed into independent streams labeled (a, b).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// Draws count points strictly inside the k-th cone in dimension n via
/// lambda = c 1 + xi, c uniform in (0.1, 2), xi entrywise uniform in
/// (-s, s). The spread s starts at 0.5 and adapts in blocks of 64 draws:
/// up by 1.25x while the rejection rate sits below 20% (pushing samples
/// toward the cone boundary, where inequality margins are smallest) and
/// down by 1.12x above 80%. Rejected draws are discarded; every returned
/// sample is verified inside the cone. Fixed seed, fixed output.
std::vector<Spectrum> sample_gamma_k(int n, int k, std::uint64_t seed, int count);

}  // namespace etaq
