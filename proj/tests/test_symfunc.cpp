#include <doctest.h>

#include <cmath>
#include <random>

#include <etaq/errors.hpp>
#include <etaq/spectrum.hpp>
#include <etaq/symfunc.hpp>

#include "oracles.hpp"

using etaq::QuotientOp;
using etaq::Spectrum;

namespace {
double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}
Eigen::Vector3d v123() { return Eigen::Vector3d(1, 2, 3); }
}  // namespace

TEST_SUITE_BEGIN("symfunc");

TEST_CASE("sigma matches subset enumeration on anchor values") {
  CHECK(etaq::sigma(2, v123()) == doctest::Approx(11.0).epsilon(1e-14));
  CHECK(etaq::sigma(2, v123()) == doctest::Approx(oracle::sigma_enum(2, v123())));
  CHECK(etaq::sigma(0, v123()) == 1.0);
  CHECK(etaq::sigma(3, v123()) == doctest::Approx(6.0));
}

TEST_CASE("sigma rejects out-of-range order") {
  CHECK_THROWS_AS(etaq::sigma(4, v123()), etaq::index_error);
  CHECK_THROWS_AS(etaq::sigma(-1, v123()), etaq::index_error);
}

TEST_CASE("sigma equals enumeration for mixed-sign vectors up to n=8") {
  std::mt19937_64 rng(0x51c0ffee);
  for (int n = 2; n <= 8; ++n) {
    for (int rep = 0; rep < 40; ++rep) {
      Eigen::VectorXd z = oracle::random_vec(rng, n, -3.0, 3.0);
      for (int k = 0; k <= n; ++k) {
        const double want = oracle::sigma_enum(k, z);
        CHECK_MESSAGE(rel_err(etaq::sigma(k, z), want) < 1e-12,
                      "n=", n, " k=", k, " rep=", rep);
      }
    }
  }
}

TEST_CASE("sigma_excl drops the requested entries") {
  CHECK(etaq::sigma_excl(1, v123(), 1) == doctest::Approx(4.0));
  Eigen::Vector4d z(1, 2, 3, 4);
  CHECK(etaq::sigma_excl(2, z, 0, 1) == doctest::Approx(12.0));
  CHECK_THROWS_AS(etaq::sigma_excl(1, v123(), 3), etaq::index_error);
  CHECK_THROWS_AS(etaq::sigma_excl(1, v123(), 0, 0), etaq::index_error);

  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    Eigen::VectorXd z8 = oracle::random_vec(rng, 8, -2.0, 2.0);
    for (int k = 0; k <= 6; ++k) {
      CHECK(rel_err(etaq::sigma_excl(k, z8, 3), oracle::sigma_enum_excl(k, z8, 3)) < 1e-12);
      CHECK(rel_err(etaq::sigma_excl(k, z8, 1, 5), oracle::sigma_enum_excl(k, z8, 1, 5)) < 1e-12);
    }
  }
}

TEST_CASE("restricted-polynomial identities hold") {
  // sigma_k(z) = sigma_k(z|i) + z_i sigma_{k-1}(z|i)
  // sum_i z_i sigma_{k-1}(z|i) = k sigma_k(z)
  // sum_i sigma_k(z|i) = (n-k) sigma_k(z)
  std::mt19937_64 rng(42);
  for (int n = 2; n <= 7; ++n) {
    for (int rep = 0; rep < 25; ++rep) {
      Eigen::VectorXd z = oracle::random_vec(rng, n, -2.5, 2.5);
      for (int k = 1; k <= n; ++k) {
        const double sk = etaq::sigma(k, z);
        double euler = 0.0, trace = 0.0;
        for (int i = 0; i < n; ++i) {
          CHECK(rel_err(etaq::sigma_excl(k, z, i) + z(i) * etaq::sigma_excl(k - 1, z, i), sk) < 1e-12);
          euler += z(i) * etaq::sigma_excl(k - 1, z, i);
          trace += etaq::sigma_excl(k, z, i);
        }
        CHECK(rel_err(euler, k * sk) < 1e-12);
        CHECK(rel_err(trace, (n - k) * sk) < 1e-12);
      }
    }
  }
}

TEST_CASE("sigma is homogeneous of degree k") {
  std::mt19937_64 rng(9);
  Eigen::VectorXd z = oracle::random_vec(rng, 6, -1.5, 2.0);
  for (double t : {0.5, 2.0, -3.0}) {
    for (int k = 0; k <= 6; ++k)
      CHECK(rel_err(etaq::sigma(k, (t * z).eval()), std::pow(t, k) * etaq::sigma(k, z)) < 1e-12);
  }
}

TEST_CASE("cone_contains reports the sigma margins") {
  auto in3 = etaq::cone_contains(3, Eigen::Vector3d(1, 1, 1));
  CHECK(in3.contained);
  REQUIRE(in3.sigmas.size() == 3);
  CHECK(in3.sigmas(0) == doctest::Approx(3.0));
  CHECK(in3.sigmas(1) == doctest::Approx(3.0));
  CHECK(in3.sigmas(2) == doctest::Approx(1.0));

  auto out2 = etaq::cone_contains(2, Eigen::Vector3d(1, 1, -1));
  CHECK_FALSE(out2.contained);
  CHECK(out2.first_failure == 2);
  CHECK(out2.sigmas(1) == doctest::Approx(-1.0));

  CHECK_THROWS_AS(etaq::cone_contains(4, v123()), etaq::index_error);
}

TEST_CASE("cone membership is nested over k") {
  std::mt19937_64 rng(1234);
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd z = oracle::random_vec(rng, 5, -1.0, 2.0);
    for (int k = 2; k <= 5; ++k) {
      if (etaq::cone_contains(k, z).contained) CHECK(etaq::cone_contains(k - 1, z).contained);
    }
  }
}

TEST_CASE("quotient evaluates sigma_k/sigma_l on admissible input") {
  QuotientOp op(3, 2, 1);
  CHECK(etaq::quotient(op, v123()) == doctest::Approx(11.0 / 6.0).epsilon(1e-14));
  QuotientOp top(3, 3, 0);
  CHECK(etaq::quotient(top, v123()) == doctest::Approx(6.0));
}

TEST_CASE("quotient reports the first failing cone level") {
  QuotientOp op(3, 2, 1);
  bool threw = false;
  try {
    etaq::quotient(op, Eigen::Vector3d(1, 1, -1));
  } catch (const etaq::admissibility_error& e) {
    threw = true;
    CHECK(e.failing_level == 2);
    CHECK(e.sigma_value == doctest::Approx(-1.0));
  }
  CHECK(threw);
}

TEST_CASE("maclaurin quotient margin anchors") {
  QuotientOp kl(3, 2, 1), rs(3, 1, 0);
  auto m = etaq::check_maclaurin(kl, rs, v123());
  CHECK(m.normalized == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(m.special == doctest::Approx(6.0).epsilon(1e-13));

  auto eq = etaq::check_maclaurin(kl, rs, Eigen::Vector3d(1, 1, 1));
  CHECK(std::abs(eq.normalized) < 1e-13);
  CHECK(std::abs(eq.special) < 1e-13);
}

TEST_CASE("maclaurin margins are nonnegative on positive samples") {
  std::mt19937_64 rng(77);
  for (int n = 3; n <= 6; ++n) {
    for (int rep = 0; rep < 60; ++rep) {
      Eigen::VectorXd z = oracle::random_vec(rng, n, 0.05, 3.0);
      for (int k = 2; k <= n; ++k) {
        for (int l = 1; l < k; ++l) {
          auto m = etaq::check_maclaurin(QuotientOp(n, k, l), QuotientOp(n, k - 1, l - 1), z);
          CHECK(m.normalized >= -1e-10);
          CHECK(m.special >= -1e-10);
          auto chain = etaq::check_maclaurin(QuotientOp(n, k, l), QuotientOp(n, 1, 0), z);
          CHECK(chain.normalized >= -1e-10);
        }
      }
    }
  }
}

TEST_CASE("maclaurin rejects non-dominating pairs") {
  CHECK_THROWS_AS(etaq::check_maclaurin(QuotientOp(3, 1, 0), QuotientOp(3, 2, 1), v123()),
                  etaq::index_error);
  CHECK_THROWS_AS(etaq::check_maclaurin(QuotientOp(3, 2, 1), QuotientOp(4, 1, 0), v123()),
                  etaq::index_error);
}

TEST_CASE("reverse ratio anchors") {
  auto r1 = etaq::check_reverse(2, Spectrum(Eigen::Vector3d(1, 1, 1)));
  CHECK(r1.ratio == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  auto r2 = etaq::check_reverse(2, Spectrum(Eigen::Vector3d(-0.5, 1, 3)));
  CHECK(r2.pivot == doctest::Approx(1.0));
  CHECK(r2.ratio == doctest::Approx(2.5 / 3.5).epsilon(1e-14));
}

TEST_CASE("reverse ratio requires a positive pivot entry") {
  // n=3, k=2: pivot is the middle entry.
  CHECK_THROWS_AS(etaq::check_reverse(2, Spectrum(Eigen::Vector3d(-2, -1, 5))),
                  etaq::admissibility_error);
}

TEST_CASE("reverse ratio lies in (0,1) on positive spectra") {
  std::mt19937_64 rng(31337);
  for (int n = 2; n <= 7; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      Spectrum s(oracle::random_vec(rng, n, 0.01, 4.0));
      for (int k = 1; k <= n; ++k) {
        auto r = etaq::check_reverse(k, s);
        CHECK(r.ratio > 0.0);
        CHECK(r.ratio <= 1.0 + 1e-15);
      }
    }
  }
}

TEST_CASE("spectrum sorts ascending and retains the permutation") {
  Spectrum s(Eigen::Vector3d(3, 1, 2));
  CHECK(s.values()(0) == 1.0);
  CHECK(s.values()(2) == 3.0);
  CHECK(s.order()[0] == 1);
  CHECK(s.order()[2] == 0);
  CHECK(s.raw()(0) == 3.0);
  CHECK_THROWS_AS(Spectrum(Eigen::VectorXd::Constant(1, 1.0)), etaq::index_error);
}

TEST_CASE("quotient op validates its index pattern") {
  CHECK_THROWS_AS(QuotientOp(3, 3, 3), etaq::index_error);
  CHECK_THROWS_AS(QuotientOp(3, 4, 1), etaq::index_error);
  CHECK_THROWS_AS(QuotientOp(3, 1, -1), etaq::index_error);
  CHECK_THROWS_AS(QuotientOp(1, 1, 0), etaq::index_error);
}

TEST_SUITE_END();
