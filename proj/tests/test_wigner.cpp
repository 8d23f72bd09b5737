#include <cmath>

#include "doctest.h"
#include "hybridqc/error.hpp"
#include "hybridqc/wigner.hpp"

using namespace hqc;
using namespace hqc::wigner;

TEST_CASE("normal modes") {
  SUBCASE("uncoupled") {
    const auto nm = normal_modes(OscPairConfig::coherent(3.0, 2.0, 0.0));
    CHECK(nm.freqs_squared[0] == 9.0);
    CHECK(nm.freqs_squared[1] == 4.0);
    CHECK(nm.mode_matrix == Eigen::Matrix2d::Identity());
    CHECK(nm.stable);
  }
  SUBCASE("(3, 2, 1)") {
    const auto nm = normal_modes(OscPairConfig::coherent(3.0, 2.0, 1.0));
    CHECK(nm.freqs_squared[0] == doctest::Approx(6.5 + std::sqrt(7.25)).epsilon(1e-14));
    CHECK(nm.freqs_squared[1] == doctest::Approx(6.5 - std::sqrt(7.25)).epsilon(1e-14));
    CHECK((nm.mode_matrix.transpose() * nm.mode_matrix - Eigen::Matrix2d::Identity()).norm() < 1e-15);
  }
  SUBCASE("equal frequencies split by gamma at 45 degrees") {
    const auto nm = normal_modes(OscPairConfig::coherent(1.73, 1.73, 1.0));
    CHECK(nm.freqs_squared[0] == doctest::Approx(1.73 * 1.73 + 1.0));
    CHECK(nm.freqs_squared[1] == doctest::Approx(1.73 * 1.73 - 1.0));
    CHECK(std::abs(std::abs(nm.mode_matrix(0, 0)) - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(std::abs(nm.mode_matrix(1, 0)) - std::sqrt(0.5)) < 1e-15);
  }
  SUBCASE("unstable coupling is flagged") { CHECK_FALSE(normal_modes(OscPairConfig::coherent(0.5, 0.5, 1.0)).stable); }
}

TEST_CASE("initial state") {
  OscPairConfig c;
  c.sigma_x = c.sigma_k = std::sqrt(0.5);
  const MomentState s = initial_state(c);
  CHECK(s.mean.isZero(0.0));
  CHECK(s.cov(0, 0) == 0.0);
  CHECK(s.cov(1, 1) == 0.0);
  CHECK(s.cov(2, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.cov(3, 3) == doctest::Approx(0.5).epsilon(1e-15));

  c.sigma_x = 1.0;
  c.sigma_k = 0.5;
  const auto r = robertson_check(initial_state(c), pair_structure(c), std::vector<std::size_t>{2, 3});
  CHECK(r.feasible);
  CHECK(std::abs(r.min_eigenvalue) < 1e-15);

  c.sigma_k = 0.0;
  CHECK_THROWS_AS(initial_state(c), Error);
}

TEST_CASE("dispersion series") {
  SUBCASE("starts at (0, hbar/2)") {
    for (double hbar : {1.0, 0.3}) {
      const auto s = dispersion_series(OscPairConfig::coherent(3.0, 2.0, 1.0, hbar), 1.0, 0.1);
      CHECK(s.size() == 11);
      CHECK(s.dqdp.front() == 0.0);
      CHECK(s.dxdk.front() == doctest::Approx(hbar / 2.0).epsilon(1e-15));
      CHECK(s.total.front() == doctest::Approx(hbar / 2.0).epsilon(1e-15));
    }
  }
  SUBCASE("decoupled coherent state is stationary") {
    const auto s = dispersion_series(OscPairConfig::coherent(3.0, 2.0, 0.0), 40.0, 0.01);
    for (std::size_t i = 0; i < s.size(); ++i) {
      REQUIRE(s.dqdp[i] == 0.0);
      REQUIRE(std::abs(s.dxdk[i] - 0.5) < 1e-14);
    }
    CHECK(std::abs(total_uncertainty_min(s) - 0.5) < 1e-14);
  }
  SUBCASE("weak coupling barely transfers") {
    const auto s = dispersion_series(OscPairConfig::coherent(3.0, 2.0, 0.01), 40.0, 0.01);
    const double peak = *std::max_element(s.dqdp.begin(), s.dqdp.end());
    CHECK(peak < 1e-5);
    CHECK(peak == doctest::Approx(8.1950384394e-6).epsilon(0.05));
  }
  SUBCASE("entries are non-negative and the sum never drops below hbar/2") {
    for (const auto& cfg : figure_configs()) {
      const auto s = dispersion_series(cfg, 40.0, 0.01);
      CHECK(*std::min_element(s.dqdp.begin(), s.dqdp.end()) >= 0.0);
      CHECK(*std::min_element(s.dxdk.begin(), s.dxdk.end()) >= 0.0);
      CHECK(total_uncertainty_min(s) >= 0.5 - 1e-9);
    }
  }
  SUBCASE("the products vanish at different times") {
    const auto s = dispersion_series(OscPairConfig::coherent(1.0, 1.01, 1.0), 200.0, 0.01);
    CHECK(*std::min_element(s.dxdk.begin(), s.dxdk.end()) < 0.05);
    CHECK(*std::max_element(s.dqdp.begin(), s.dqdp.end()) > 0.45);
  }
  SUBCASE("commensurate modes return after the common period") {
    const double w2_hi = (5.0 + std::sqrt(5.0)) / 2.0, w2_lo = (5.0 - std::sqrt(5.0)) / 2.0;
    const auto cfg = OscPairConfig::coherent(std::sqrt(w2_hi), std::sqrt(w2_lo), 1.0);
    const auto nm = normal_modes(cfg);
    CHECK(nm.freqs_squared[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(nm.freqs_squared[1] == doctest::Approx(1.0).epsilon(1e-14));
    const double period = 2.0 * M_PI;
    const auto s = dispersion_series(cfg, period, period);
    REQUIRE(s.size() == 2);
    CHECK(std::abs(s.dqdp[1] - s.dqdp[0]) < 1e-6);
    CHECK(std::abs(s.dxdk[1] - s.dxdk[0]) < 1e-6);
  }
  SUBCASE("single sample and bad arguments") {
    const auto s = dispersion_series(OscPairConfig::coherent(3.0, 2.0, 1.0), 0.0, 0.1);
    CHECK(s.size() == 1);
    CHECK(total_uncertainty_min(s) == s.total[0]);
    CHECK_THROWS_AS(dispersion_series(OscPairConfig::coherent(3.0, 2.0, 1.0), 1.0, 0.0), Error);
    CHECK_THROWS_AS(total_uncertainty_min(DispersionSeries{}), Error);
  }
}

TEST_CASE("monte carlo covariance") {
  const auto cfg = OscPairConfig::coherent(3.0, 2.0, 1.0);
  const std::size_t n = 100000;
  auto max_z = [&](const SampleMoments& mc, double t) {
    const Matrix u = FlowExponential(pair_flow(cfg)).at(t);
    const Matrix exact = u * initial_state(cfg).cov * u.transpose();
    const Matrix se = covariance_standard_errors(exact, n);
    double z = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) {
        const double d = std::abs(mc.moments.cov(i, j) - exact(i, j));
        z = std::max(z, se(i, j) > 0.0 ? d / se(i, j) : (d == 0.0 ? 0.0 : 1e300));
      }
    return z;
  };
  SUBCASE("t = 5 against the analytic covariance") {
    CHECK(max_z(monte_carlo_covariance(cfg, 5.0, n, 99), 5.0) <= 5.0);
  }
  SUBCASE("t = 0 reproduces the initial Gaussian") {
    CHECK(max_z(monte_carlo_covariance(cfg, 0.0, n, 100), 0.0) <= 5.0);
  }
  SUBCASE("decoupled classical sector keeps exactly zero spread") {
    const auto mc = monte_carlo_covariance(OscPairConfig::coherent(3.0, 2.0, 0.0), 3.0, 1000, 1);
    CHECK(mc.moments.cov.block(0, 0, 2, 4).isZero(0.0));
  }
  SUBCASE("worker count does not change a single bit") {
    const auto a = monte_carlo_covariance(cfg, 2.0, 20001, 42, 1);
    for (unsigned w : {2u, 3u, 8u}) {
      const auto b = monte_carlo_covariance(cfg, 2.0, 20001, 42, w);
      CHECK(a.moments.cov == b.moments.cov);
      CHECK(a.moments.mean == b.moments.mean);
    }
    CHECK(monte_carlo_covariance(cfg, 2.0, 20001, 43).moments.cov != a.moments.cov);
  }
  SUBCASE("needs two samples") { CHECK_THROWS_AS(monte_carlo_covariance(cfg, 1.0, 1, 0), Error); }
}
