#include <cmath>
#include <random>

#include "doctest.h"
#include "hybridqc/error.hpp"
#include "hybridqc/sudarshan.hpp"

using namespace hqc;
using namespace hqc::sudarshan;

namespace {

Eigen::VectorXcd sorted_spectrum(const Matrix& a) {
  Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(a).eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), [](auto x, auto y) {
    return x.imag() != y.imag() ? x.imag() < y.imag() : x.real() < y.real();
  });
  return ev;
}

Eigen::Index rank_of(const Matrix& m) {
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(1e-10);
  return qr.rank();
}

}  // namespace

TEST_CASE("hybrid flow reproduces the equations of motion") {
  const Matrix a = build_hybrid(HybridSpec::canonical(3.0, 2.0, 1.0)).flow();
  Matrix expected(6, 6);
  // rows/cols (q, p, q_p, p_q, x, k)
  expected << 0, 1, 0, 0, 0, 0,
              -9, 0, 0, 0, -1, 0,
              0, 0, 0, 1, 0, 0,
              0, 0, -9, 0, -0.5, 0,
              0, 0, 0, 0, 0, 1,
              -0.5, 0, -1, 0, -4, 0;
  CHECK(a == expected);
}

TEST_CASE("decoupled hybrid") {
  const Matrix a = build_hybrid(HybridSpec::canonical(3.0, 2.0, 0.0)).flow();
  CHECK(a.block(0, 4, 4, 2).isZero(0.0));
  CHECK(a.block(4, 0, 2, 4).isZero(0.0));
  // The (q_p, p_q) pair feeds nothing observable.
  CHECK(a(var::q, var::q_p) == 0.0);
  CHECK(a(var::q, var::p_q) == 0.0);
  CHECK(a(var::p, var::q_p) == 0.0);
  CHECK(a(var::p, var::p_q) == 0.0);

  SUBCASE("equal frequencies give identical block spectra") {
    const Matrix b = build_hybrid(HybridSpec::canonical(1.7, 1.7, 0.0)).flow();
    const Matrix cl = b.topLeftCorner(4, 4);
    const Matrix qu = b.bottomRightCorner(2, 2);
    const auto s_cl = sorted_spectrum(cl);
    const auto s_qu = sorted_spectrum(qu);
    for (Eigen::Index i = 0; i < s_cl.size(); ++i) {
      const double d0 = std::abs(s_cl(i) - s_qu(0)), d1 = std::abs(s_cl(i) - s_qu(1));
      CHECK(std::min(d0, d1) < 1e-12);
    }
  }
}

TEST_CASE("quantized reference") {
  const Matrix a = build_qq_reference(HybridSpec::canonical(3.0, 2.0, 1.0)).flow();
  Matrix expected(4, 4);
  expected << 0, 1, 0, 0, -9, 0, -1, 0, 0, 0, 0, 1, -1, 0, -4, 0;
  CHECK(a == expected);

  const Matrix off = build_qq_reference(HybridSpec::canonical(3.0, 2.0, 0.0)).flow();
  CHECK(off.block(0, 2, 2, 2).isZero(0.0));
  CHECK(off.block(2, 0, 2, 2).isZero(0.0));

  SUBCASE("(q, p) rows agree with the hybrid") {
    const Matrix cq = build_hybrid(HybridSpec::canonical(3.0, 2.0, 1.0)).flow();
    for (Eigen::Index r : {0, 1}) {
      const Eigen::Index cr = r == 0 ? var::q : var::p;
      CHECK(cq(cr, var::q) == a(r, 0));
      CHECK(cq(cr, var::p) == a(r, 1));
      CHECK(cq(cr, var::x) == a(r, 2));
      CHECK(cq(cr, var::k) == a(r, 3));
      CHECK(cq(cr, var::q_p) == 0.0);
      CHECK(cq(cr, var::p_q) == 0.0);
    }
  }
}

TEST_CASE("bar variables") {
  const BarTransform b = to_bar_variables();
  const System sys = build_hybrid(HybridSpec::canonical(3.0, 2.0, 1.0));
  CHECK(max_abs(b.T * b.T_inv - Matrix::Identity(6, 6)) <= 1e-14);
  CHECK(max_abs(b.T_inv * b.T - Matrix::Identity(6, 6)) <= 1e-14);

  const StructureMatrix s = b.structure(sys.structure);
  CHECK(s.S(bar::qbar, bar::pbar) == 1.0);
  CHECK(s.S(bar::l_p, bar::l_q) == -1.0);
  CHECK(s.S(bar::x, bar::k) == 1.0);
  CHECK(s.S(bar::qbar, bar::l_q) == 0.0);
  CHECK(s.S(bar::pbar, bar::l_p) == 0.0);
  CHECK((s.S + s.S.transpose()).isZero(0.0));

  const QuadraticHamiltonian h = b.hamiltonian(sys.ham);
  CHECK(h.H(bar::pbar, bar::pbar) == 1.0);
  CHECK(h.H(bar::qbar, bar::qbar) == 9.0);
  CHECK(h.H(bar::l_q, bar::l_q) == -1.0);
  CHECK(h.H(bar::l_p, bar::l_p) == -9.0);
  CHECK(h.H(bar::qbar, bar::x) == 1.0);
  for (Eigen::Index o : {bar::qbar, bar::pbar, bar::x, bar::k}) {
    CHECK(h.H(bar::l_p, o) == 0.0);
    CHECK(h.H(bar::l_q, o) == 0.0);
  }

  SUBCASE("energy is unchanged by the change of variables") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
      const Vector xi = Vector::NullaryExpr(6, [&](Eigen::Index) { return u(rng); });
      CHECK(std::abs(sys.ham.energy(xi) - h.energy(b.T * xi)) <= 1e-12);
    }
  }
  SUBCASE("bar flow has the decoupled l-sector") {
    const Matrix a = b.flow(sys.flow());
    CHECK(std::abs(a(bar::l_p, bar::l_q) - 1.0) <= 1e-15);
    CHECK(std::abs(a(bar::l_q, bar::l_p) + 9.0) <= 1e-15);
    CHECK(max_abs(a - s.S * h.H) <= 1e-12);
  }
  SUBCASE("moments round-trip") {
    const MomentState m{Vector::LinSpaced(6, -1, 1), Matrix::Identity(6, 6)};
    const auto back = b.from_bar(b.to_bar(m));
    CHECK((back.mean - m.mean).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(max_abs(back.cov - m.cov) <= 1e-15);
  }
}

TEST_CASE("first-moment constraints") {
  const ConstraintSet cs = first_moment_constraints();
  CHECK(cs.size() == 2);
  Vector m(6);
  m << 1.2, -0.4, 0.6, -0.2, 0.3, 0.9;
  CHECK(cs.first_residual(m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cs.first_residual(Vector::Zero(6)).isZero(0.0));

  const BarTransform b = to_bar_variables();
  Vector eta = Vector::Zero(6);
  eta(bar::l_p) = 1.0;
  const Vector r = cs.first_residual(b.T_inv * eta);
  CHECK(r(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(r(1)) <= 1e-15);
  CHECK_THROWS_AS(cs.first_residual(Vector::Zero(4)), Error);
}

TEST_CASE("constraint closure") {
  const Matrix canonical = build_hybrid(HybridSpec::canonical(3.0, 2.0, 1.0)).flow();
  CHECK(check_constraint_closure(first_moment_constraints(), canonical));

  HybridSpec wrong = HybridSpec::canonical(3.0, 2.0, 1.0);
  wrong.alpha = 1.0;
  wrong.beta = 0.0;
  CHECK_FALSE(check_constraint_closure(first_moment_constraints(), build_hybrid(wrong).flow()));

  ConstraintSet empty;
  empty.vars = first_moment_constraints().vars;
  empty.first_order = Matrix(0, 6);
  empty.first_rhs = Vector(0);
  CHECK(check_constraint_closure(empty, canonical));

  SUBCASE("affine form") {
    // <l_p> = 1 alone is not invariant: d<l_p>/dt = <l_q>, which the set does not fix.
    ConstraintSet cs = first_moment_constraints();
    cs.first_rhs << 1.0, 0.0;
    CHECK_FALSE(check_constraint_closure(cs, canonical));
  }
  SUBCASE("second order in bar coordinates") {
    const Matrix a_bar = to_bar_variables().flow(canonical);
    CHECK(check_constraint_closure(second_moment_constraints(), a_bar));
    CHECK_FALSE(check_constraint_closure(second_moment_constraints(), canonical));
  }
}

TEST_CASE("benchmark_first_moment") {
  for (auto [W, w] : {std::pair{3.0, 2.0}, {2.0, 3.0}, {1.0, 1.0}, {0.7, 5.0}}) {
    const BenchmarkReport r = benchmark_first_moment(HybridSpec::canonical(W, w, 1.0));
    CHECK(r.achievable);
    CHECK(r.residual <= 1e-10);
    REQUIRE(r.constraints.has_value());
    Matrix stacked(4, 6);
    stacked << r.constraints->first_order, first_moment_constraints().first_order;
    CHECK(rank_of(stacked) == 2);
  }

  HybridSpec wrong = HybridSpec::canonical(3.0, 2.0, 1.0);
  wrong.alpha = 1.0;
  wrong.beta = 0.0;
  const BenchmarkReport bad = benchmark_first_moment(wrong);
  CHECK_FALSE(bad.achievable);
  CHECK(bad.residual > 1e-10);
  CHECK_FALSE(bad.constraints.has_value());

  const BenchmarkReport free = benchmark_first_moment(HybridSpec::canonical(3.0, 2.0, 0.0));
  CHECK(free.achievable);
  REQUIRE(free.constraints.has_value());
  CHECK(free.constraints->empty());
}

TEST_CASE("second-moment constraints") {
  const ConstraintSet cs = second_moment_constraints();
  CHECK(cs.second_order.size() == 11);
  CHECK(cs.second_residual(Matrix::Zero(6, 6)).isZero(0.0));

  Matrix obs_only = Matrix::Zero(6, 6);
  obs_only(bar::qbar, bar::qbar) = 2.0;
  obs_only(bar::x, bar::k) = obs_only(bar::k, bar::x) = 0.3;
  CHECK(cs.second_residual(obs_only).isZero(0.0));

  const double hbar = 1.0;
  Matrix sigma = Matrix::Zero(6, 6);
  sigma(bar::l_p, bar::l_p) = sigma(bar::l_q, bar::l_q) = hbar / 2.0;
  const Vector r = cs.second_residual(sigma);
  const auto idx = std::find(cs.names.begin(), cs.names.end(), "<l_p^2>") - cs.names.begin();
  CHECK(r(idx) == doctest::Approx(hbar / 2.0));
}

TEST_CASE("benchmark_second_moment") {
  for (double hbar : {1.0, 0.1}) {
    const BenchmarkReport r = benchmark_second_moment(HybridSpec::canonical(3.0, 2.0, 1.0), hbar);
    CHECK_FALSE(r.achievable);
    CHECK(r.reason == "robertson_violation");
    CHECK(std::abs(r.min_eigenvalue + hbar / 2.0) <= 1e-12);
  }
  SUBCASE("independent of the frequencies") {
    const BenchmarkReport r = benchmark_second_moment(HybridSpec::canonical(0.4, 7.0, -2.0), 1.0);
    CHECK_FALSE(r.achievable);
    CHECK(r.min_eigenvalue == doctest::Approx(-0.5));
  }
  SUBCASE("tiny hbar scales linearly and stays infeasible") {
    const BenchmarkReport r = benchmark_second_moment(HybridSpec::canonical(3.0, 2.0, 1.0), 1e-12);
    CHECK(r.min_eigenvalue == doctest::Approx(-5e-13).epsilon(1e-9));
    CHECK_FALSE(r.achievable);
  }
  SUBCASE("a commuting pair in place of (l_p, l_q) is feasible") {
    const auto s = build_structure(VariableSet({"a", "b"}), {});
    CHECK(robertson_check({Vector::Zero(2), Matrix::Zero(2, 2)}, s).feasible);
  }
}

TEST_CASE("first-moment dynamics on the constraint surface") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Comparison c = compare_with_reference(HybridSpec::canonical(3.0, 2.0, 1.0),
                                              Vector::NullaryExpr(4, [&](Eigen::Index) { return u(rng); }),
                                              Matrix::Zero(4, 4), 0.0, 1.0, 10.0, 0.05);
  CHECK(c.max_mean_deviation() <= 1e-9);
  CHECK(c.max_cov_deviation() == 0.0);
}

TEST_CASE("second-moment novelty and energy") {
  Matrix cov = Matrix::Zero(4, 4);
  cov(2, 2) = 0.25;
  cov(3, 3) = 1.0;
  const Comparison c = compare_with_reference(HybridSpec::canonical(3.0, 2.0, 1.0), Vector::Zero(4), cov, 0.5, 1.0,
                                              10.0, 0.01);
  // q = qbar - l_p and p = pbar - l_q, so the l-sector variance shows up in
  // the physical (q, p) block from the start.
  CHECK(c.cov_deviation.front() == 0.5);
  CHECK(c.max_cov_deviation() > 1.0);
  double drift = 0.0;
  for (double e : c.cq_energy) drift = std::max(drift, std::abs(e - c.cq_energy.front()));
  CHECK(drift <= 1e-10);

  SUBCASE("with a classical l-sector the covariances agree") {
    const Comparison z = compare_with_reference(HybridSpec::canonical(3.0, 2.0, 1.0), Vector::Zero(4), cov, 0.0,
                                                1.0, 10.0, 0.01);
    CHECK(z.max_cov_deviation() <= 1e-9);
  }
}

TEST_CASE("stability flag") {
  CHECK(HybridSpec::canonical(3.0, 2.0, 1.0).stable());
  CHECK_FALSE(HybridSpec::canonical(0.5, 0.5, 1.0).stable());
}
