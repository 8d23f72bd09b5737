#pragma once

// Six-variable Koopman-von Neumann-Sudarshan hybrid oscillator pair.
//
// Variables are ordered (q, p, q_p, p_q, x, k): the commuting classical pair,
// its unobservable conjugates, and the quantum oscillator. Canonical pairs are
// (q, p_q), (q_p, p) and (x, k).
//
//   H_CL = p p_q + Omega^2 q q_p
//   H_Q  = (k^2 + omega^2 x^2) / 2
//   H_I  = alpha q x + beta q_p x
//
// The benchmark-restoring choice is (alpha, beta) = (gamma/2, gamma).

#include <optional>
#include <string>
#include <vector>

#include "hybridqc/phasespace.hpp"

namespace hqc::sudarshan {

namespace var {
inline constexpr Eigen::Index q = 0, p = 1, q_p = 2, p_q = 3, x = 4, k = 5;
}

// Bar coordinates: (qbar, pbar, l_p, l_q, x, k).
namespace bar {
inline constexpr Eigen::Index qbar = 0, pbar = 1, l_p = 2, l_q = 3, x = 4, k = 5;
}

struct HybridSpec {
  double Omega = 3.0;
  double omega = 2.0;
  double gamma = 1.0;
  double alpha = 0.5;
  double beta = 1.0;

  /// (alpha, beta) = (gamma/2, gamma).
  static HybridSpec canonical(double Omega, double omega, double gamma) {
    return {Omega, omega, gamma, 0.5 * gamma, gamma};
  }
  /// False when the quantized two-oscillator reference has a non-positive
  /// normal-mode frequency squared (Omega^2 omega^2 <= gamma^2).
  bool stable() const;
};

struct System {
  QuadraticHamiltonian ham;
  StructureMatrix structure;

  Matrix flow() const { return flow_matrix(ham, structure); }
};

System build_hybrid(const HybridSpec& spec, double hbar = 1.0);

/// Fully quantized reference over (q, p, x, k):
/// H = (p^2 + Omega^2 q^2)/2 + (k^2 + omega^2 x^2)/2 + gamma q x.
System build_qq_reference(const HybridSpec& spec, double hbar = 1.0);

/// Linear change of variables eta = T xi from (q, p, q_p, p_q, x, k) to
/// (qbar, pbar, l_p, l_q, x, k), with qbar = q_p + q/2, pbar = p_q + p/2,
/// l_p = q_p - q/2, l_q = p_q - p/2.
struct BarTransform {
  Matrix T;
  Matrix T_inv;
  VariableSet vars;

  StructureMatrix structure(const StructureMatrix& s) const;
  /// H' = T^-T H T^-1, so that 1/2 xi^T H xi = 1/2 eta^T H' eta.
  QuadraticHamiltonian hamiltonian(const QuadraticHamiltonian& h) const;
  Matrix flow(const Matrix& a) const { return T * a * T_inv; }
  MomentState to_bar(const MomentState& s) const;
  MomentState from_bar(const MomentState& s) const;
};

BarTransform to_bar_variables();

/// Homogeneous or affine constraints on the moments of a state over `vars`:
///   first_order.row(i) . m = first_rhs(i)
///   tr(second_order[j] Sigma) = second_rhs[j]   (second_order[j] symmetric)
struct ConstraintSet {
  VariableSet vars;
  Matrix first_order;
  Vector first_rhs;
  std::vector<Matrix> second_order;
  std::vector<double> second_rhs;
  std::vector<std::string> names;

  std::size_t size() const { return static_cast<std::size_t>(first_order.rows()) + second_order.size(); }
  bool empty() const { return size() == 0; }

  Vector first_residual(const Vector& mean) const;
  Vector second_residual(const Matrix& cov) const;
  /// Re-expresses constraints stated in coordinates eta = T xi in terms of xi.
  ConstraintSet pulled_back(const Matrix& T, const VariableSet& xi_vars) const;
};

/// <l_p> = 0 and <l_q> = 0, written over (q, p, q_p, p_q, x, k).
ConstraintSet first_moment_constraints();

/// The eleven covariance conditions in bar coordinates: l_p and l_q
/// uncorrelated with qbar, pbar, x, k, and <l_p^2> = <l_q^2> = <{l_p, l_q}> = 0.
ConstraintSet second_moment_constraints();

inline constexpr double kClosureTolerance = 1e-10;

/// True when the constraint span is invariant under the adjoint of the flow
/// dm/dt = A m (first order) and dSigma/dt = A Sigma + Sigma A^T (second order).
bool check_constraint_closure(const ConstraintSet& cs, const Matrix& flow, double tol = kClosureTolerance);

struct BenchmarkReport {
  bool achievable = false;
  std::optional<ConstraintSet> constraints;
  double residual = 0.0;
  std::string reason;
  double min_eigenvalue = 0.0;
};

inline constexpr double kBenchmarkTolerance = 1e-10;

/// Searches for constraints q_p = lambda . (q,p,x,k), p_q = mu . (q,p,x,k)
/// that are preserved by the hybrid flow and make the observable first-moment
/// flow equal to the quantized reference. Both requirements are linear in the
/// coefficient matrix once the observable flow is fixed, so the search is a
/// single least-squares solve.
BenchmarkReport benchmark_first_moment(const HybridSpec& spec);

/// The second-moment conditions force <l_p^2> = <l_q^2> = 0 on a canonically
/// conjugate pair; reports the Robertson obstruction.
BenchmarkReport benchmark_second_moment(const HybridSpec& spec, double hbar = 1.0);

/// Constraint-satisfying hybrid mean for observable mean (q, p, x, k).
Vector constrained_mean(const Vector& observable_mean);

/// Hybrid covariance with the observable block `observable_cov` placed on
/// (qbar, pbar, x, k) and `l_variance * I` on (l_p, l_q), no cross terms.
Matrix hybrid_covariance(const Matrix& observable_cov, double l_variance);

/// Hybrid and quantized moment trajectories side by side.
struct Comparison {
  std::vector<double> times;
  std::vector<Vector> cq_mean;  // observables (q, p, x, k)
  std::vector<Vector> qq_mean;
  std::vector<Matrix> cq_cov;
  std::vector<Matrix> qq_cov;
  std::vector<double> cq_energy;  // <H_T> of the full hybrid state
  std::vector<double> cov_deviation;  // max |Sigma_obs^CQ - Sigma_obs^QQ|

  double max_cov_deviation() const;
  double max_mean_deviation() const;
};

Comparison compare_with_reference(const HybridSpec& spec, const Vector& observable_mean,
                                  const Matrix& observable_cov, double l_variance, double hbar,
                                  double t_max, double dt);

}  // namespace hqc::sudarshan
