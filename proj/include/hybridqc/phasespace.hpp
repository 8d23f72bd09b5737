#pragma once

// Variable sets, bracket structures, quadratic Hamiltonians and the linear
// moment dynamics they generate.
//
// A quadratic Hamiltonian is stored as the symmetric matrix H of
//   E(xi) = 1/2 xi^T H xi,
// and the bracket structure as the antisymmetric S with [xi_a, xi_b] = i hbar S_ab
// (or {xi_a, xi_b} = S_ab for Poisson brackets). Both brackets give the same
// linear flow d(xi)/dt = A xi with A = S H.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hqc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

class VariableSet {
 public:
  VariableSet() = default;
  explicit VariableSet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  bool contains(const std::string& label) const;
  /// Throws ErrorCode::invalid_argument naming the label when absent.
  std::size_t index_of(const std::string& label) const;

  bool operator==(const VariableSet&) const = default;

 private:
  std::vector<std::string> labels_;
};

struct StructureMatrix {
  Matrix S;
  double hbar = 1.0;

  std::size_t dim() const { return static_cast<std::size_t>(S.rows()); }
};

struct QuadraticHamiltonian {
  VariableSet vars;
  Matrix H;

  QuadraticHamiltonian() = default;
  /// H must be square, exactly symmetric and match vars.
  QuadraticHamiltonian(VariableSet v, Matrix h);

  double energy(const Vector& xi) const { return 0.5 * xi.dot(H * xi); }
};

struct MomentState {
  Vector mean;
  Matrix cov;

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
};

struct Propagator {
  Matrix U;
  double t = 0.0;
  Matrix generator;
};

struct RobertsonResult {
  bool feasible = false;
  double min_eigenvalue = 0.0;
};

using CanonicalPair = std::pair<std::string, std::string>;

/// S_ab = +1 for each declared (position, momentum) pair, -1 on the transpose,
/// zero elsewhere. Unknown or repeated labels are rejected.
StructureMatrix build_structure(const VariableSet& vars, const std::vector<CanonicalPair>& pairs,
                                double hbar = 1.0);

Matrix flow_matrix(const QuadraticHamiltonian& ham, const StructureMatrix& s);

/// Matrix exponential of a fixed generator, prepared once and evaluated at
/// many times.
///
/// The generator is split into its irreducible blocks (connected components of
/// the coupling graph) so decoupled sectors stay exactly decoupled. Each block
/// is diagonalized; when the eigenvector matrix is ill-conditioned (cond > 1e8,
/// degenerate or defective spectra) that block falls back to Pade
/// scaling-and-squaring.
class FlowExponential {
 public:
  explicit FlowExponential(Matrix generator);

  Matrix at(double t) const;
  const Matrix& generator() const { return generator_; }
  /// True when at least one block uses the scaling-and-squaring fallback.
  bool uses_fallback() const;

 private:
  struct Block {
    std::vector<Eigen::Index> indices;
    Matrix sub;
    bool diagonalized = false;
    CVector eigenvalues;
    CMatrix vectors;
    CMatrix inverse_vectors;
  };

  Matrix generator_;
  std::vector<Block> blocks_;
};

Propagator propagate_analytic(const Matrix& generator, double t);

/// RK4 on dm/dt = A m, dSigma/dt = A Sigma + Sigma A^T.
MomentState propagate_numeric(const Matrix& generator, const MomentState& state, double t, double dt);

MomentState evolve_moments(const MomentState& state, const Matrix& U);
MomentState evolve_moments(const MomentState& state, const Propagator& u);

/// <1/2 xi^T H xi> = 1/2 tr(H Sigma) + 1/2 m^T H m.
double expectation_quadratic(const MomentState& state, const QuadraticHamiltonian& ham);

inline constexpr double kRobertsonTolerance = 1e-10;

/// Positive-semidefiniteness of Sigma + (i hbar / 2) S, optionally restricted
/// to a subset of variables.
RobertsonResult robertson_check(const MomentState& state, const StructureMatrix& s,
                                const std::optional<std::vector<std::size_t>>& subset = std::nullopt);

Matrix symmetrized(const Matrix& m);
double max_abs(const Matrix& m);

}  // namespace hqc
