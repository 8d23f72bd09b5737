#pragma once

// Classical embedding of an N-level quantum system coupled to a classical
// oscillator, and weighted ensembles of such hybrid points.
//
// A point carries (q, p) and the amplitudes a_i = X_i + i K_i. The hybrid
// Hamiltonian is
//   H_T = (p^2 + Omega^2 q^2)/2 + a^dag H_Q a + gamma q a^dag A a,
// and the (X_i, K_i) pairs are normalized so that the Hamilton flow of the
// quantum part is the Schrodinger equation i da/dt = (H_Q + gamma q A) a
// (hbar = 1).

#include <cstdint>
#include <string>
#include <vector>

#include "hybridqc/phasespace.hpp"

namespace hqc::ensemble {

struct PureStatePoint {
  double q = 0.0;
  double p = 0.0;
  Vector X;
  Vector K;

  std::size_t levels() const { return static_cast<std::size_t>(X.size()); }
  CVector amplitudes() const;
  double norm_squared() const { return X.squaredNorm() + K.squaredNorm(); }

  /// Packed (q, p, X..., K...) for the integrator.
  Vector packed() const;
  static PureStatePoint unpack(const Vector& y);
};

struct Member {
  double weight = 0.0;
  PureStatePoint point;
};

class WeightedEnsemble {
 public:
  WeightedEnsemble() = default;
  /// Weights must be non-negative and sum to 1 within 1e-12; all members must
  /// have the same number of levels.
  explicit WeightedEnsemble(std::vector<Member> members);

  const std::vector<Member>& members() const { return members_; }
  std::size_t levels() const { return members_.empty() ? 0 : members_.front().point.levels(); }
  std::size_t size() const { return members_.size(); }

  double q_mean() const;
  double q_variance() const;

 private:
  std::vector<Member> members_;
};

struct DensityMatrix {
  CMatrix rho;
};

enum class Coupling { sigma_x, sigma_y, sigma_z };

Coupling coupling_from_name(const std::string& name);
const char* coupling_name(Coupling c);

struct HybridCouplingSpec {
  double Omega = 1.0;
  CMatrix H_Q;
  double gamma = 1.0;
  CMatrix A;
};

CMatrix pauli(Coupling c);

/// Omega = 1, H_Q = sigma_z / 2, coupling gamma q sigma_x.
HybridCouplingSpec default_divergence_spec(double gamma = 1.0, Coupling coupling = Coupling::sigma_x);

PureStatePoint embed(const CVector& amplitudes, double q = 0.0, double p = 0.0);

/// Equal-weight mixture of the sigma_z eigenstates, all at (q, p).
WeightedEnsemble z_basis_mixture(double q, double p);
/// Equal-weight mixture of the sigma_y eigenstates (1, +-i)/sqrt 2 at (q, p).
WeightedEnsemble y_basis_mixture(double q, double p);

DensityMatrix density_of(const WeightedEnsemble& e);

double observable_expectation(const WeightedEnsemble& e, const CMatrix& observable);

PureStatePoint hybrid_rhs(const HybridCouplingSpec& spec, const PureStatePoint& point);

double hybrid_energy(const HybridCouplingSpec& spec, const PureStatePoint& point);

/// Per-member RK4; members never interact, weights are copied unchanged.
WeightedEnsemble evolve_ensemble(const WeightedEnsemble& e, const HybridCouplingSpec& spec, double t, double dt);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct DivergenceSeries {
  std::vector<double> times;
  std::vector<double> trace_distance;
  std::vector<double> q_mean_1, q_mean_2;
  std::vector<double> q_var_1, q_var_2;

  double max_trace_distance() const;
};

inline constexpr double kPremiseTolerance = 1e-12;

/// Evolves both ensembles across the (increasing, non-negative) time grid with
/// step dt and reports how their density matrices and classical statistics
/// separate. Rejects ensembles whose initial densities differ.
DivergenceSeries representation_divergence(const WeightedEnsemble& mix1, const WeightedEnsemble& mix2,
                                           const HybridCouplingSpec& spec, const std::vector<double>& t_grid,
                                           double dt);

/// exp(-i H t) rho exp(i H t).
DensityMatrix unitary_evolution(const DensityMatrix& rho0, const CMatrix& H, double t);

}  // namespace hqc::ensemble
