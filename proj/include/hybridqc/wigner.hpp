#pragma once

// Two linearly coupled oscillators in the phase-space (Wigner) picture.
//
// For a quadratic Hamiltonian the Wigner function is transported by the
// classical flow, W(xi, t) = W0(U(t)^-1 xi), so the first two moments obey
// m(t) = U m0 and Sigma(t) = U Sigma0 U^T. The (q, p) oscillator starts as a
// classical point (delta distribution), the (x, k) oscillator in a Gaussian
// (coherent) state.

#include <array>
#include <cstdint>
#include <vector>

#include "hybridqc/phasespace.hpp"

namespace hqc::wigner {

struct OscPairConfig {
  double Omega = 3.0;
  double omega = 2.0;
  double gamma = 1.0;
  double hbar = 1.0;
  double q0 = 0.0, p0 = 0.0, x0 = 0.0, k0 = 0.0;
  double sigma_x = 0.0;
  double sigma_k = 0.0;

  /// Oscillator-matched coherent widths: sigma_x^2 = hbar/(2 omega),
  /// sigma_k^2 = hbar omega / 2.
  static OscPairConfig coherent(double Omega, double omega, double gamma, double hbar = 1.0);
};

/// The six frequency configurations used for the dispersion figures.
std::vector<OscPairConfig> figure_configs(double hbar = 1.0);

struct NormalModes {
  std::array<double, 2> freqs_squared{};
  Eigen::Matrix2d mode_matrix;  // columns are the mode directions in (q, x)
  bool stable = true;
};

/// Eigen-pairs of [[Omega^2, gamma], [gamma, omega^2]]. The rotation angle is
/// kept in (-pi/4, pi/4] so that with gamma = 0 the first mode is q and the
/// second is x.
NormalModes normal_modes(const OscPairConfig& cfg);

QuadraticHamiltonian pair_hamiltonian(const OscPairConfig& cfg);
StructureMatrix pair_structure(const OscPairConfig& cfg);
Matrix pair_flow(const OscPairConfig& cfg);

/// mean = (q0, p0, x0, k0), cov = diag(0, 0, sigma_x^2, sigma_k^2).
MomentState initial_state(const OscPairConfig& cfg);

struct DispersionSeries {
  std::vector<double> times;
  std::vector<double> dq, dp, dx, dk;
  std::vector<double> dqdp, dxdk, total;

  std::size_t size() const { return times.size(); }
};

/// Samples t = i dt for i = 0 .. round(t_max / dt) with the analytic
/// propagator. Dispersions are standard deviations, Delta q = sqrt(Sigma_qq).
DispersionSeries dispersion_series(const OscPairConfig& cfg, double t_max, double dt);

double total_uncertainty_min(const DispersionSeries& series);

struct SampleMoments {
  MomentState moments;
  std::size_t samples = 0;
};

/// Monte-Carlo transport of n initial points drawn from the delta x Gaussian
/// initial distribution. Every sample derives its random stream from
/// (seed, sample index) alone, and the reduction runs in sample order, so the
/// result is bit-identical for any number of workers.
SampleMoments monte_carlo_covariance(const OscPairConfig& cfg, double t, std::size_t n, std::uint64_t seed,
                                     unsigned workers = 1);

/// Standard error of each covariance entry for Gaussian samples:
/// sqrt((S_ii S_jj + S_ij^2) / (n - 1)).
Matrix covariance_standard_errors(const Matrix& cov, std::size_t n);

}  // namespace hqc::wigner
