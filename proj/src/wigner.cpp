#include "hybridqc/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "hybridqc/error.hpp"

namespace hqc::wigner {

namespace {

// SplitMix64 finalizer; used as a counter-based bit generator keyed on
// (seed, sample index).
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterEngine {
 public:
  using result_type = std::uint64_t;
  CounterEngine(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL))) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Box-Muller from two uniform doubles in (0, 1]; avoids the
// implementation-defined caching of std::normal_distribution.
std::array<double, 2> standard_normal_pair(CounterEngine& eng) {
  const double u1 = (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  constexpr double two_pi = 6.283185307179586476925286766559;
  return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
}

}  // namespace

OscPairConfig OscPairConfig::coherent(double Omega, double omega, double gamma, double hbar) {
  OscPairConfig c;
  c.Omega = Omega;
  c.omega = omega;
  c.gamma = gamma;
  c.hbar = hbar;
  c.sigma_x = std::sqrt(hbar / (2.0 * omega));
  c.sigma_k = std::sqrt(hbar * omega / 2.0);
  return c;
}

std::vector<OscPairConfig> figure_configs(double hbar) {
  return {
      OscPairConfig::coherent(3.0, 2.0, 1.0, hbar),   OscPairConfig::coherent(2.0, 3.0, 1.0, hbar),
      OscPairConfig::coherent(2.0, 0.51, 1.0, hbar),  OscPairConfig::coherent(0.51, 2.0, 1.0, hbar),
      OscPairConfig::coherent(1.73, 1.73, 1.0, hbar), OscPairConfig::coherent(1.0, 1.01, 1.0, hbar),
  };
}

NormalModes normal_modes(const OscPairConfig& cfg) {
  const double a = cfg.Omega * cfg.Omega;
  const double d = cfg.omega * cfg.omega;
  const double b = cfg.gamma;
  double theta = 0.0;
  if (a != d) {
    theta = 0.5 * std::atan(2.0 * b / (a - d));
  } else if (b != 0.0) {
    theta = std::copysign(0.25 * M_PI, b);
  }
  const double c = std::cos(theta), s = std::sin(theta);
  NormalModes nm;
  nm.mode_matrix << c, -s, s, c;
  nm.freqs_squared = {a * c * c + 2.0 * b * c * s + d * s * s, a * s * s - 2.0 * b * c * s + d * c * c};
  nm.stable = nm.freqs_squared[0] > 0.0 && nm.freqs_squared[1] > 0.0;
  return nm;
}

QuadraticHamiltonian pair_hamiltonian(const OscPairConfig& cfg) {
  Matrix h = Matrix::Zero(4, 4);
  h(0, 0) = cfg.Omega * cfg.Omega;
  h(1, 1) = 1.0;
  h(2, 2) = cfg.omega * cfg.omega;
  h(3, 3) = 1.0;
  h(0, 2) = h(2, 0) = cfg.gamma;
  return QuadraticHamiltonian(VariableSet({"q", "p", "x", "k"}), std::move(h));
}

StructureMatrix pair_structure(const OscPairConfig& cfg) {
  return build_structure(VariableSet({"q", "p", "x", "k"}), {{"q", "p"}, {"x", "k"}}, cfg.hbar);
}

Matrix pair_flow(const OscPairConfig& cfg) { return flow_matrix(pair_hamiltonian(cfg), pair_structure(cfg)); }

MomentState initial_state(const OscPairConfig& cfg) {
  if (!(cfg.sigma_x > 0.0) || !(cfg.sigma_k > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "initial_state: sigma_x and sigma_k must be positive");
  }
  MomentState s;
  s.mean = Vector(4);
  s.mean << cfg.q0, cfg.p0, cfg.x0, cfg.k0;
  s.cov = Matrix::Zero(4, 4);
  s.cov(2, 2) = cfg.sigma_x * cfg.sigma_x;
  s.cov(3, 3) = cfg.sigma_k * cfg.sigma_k;
  return s;
}

DispersionSeries dispersion_series(const OscPairConfig& cfg, double t_max, double dt) {
  if (!(dt > 0.0) || !(t_max >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "dispersion_series: need dt > 0 and t_max >= 0");
  }
  const FlowExponential flow(pair_flow(cfg));
  const MomentState s0 = initial_state(cfg);
  const auto n = static_cast<std::size_t>(std::llround(t_max / dt));

  DispersionSeries out;
  for (auto* v : {&out.times, &out.dq, &out.dp, &out.dx, &out.dk, &out.dqdp, &out.dxdk, &out.total}) v->reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const Matrix u = flow.at(t);
    const Matrix cov = u * s0.cov * u.transpose();
    if (!cov.allFinite()) {
      throw Error(ErrorCode::numerical, "dispersion_series: non-finite covariance at t=" + std::to_string(t));
    }
    // Clamp round-off negatives on a vanishing variance.
    auto sd = [&](Eigen::Index j) { return std::sqrt(std::max(cov(j, j), 0.0)); };
    out.times.push_back(t);
    out.dq.push_back(sd(0));
    out.dp.push_back(sd(1));
    out.dx.push_back(sd(2));
    out.dk.push_back(sd(3));
    out.dqdp.push_back(out.dq.back() * out.dp.back());
    out.dxdk.push_back(out.dx.back() * out.dk.back());
    out.total.push_back(out.dqdp.back() + out.dxdk.back());
  }
  return out;
}

double total_uncertainty_min(const DispersionSeries& series) {
  if (series.total.empty()) {
    throw Error(ErrorCode::invalid_argument, "total_uncertainty_min: empty series");
  }
  return *std::min_element(series.total.begin(), series.total.end());
}

SampleMoments monte_carlo_covariance(const OscPairConfig& cfg, double t, std::size_t n, std::uint64_t seed,
                                     unsigned workers) {
  if (n < 2) {
    throw Error(ErrorCode::invalid_argument, "monte_carlo_covariance: need at least 2 samples");
  }
  const MomentState s0 = initial_state(cfg);
  const Matrix u = FlowExponential(pair_flow(cfg)).at(t);

  // Row i holds the transported sample i.
  Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor> pts(static_cast<Eigen::Index>(n), 4);
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterEngine eng(seed, i);
      const auto z = standard_normal_pair(eng);
      Eigen::Vector4d xi(cfg.q0, cfg.p0, cfg.x0 + cfg.sigma_x * z[0], cfg.k0 + cfg.sigma_k * z[1]);
      pts.row(static_cast<Eigen::Index>(i)) = (u * xi).transpose();
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    fill(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(n, w * chunk), e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(fill, b, e);
    }
    for (auto& th : pool) th.join();
  }

  // Shifted two-pass estimator: deterministic samples give exactly zero spread.
  const Eigen::RowVector4d shift = pts.row(0);
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) sum += (pts.row(i) - shift).transpose();
  const Eigen::Vector4d centered_mean = sum / static_cast<double>(n);
  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const Eigen::Vector4d d = (pts.row(i) - shift).transpose() - centered_mean;
    acc += d * d.transpose();
  }
  SampleMoments out;
  out.samples = n;
  out.moments.mean = centered_mean + shift.transpose();
  out.moments.cov = acc / static_cast<double>(n - 1);
  return out;
}

Matrix covariance_standard_errors(const Matrix& cov, std::size_t n) {
  const Eigen::Index d = cov.rows();
  Matrix se(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      se(i, j) = std::sqrt(std::max(0.0, cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / static_cast<double>(n - 1));
  return se;
}

}  // namespace hqc::wigner
