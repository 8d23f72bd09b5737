#include "hybridqc/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "hybridqc/error.hpp"
#include "hybridqc/rk4.hpp"

namespace hqc::ensemble {

using cd = std::complex<double>;

CVector PureStatePoint::amplitudes() const {
  CVector a(X.size());
  for (Eigen::Index i = 0; i < X.size(); ++i) a(i) = cd(X(i), K(i));
  return a;
}

Vector PureStatePoint::packed() const {
  const Eigen::Index n = X.size();
  Vector y(2 + 2 * n);
  y(0) = q;
  y(1) = p;
  y.segment(2, n) = X;
  y.segment(2 + n, n) = K;
  return y;
}

PureStatePoint PureStatePoint::unpack(const Vector& y) {
  const Eigen::Index n = (y.size() - 2) / 2;
  return PureStatePoint{y(0), y(1), y.segment(2, n), y.segment(2 + n, n)};
}

WeightedEnsemble::WeightedEnsemble(std::vector<Member> members) : members_(std::move(members)) {
  double total = 0.0;
  for (const auto& m : members_) {
    if (!(m.weight >= 0.0)) throw Error(ErrorCode::invalid_argument, "ensemble weight must be non-negative");
    if (m.point.X.size() != m.point.K.size() || m.point.levels() != members_.front().point.levels()) {
      throw Error(ErrorCode::dimension_mismatch, "ensemble members disagree on the number of levels");
    }
    total += m.weight;
  }
  if (!members_.empty() && std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::invalid_argument, "ensemble weights sum to " + std::to_string(total) + ", not 1");
  }
}

double WeightedEnsemble::q_mean() const {
  double m = 0.0;
  for (const auto& mem : members_) m += mem.weight * mem.point.q;
  return m;
}

double WeightedEnsemble::q_variance() const {
  const double m = q_mean();
  double v = 0.0;
  for (const auto& mem : members_) v += mem.weight * (mem.point.q - m) * (mem.point.q - m);
  return v;
}

Coupling coupling_from_name(const std::string& name) {
  if (name == "sigma_x") return Coupling::sigma_x;
  if (name == "sigma_y") return Coupling::sigma_y;
  if (name == "sigma_z") return Coupling::sigma_z;
  throw Error(ErrorCode::invalid_argument, "unknown coupling '" + name + "' (expected sigma_x, sigma_y or sigma_z)");
}

const char* coupling_name(Coupling c) {
  switch (c) {
    case Coupling::sigma_x: return "sigma_x";
    case Coupling::sigma_y: return "sigma_y";
    case Coupling::sigma_z: return "sigma_z";
  }
  return "?";
}

CMatrix pauli(Coupling c) {
  CMatrix m(2, 2);
  switch (c) {
    case Coupling::sigma_x: m << 0, 1, 1, 0; break;
    case Coupling::sigma_y: m << 0, cd(0, -1), cd(0, 1), 0; break;
    case Coupling::sigma_z: m << 1, 0, 0, -1; break;
  }
  return m;
}

HybridCouplingSpec default_divergence_spec(double gamma, Coupling coupling) {
  return HybridCouplingSpec{1.0, 0.5 * pauli(Coupling::sigma_z), gamma, pauli(coupling)};
}

PureStatePoint embed(const CVector& amplitudes, double q, double p) {
  const double n2 = amplitudes.squaredNorm();
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-8) {
    throw Error(ErrorCode::invalid_argument, "embed: amplitudes have norm " + std::to_string(std::sqrt(n2)));
  }
  return PureStatePoint{q, p, amplitudes.real(), amplitudes.imag()};
}

WeightedEnsemble z_basis_mixture(double q, double p) {
  CVector up(2), down(2);
  up << 1, 0;
  down << 0, 1;
  return WeightedEnsemble({{0.5, embed(up, q, p)}, {0.5, embed(down, q, p)}});
}

WeightedEnsemble y_basis_mixture(double q, double p) {
  const double s = 1.0 / std::sqrt(2.0);
  CVector plus(2), minus(2);
  plus << s, cd(0, s);
  minus << s, cd(0, -s);
  return WeightedEnsemble({{0.5, embed(plus, q, p)}, {0.5, embed(minus, q, p)}});
}

DensityMatrix density_of(const WeightedEnsemble& e) {
  const auto n = static_cast<Eigen::Index>(e.levels());
  CMatrix rho = CMatrix::Zero(n, n);
  for (const auto& m : e.members()) {
    const CVector a = m.point.amplitudes();
    rho += m.weight * (a * a.adjoint());
  }
  return DensityMatrix{rho};
}

double observable_expectation(const WeightedEnsemble& e, const CMatrix& observable) {
  require_same_dim(static_cast<std::size_t>(observable.rows()), e.levels(), "observable_expectation");
  cd total = 0.0;
  for (const auto& m : e.members()) {
    const CVector a = m.point.amplitudes();
    total += m.weight * a.dot(observable * a);  // dot conjugates the left operand
  }
  if (std::abs(total.imag()) > 1e-12) {
    throw Error(ErrorCode::numerical, "observable_expectation: non-Hermitian result, imaginary part " +
                                          std::to_string(total.imag()));
  }
  return total.real();
}

PureStatePoint hybrid_rhs(const HybridCouplingSpec& spec, const PureStatePoint& point) {
  require_same_dim(static_cast<std::size_t>(spec.H_Q.rows()), point.levels(), "hybrid_rhs");
  const CVector a = point.amplitudes();
  const CVector z = (spec.H_Q + spec.gamma * point.q * spec.A) * a;
  const double force = a.dot(spec.A * a).real();
  PureStatePoint d;
  d.q = point.p;
  d.p = -spec.Omega * spec.Omega * point.q - spec.gamma * force;
  // da/dt = -i z
  d.X = z.imag();
  d.K = -z.real();
  return d;
}

double hybrid_energy(const HybridCouplingSpec& spec, const PureStatePoint& point) {
  const CVector a = point.amplitudes();
  return 0.5 * (point.p * point.p + spec.Omega * spec.Omega * point.q * point.q) + a.dot(spec.H_Q * a).real() +
         spec.gamma * point.q * a.dot(spec.A * a).real();
}

WeightedEnsemble evolve_ensemble(const WeightedEnsemble& e, const HybridCouplingSpec& spec, double t, double dt) {
  auto rhs = [&](const Vector& y) { return hybrid_rhs(spec, PureStatePoint::unpack(y)).packed(); };
  std::vector<Member> out;
  out.reserve(e.size());
  for (const auto& m : e.members()) {
    out.push_back(Member{m.weight, PureStatePoint::unpack(rk4_integrate(rhs, m.point.packed(), t, dt))});
  }
  return WeightedEnsemble(std::move(out));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(static_cast<std::size_t>(a.rho.rows()), static_cast<std::size_t>(b.rho.rows()), "trace_distance");
  const CMatrix diff = a.rho - b.rho;
  const CMatrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double DivergenceSeries::max_trace_distance() const {
  return trace_distance.empty() ? 0.0 : *std::max_element(trace_distance.begin(), trace_distance.end());
}

DivergenceSeries representation_divergence(const WeightedEnsemble& mix1, const WeightedEnsemble& mix2,
                                           const HybridCouplingSpec& spec, const std::vector<double>& t_grid,
                                           double dt) {
  const double d0 = trace_distance(density_of(mix1), density_of(mix2));
  if (d0 > kPremiseTolerance) {
    throw Error(ErrorCode::invalid_argument,
                "representation_divergence: initial densities differ, trace distance " + std::to_string(d0));
  }
  DivergenceSeries out;
  WeightedEnsemble e1 = mix1, e2 = mix2;
  double now = 0.0;
  for (const double t : t_grid) {
    if (!(t >= now)) {
      throw Error(ErrorCode::invalid_argument, "representation_divergence: time grid must be non-negative and increasing");
    }
    if (t > now) {
      e1 = evolve_ensemble(e1, spec, t - now, dt);
      e2 = evolve_ensemble(e2, spec, t - now, dt);
      now = t;
    }
    out.times.push_back(t);
    out.trace_distance.push_back(trace_distance(density_of(e1), density_of(e2)));
    out.q_mean_1.push_back(e1.q_mean());
    out.q_mean_2.push_back(e2.q_mean());
    out.q_var_1.push_back(e1.q_variance());
    out.q_var_2.push_back(e2.q_variance());
  }
  return out;
}

DensityMatrix unitary_evolution(const DensityMatrix& rho0, const CMatrix& H, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  const CVector phase = (es.eigenvalues().cast<cd>() * cd(0, -t)).array().exp().matrix();
  const CMatrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix{u * rho0.rho * u.adjoint()};
}

}  // namespace hqc::ensemble
