#include "hybridqc/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <unsupported/Eigen/MatrixFunctions>

#include "hybridqc/error.hpp"
#include "hybridqc/rk4.hpp"

namespace hqc {

VariableSet::VariableSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw Error(ErrorCode::invalid_argument, "duplicate variable label '" + l + "'");
    }
  }
}

bool VariableSet::contains(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t VariableSet::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw Error(ErrorCode::invalid_argument, "unknown variable label '" + label + "'");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

QuadraticHamiltonian::QuadraticHamiltonian(VariableSet v, Matrix h) : vars(std::move(v)), H(std::move(h)) {
  if (H.rows() != H.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "Hamiltonian matrix is not square");
  }
  require_same_dim(static_cast<std::size_t>(H.rows()), vars.size(), "Hamiltonian vs variable set");
  if (H != H.transpose()) {
    throw Error(ErrorCode::invalid_argument, "Hamiltonian matrix is not symmetric");
  }
}

StructureMatrix build_structure(const VariableSet& vars, const std::vector<CanonicalPair>& pairs,
                                double hbar) {
  if (!(hbar > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "hbar must be positive");
  }
  const auto n = static_cast<Eigen::Index>(vars.size());
  StructureMatrix out{Matrix::Zero(n, n), hbar};
  std::set<std::string> used;
  for (const auto& [pos, mom] : pairs) {
    for (const auto* l : {&pos, &mom}) {
      if (!used.insert(*l).second) {
        throw Error(ErrorCode::invalid_argument, "label '" + *l + "' appears in more than one pair");
      }
    }
    const auto a = static_cast<Eigen::Index>(vars.index_of(pos));
    const auto b = static_cast<Eigen::Index>(vars.index_of(mom));
    out.S(a, b) = 1.0;
    out.S(b, a) = -1.0;
  }
  return out;
}

Matrix flow_matrix(const QuadraticHamiltonian& ham, const StructureMatrix& s) {
  require_same_dim(s.dim(), static_cast<std::size_t>(ham.H.rows()), "flow_matrix");
  return s.S * ham.H;
}

namespace {

constexpr double kConditionLimit = 1e8;

std::vector<std::vector<Eigen::Index>> coupled_blocks(const Matrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (a(i, j) != 0.0 || a(j, i) != 0.0) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return blocks;
}

}  // namespace

FlowExponential::FlowExponential(Matrix generator) : generator_(std::move(generator)) {
  if (generator_.rows() != generator_.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "generator is not square");
  }
  if (!generator_.allFinite()) {
    throw Error(ErrorCode::numerical, "generator has non-finite entries");
  }
  for (auto& idx : coupled_blocks(generator_)) {
    Block b;
    b.indices = std::move(idx);
    const auto m = static_cast<Eigen::Index>(b.indices.size());
    b.sub.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) b.sub(i, j) = generator_(b.indices[i], b.indices[j]);

    Eigen::EigenSolver<Matrix> es(b.sub, true);
    if (es.info() == Eigen::Success) {
      const CMatrix v = es.eigenvectors();
      Eigen::JacobiSVD<CMatrix> svd(v);
      const auto& sv = svd.singularValues();
      const double smin = sv(sv.size() - 1);
      if (smin > 0.0 && sv(0) / smin <= kConditionLimit) {
        b.diagonalized = true;
        b.eigenvalues = es.eigenvalues();
        b.vectors = v;
        b.inverse_vectors = v.partialPivLu().inverse();
      }
    }
    blocks_.push_back(std::move(b));
  }
}

bool FlowExponential::uses_fallback() const {
  return std::any_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return !b.diagonalized; });
}

Matrix FlowExponential::at(double t) const {
  const Eigen::Index n = generator_.rows();
  if (t == 0.0) return Matrix::Identity(n, n);
  Matrix u = Matrix::Zero(n, n);
  for (const auto& b : blocks_) {
    Matrix sub_u;
    if (b.diagonalized) {
      const CVector phases = (b.eigenvalues * t).array().exp().matrix();
      sub_u = (b.vectors * phases.asDiagonal() * b.inverse_vectors).real();
    } else {
      const Matrix scaled = b.sub * t;
      sub_u = scaled.exp();
    }
    const auto m = static_cast<Eigen::Index>(b.indices.size());
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) u(b.indices[i], b.indices[j]) = sub_u(i, j);
  }
  return u;
}

Propagator propagate_analytic(const Matrix& generator, double t) {
  FlowExponential flow(generator);
  return Propagator{flow.at(t), t, generator};
}

MomentState propagate_numeric(const Matrix& generator, const MomentState& state, double t, double dt) {
  const Eigen::Index n = generator.rows();
  require_same_dim(static_cast<std::size_t>(n), state.dim(), "propagate_numeric");
  require_same_dim(static_cast<std::size_t>(state.cov.rows()), state.dim(), "propagate_numeric covariance");

  // Packed state: [mean; vec(cov)] in column-major order.
  Vector y(n + n * n);
  y.head(n) = state.mean;
  y.tail(n * n) = Eigen::Map<const Vector>(state.cov.data(), n * n);

  auto rhs = [&](const Vector& s) {
    Vector d(s.size());
    d.head(n) = generator * s.head(n);
    Eigen::Map<const Matrix> c(s.data() + n, n, n);
    Matrix dc = generator * c + c * generator.transpose();
    d.tail(n * n) = Eigen::Map<const Vector>(dc.data(), n * n);
    return d;
  };
  y = rk4_integrate(rhs, std::move(y), t, dt);

  MomentState out;
  out.mean = y.head(n);
  out.cov = symmetrized(Eigen::Map<const Matrix>(y.data() + n, n, n));
  return out;
}

MomentState evolve_moments(const MomentState& state, const Matrix& U) {
  require_same_dim(static_cast<std::size_t>(U.rows()), state.dim(), "evolve_moments");
  return MomentState{U * state.mean, symmetrized(U * state.cov * U.transpose())};
}

MomentState evolve_moments(const MomentState& state, const Propagator& u) { return evolve_moments(state, u.U); }

double expectation_quadratic(const MomentState& state, const QuadraticHamiltonian& ham) {
  require_same_dim(state.dim(), static_cast<std::size_t>(ham.H.rows()), "expectation_quadratic");
  return 0.5 * (ham.H.cwiseProduct(state.cov).sum() + state.mean.dot(ham.H * state.mean));
}

RobertsonResult robertson_check(const MomentState& state, const StructureMatrix& s,
                                const std::optional<std::vector<std::size_t>>& subset) {
  require_same_dim(static_cast<std::size_t>(state.cov.rows()), s.dim(), "robertson_check");
  std::vector<Eigen::Index> idx;
  if (subset) {
    for (auto i : *subset) {
      if (i >= s.dim()) {
        throw Error(ErrorCode::invalid_argument, "robertson_check: subset index " + std::to_string(i) + " out of range");
      }
      idx.push_back(static_cast<Eigen::Index>(i));
    }
  } else {
    idx.resize(s.dim());
    std::iota(idx.begin(), idx.end(), 0);
  }
  const auto m = static_cast<Eigen::Index>(idx.size());
  if (m == 0) return {true, 0.0};

  // Real symmetric embedding of the Hermitian matrix Sigma + i (hbar/2) S.
  Matrix embed(2 * m, 2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double re = 0.5 * (state.cov(idx[i], idx[j]) + state.cov(idx[j], idx[i]));
      const double im = 0.5 * s.hbar * s.S(idx[i], idx[j]);
      embed(i, j) = re;
      embed(i + m, j + m) = re;
      embed(i, j + m) = -im;
      embed(i + m, j) = im;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(embed, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return {lo >= -kRobertsonTolerance, lo};
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace hqc
