#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "hybridqc/error.hpp"

namespace hqc {

/// Classical fixed-step fourth-order Runge-Kutta on an Eigen vector state.
/// `rhs(const Eigen::VectorXd&) -> Eigen::VectorXd` must be autonomous.
template <class Rhs>
Eigen::VectorXd rk4_step(const Rhs& rhs, const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = rhs(y);
  const Eigen::VectorXd k2 = rhs(y + 0.5 * h * k1);
  const Eigen::VectorXd k3 = rhs(y + 0.5 * h * k2);
  const Eigen::VectorXd k4 = rhs(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Number of equal steps covering [0, t] with step at most dt.
inline std::size_t rk4_step_count(double t, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::invalid_argument, "rk4: step must be positive, got " + std::to_string(dt));
  }
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::invalid_argument, "rk4: time must be non-negative, got " + std::to_string(t));
  }
  const double ratio = t / dt;
  auto n = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    n = static_cast<std::size_t>(std::ceil(ratio));
  }
  return n;
}

/// Integrates from 0 to t. Throws ErrorCode::numerical naming the first step
/// that produced a non-finite state.
template <class Rhs>
Eigen::VectorXd rk4_integrate(const Rhs& rhs, Eigen::VectorXd y, double t, double dt) {
  const std::size_t n = rk4_step_count(t, dt);
  if (n == 0) return y;
  const double h = t / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    y = rk4_step(rhs, y, h);
    if (!y.allFinite()) {
      throw Error(ErrorCode::numerical, "rk4: non-finite state at step " + std::to_string(i + 1));
    }
  }
  return y;
}

}  // namespace hqc
