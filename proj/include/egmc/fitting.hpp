// SPDX-License-Identifier: Apache-2.0
//
// Ordinary least-squares polynomial fits used by the calibration routines.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "egmc/errors.hpp"

namespace egmc {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  ///< of (intercept, slope)

  double operator()(double x) const noexcept { return intercept + slope * x; }

  /// x at which the line crosses zero.
  double root() const { return -intercept / slope; }

  /// First-order propagation of the coefficient covariance into root().
  double root_stderr() const {
    const double d_intercept = -1.0 / slope;
    const double d_slope = intercept / (slope * slope);
    const double var = d_intercept * d_intercept * covariance(0, 0) + d_slope * d_slope * covariance(1, 1) +
                       2.0 * d_intercept * d_slope * covariance(0, 1);
    return std::sqrt(std::max(var, 0.0));
  }
};

/// y = a x^2 + b x + c
struct QuadraticFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double x) const noexcept { return (a * x + b) * x + c; }
  bool convex() const noexcept { return a > 0.0; }
  double vertex() const { return -b / (2.0 * a); }
};

namespace detail {

inline Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& design, std::span<const double> y,
                                           double* residual_variance) {
  const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), static_cast<Eigen::Index>(y.size()));
  Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  if (residual_variance) {
    const auto dof = design.rows() - design.cols();
    *residual_variance = dof > 0 ? (design * coef - rhs).squaredNorm() / static_cast<double>(dof) : 0.0;
  }
  return coef;
}

inline void require_fit_input(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
  if (x.size() != y.size()) throw ShapeError("fit abscissae and ordinates differ in length");
  if (x.size() < min_points) throw CalibrationError("too few points for the requested fit");
}

}  // namespace detail

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  detail::require_fit_input(x, y, 2);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[i];
  }
  double s2 = 0.0;
  const Eigen::VectorXd coef = detail::solve_least_squares(design, y, &s2);
  LinearFit fit;
  fit.intercept = coef(0);
  fit.slope = coef(1);
  fit.covariance = s2 * (design.transpose() * design).inverse();
  return fit;
}

inline QuadraticFit fit_parabola(std::span<const double> x, std::span<const double> y) {
  detail::require_fit_input(x, y, 3);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = x[i] * x[i];
    design(i, 1) = x[i];
    design(i, 2) = 1.0;
  }
  const Eigen::VectorXd coef = detail::solve_least_squares(design, y, nullptr);
  return {coef(0), coef(1), coef(2)};
}

}  // namespace egmc
