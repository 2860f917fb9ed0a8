/******************************************************************************
 * Copyright 2026 The Platoon Tuner Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

/**
 * @file core_model.hpp
 * @brief Platoon parameters, performance set and closed-loop matrices.
 *
 * The spacing-error dynamics of follower i under the PD + ZOH controller are
 * described in the coordinates x~ = (e, e', e'', u_{i-1}), eta = u^_{i-1} -
 * u_{i-1} and the timer sigma. Everything here is a pure function of the
 * vehicle constants and the gains.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "platoon/errors.hpp"

namespace platoon {

/// Homogeneous platoon constants.
struct PlatoonParams {
  double h = 0.7;       ///< time gap of the spacing policy [s]
  double tau_d = 0.1;   ///< powertrain time constant [s]
  double Ts = 0.05;     ///< transmission interval of the inter-vehicle link [s]
  int m = 10;           ///< number of followers

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw ParameterError("time gap h must be > 0");
    }
    if (!(tau_d > 0.0) || !std::isfinite(tau_d)) {
      throw ParameterError("powertrain time constant tau_d must be > 0");
    }
    if (!(Ts > 0.0) || !std::isfinite(Ts)) {
      throw ParameterError("transmission interval Ts must be > 0");
    }
    if (m < 1) {
      throw ParameterError("follower count m must be >= 1");
    }
  }
};

/// Performance set P(lambda_M, zeta_m): dominant real part equal to lambda_M,
/// damping of every complex pair at least zeta_m.
struct PerformanceSpec {
  double lambda_M = -0.367;
  double zeta_m = 0.7;

  void validate() const {
    if (!(lambda_M < 0.0) || !std::isfinite(lambda_M)) {
      throw ParameterError("lambda_M must be < 0");
    }
    if (!(zeta_m > 0.0 && zeta_m <= 1.0)) {
      throw ParameterError("zeta_m must lie in (0, 1]");
    }
  }

  /// Both gain loci require lambda_M > -1/(3 tau_d).
  void validate_for(double tau_d) const {
    validate();
    if (!(lambda_M > -1.0 / (3.0 * tau_d))) {
      std::ostringstream os;
      os << "pole-placement condition lambda_M > -1/(3 tau_d) violated: lambda_M = " << lambda_M
         << ", -1/(3 tau_d) = " << -1.0 / (3.0 * tau_d);
      throw ConditionError(os.str());
    }
  }
};

/// PD gains of the CACC controller.
struct Gains {
  double kp = 0.0;
  double kd = 0.0;

  void validate() const {
    if (!(kp > 0.0) || !std::isfinite(kp)) {
      throw ParameterError("kp must be > 0");
    }
    if (!(kd > 0.0) || !std::isfinite(kd)) {
      throw ParameterError("kd must be > 0");
    }
  }

  friend bool operator==(const Gains&, const Gains&) = default;
};

/// Flow-map matrices of the hybrid error system for one link.
struct ClosedLoopMatrices {
  Eigen::Matrix3d A_e;
  Eigen::Matrix4d A_xx;
  Eigen::Vector4d A_x_eta;
  Eigen::Vector4d A_x_omega;
  Eigen::RowVector4d A_eta_x;
  Eigen::RowVector4d C_omega;
  double h = 0.0;  ///< time gap the matrices were built for
};

/// Companion matrix of the spacing-error dynamics.
/// Characteristic polynomial: s^3 + s^2/tau_d + (kd/tau_d) s + kp/tau_d.
inline Eigen::Matrix3d build_error_matrix(const Gains& gains, double tau_d) {
  if (!(tau_d > 0.0) || !std::isfinite(tau_d)) {
    throw ParameterError("tau_d must be > 0");
  }
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  a(0, 1) = 1.0;
  a(1, 2) = 1.0;
  a(2, 0) = -gains.kp / tau_d;
  a(2, 1) = -gains.kd / tau_d;
  a(2, 2) = -1.0 / tau_d;
  return a;
}

inline ClosedLoopMatrices build_closed_loop(const Gains& gains, const PlatoonParams& params) {
  params.validate();
  ClosedLoopMatrices clm;
  clm.h = params.h;
  clm.A_e = build_error_matrix(gains, params.tau_d);
  clm.A_xx.setZero();
  clm.A_xx.topLeftCorner<3, 3>() = clm.A_e;
  clm.A_xx(3, 3) = -1.0 / params.h;
  clm.A_x_eta << 0.0, 0.0, -1.0 / params.tau_d, 0.0;
  clm.A_x_omega << 0.0, 0.0, 0.0, 1.0 / params.h;
  clm.A_eta_x = clm.A_x_omega.transpose();
  clm.C_omega << gains.kp, gains.kd, 0.0, 1.0;
  return clm;
}

using Eigenvalues3 = std::array<std::complex<double>, 3>;

namespace detail {

inline std::complex<double> cubic_value(const std::array<double, 3>& c, std::complex<double> z) {
  return ((z + c[2]) * z + c[1]) * z + c[0];
}

inline std::complex<double> cubic_slope(const std::array<double, 3>& c, std::complex<double> z) {
  return (3.0 * z + 2.0 * c[2]) * z + c[1];
}

// Newton polishing; a step is kept only if it lowers the residual, which
// keeps clustered (multiple) roots from being pushed apart.
inline std::complex<double> polish_root(const std::array<double, 3>& c, std::complex<double> z) {
  for (int it = 0; it < 4; ++it) {
    const auto f = cubic_value(c, z);
    const auto df = cubic_slope(c, z);
    if (std::abs(df) == 0.0) {
      break;
    }
    const auto next = z - f / df;
    if (!(std::abs(cubic_value(c, next)) < std::abs(f))) {
      break;
    }
    z = next;
  }
  return z;
}

inline double polish_real_root(const std::array<double, 3>& c, double x) {
  return polish_root(c, {x, 0.0}).real();
}

}  // namespace detail

/// Coefficients (c0, c1, c2) of det(sI - A) = s^3 + c2 s^2 + c1 s + c0.
inline std::array<double, 3> characteristic_coefficients(const Eigen::Matrix3d& a) {
  const double c2 = -a.trace();
  const double c1 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) -
                    a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  const double c0 = -a.determinant();
  return {c0, c1, c2};
}

/**
 * All three roots of det(sI - A), sorted by descending real part and then by
 * ascending imaginary part.
 *
 * The roots come from the closed-form cubic (trigonometric form when all
 * roots are real, Cardano otherwise) and are then polished by guarded Newton
 * iterations on the characteristic polynomial.
 */
inline Eigenvalues3 eigenvalues_3x3(const Eigen::Matrix3d& a) {
  const auto c = characteristic_coefficients(a);
  const double shift = c[2] / 3.0;
  const double p = c[1] - c[2] * c[2] / 3.0;
  const double q = 2.0 * c[2] * c[2] * c[2] / 27.0 - c[2] * c[1] / 3.0 + c[0];
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  Eigenvalues3 roots;
  if (disc <= 0.0 && p < 0.0) {
    // Three real roots.
    const double r = 2.0 * std::sqrt(-p / 3.0);
    double arg = (3.0 * q / (2.0 * p)) * std::sqrt(-3.0 / p);
    arg = std::clamp(arg, -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    constexpr double kTwoPiOver3 = 2.0943951023931954923;
    for (int k = 0; k < 3; ++k) {
      const double x = r * std::cos(phi - kTwoPiOver3 * k) - shift;
      roots[k] = {detail::polish_real_root(c, x), 0.0};
    }
  } else {
    // One real root (or a triple root when p == q == 0).
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double u = std::cbrt(-0.5 * q - std::copysign(sq, q));
    const double x = (u != 0.0) ? u - p / (3.0 * u) : 0.0;
    const double real_root = detail::polish_real_root(c, x - shift);
    // Deflate: s^2 + b s + d is the remaining quadratic factor.
    const double b = c[2] + real_root;
    const double d = std::abs(real_root) > 1.0 ? -c[0] / real_root : c[1] + real_root * b;
    const double qd = 0.25 * b * b - d;
    roots[0] = {real_root, 0.0};
    if (qd >= 0.0) {
      const double s = -0.5 * b - std::copysign(std::sqrt(qd), b);
      const double s2 = (s != 0.0) ? d / s : 0.0;
      roots[1] = {detail::polish_real_root(c, s), 0.0};
      roots[2] = {detail::polish_real_root(c, s2), 0.0};
    } else {
      const auto z = detail::polish_root(c, {-0.5 * b, std::sqrt(-qd)});
      roots[1] = {z.real(), std::abs(z.imag())};
      roots[2] = {z.real(), -std::abs(z.imag())};
    }
  }
  std::sort(roots.begin(), roots.end(), [](const auto& lhs, const auto& rhs) {
    if (lhs.real() != rhs.real()) {
      return lhs.real() > rhs.real();
    }
    return lhs.imag() < rhs.imag();
  });
  return roots;
}

inline double dominant_real_part(const Eigenvalues3& ev) { return ev[0].real(); }

/// Smallest damping ratio -a/|s| over eigenvalues with nonzero imaginary
/// part; 1 when all eigenvalues are real.
inline double min_damping(const Eigenvalues3& ev) {
  double zeta = 1.0;
  for (const auto& s : ev) {
    if (s.imag() != 0.0) {
      zeta = std::min(zeta, -s.real() / std::abs(s));
    }
  }
  return zeta;
}

inline constexpr double kDefaultPerformanceTol = 5e-3;

/// Membership test A in P(lambda_M, zeta_m) with an absolute tolerance on both
/// the dominant real part and the damping ratio.
inline bool check_performance(const Eigen::Matrix3d& a, const PerformanceSpec& spec,
                              double tol = kDefaultPerformanceTol) {
  const auto ev = eigenvalues_3x3(a);
  if (std::abs(dominant_real_part(ev) - spec.lambda_M) > tol) {
    return false;
  }
  return min_damping(ev) >= spec.zeta_m - tol;
}

}  // namespace platoon
