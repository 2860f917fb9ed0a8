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
 * @file gain_locus.hpp
 * @brief Closed-form (kp, kd) loci placing the error poles in P(lambda_M, zeta_m).
 *
 * Branch C1: a real pole sits at lambda_M and the complex pair lies to its
 * left with damping >= zeta_m. Branch C2: the complex pair has real part
 * lambda_M and the remaining real pole lies further left. On each branch kd is
 * an affine function of kp and kp ranges over a known interval.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/core_model.hpp"

namespace platoon {

enum class Branch { C1, C2 };

inline std::string_view to_string(Branch b) { return b == Branch::C1 ? "C1" : "C2"; }

struct LocusBranch {
  Branch branch = Branch::C1;
  double kp_lower = 0.0;
  double kp_upper = 0.0;
  bool lower_inclusive = true;

  bool empty() const { return lower_inclusive ? !(kp_lower <= kp_upper) : !(kp_lower < kp_upper); }

  /// Interval membership with a relative slack for rounding in the bounds.
  bool contains(double kp, double rel_slack = 1e-12) const {
    const double slack = rel_slack * std::max({1.0, std::abs(kp_lower), std::abs(kp_upper)});
    if (kp > kp_upper + slack) {
      return false;
    }
    return lower_inclusive ? kp >= kp_lower - slack : kp > kp_lower - slack;
  }
};

namespace detail {

inline double shared_lower_bound(const PerformanceSpec& spec, double tau_d) {
  const double l = spec.lambda_M;
  return 2.0 * tau_d * l * l * l + l * l;
}

inline void check_locus_preconditions(const PerformanceSpec& spec, double tau_d) {
  if (!(tau_d > 0.0)) {
    throw ParameterError("tau_d must be > 0");
  }
  spec.validate();
  if (!(spec.lambda_M > -1.0 / (3.0 * tau_d))) {
    std::ostringstream os;
    os << "condition lambda_M > -1/(3 tau_d) (pole placement) violated: lambda_M = " << spec.lambda_M
       << " <= " << -1.0 / (3.0 * tau_d);
    throw ConditionError(os.str());
  }
}

inline void check_in_branch(const LocusBranch& b, double kp) {
  if (!b.contains(kp)) {
    std::ostringstream os;
    os << "kp = " << kp << " outside the " << to_string(b.branch) << " interval "
       << (b.lower_inclusive ? "[" : "(") << b.kp_lower << ", " << b.kp_upper << "]";
    throw DomainError(os.str());
  }
}

}  // namespace detail

/// kp interval of branch C1: [2 tau_d lM^3 + lM^2, |lM| (lM tau_d + 1)^2 / (4 tau_d zm^2)].
inline LocusBranch c1_bounds(const PerformanceSpec& spec, double tau_d) {
  detail::check_locus_preconditions(spec, tau_d);
  const double l = spec.lambda_M;
  const double z = spec.zeta_m;
  LocusBranch b;
  b.branch = Branch::C1;
  b.kp_upper = std::abs(l) * (l * tau_d + 1.0) * (l * tau_d + 1.0) / (4.0 * tau_d * z * z);
  b.kp_lower = detail::shared_lower_bound(spec, tau_d);
  b.lower_inclusive = true;
  return b;
}

/// kd on branch C1: kd = -kp/lM - lM^2 tau_d - lM.
inline double c1_kd(double kp, const PerformanceSpec& spec, double tau_d) {
  detail::check_in_branch(c1_bounds(spec, tau_d), kp);
  const double l = spec.lambda_M;
  return -kp / l - l * l * tau_d - l;
}

/// kp interval of branch C2: (2 tau_d lM^3 + lM^2, lM^2 (2 lM tau_d + 1) / zm^2]. Requires zm < 1.
inline LocusBranch c2_bounds(const PerformanceSpec& spec, double tau_d) {
  detail::check_locus_preconditions(spec, tau_d);
  if (!(spec.zeta_m < 1.0)) {
    throw DomainError("branch C2 requires zeta_m in (0, 1)");
  }
  const double l = spec.lambda_M;
  const double z = spec.zeta_m;
  LocusBranch b;
  b.branch = Branch::C2;
  b.kp_upper = l * l * (2.0 * l * tau_d + 1.0) / (z * z);
  b.kp_lower = detail::shared_lower_bound(spec, tau_d);
  b.lower_inclusive = false;
  return b;
}

/// kd on branch C2: kd = -(8 lM^3 tau_d^2 + 8 lM^2 tau_d + 2 lM - tau_d kp) / (2 lM tau_d + 1).
inline double c2_kd(double kp, const PerformanceSpec& spec, double tau_d) {
  detail::check_in_branch(c2_bounds(spec, tau_d), kp);
  const double l = spec.lambda_M;
  const double t = tau_d;
  return -(8.0 * l * l * l * t * t + 8.0 * l * l * t + 2.0 * l - t * kp) / (2.0 * l * t + 1.0);
}

inline double branch_kd(Branch branch, double kp, const PerformanceSpec& spec, double tau_d) {
  return branch == Branch::C1 ? c1_kd(kp, spec, tau_d) : c2_kd(kp, spec, tau_d);
}

struct LocusCandidate {
  Gains gains;
  Branch branch = Branch::C1;
};

/**
 * Uniform kp grids over both branches.
 *
 * C1 uses n_k1 points on the closed interval (a single point sits at
 * kp_lower). C2 uses n_k2 points kp_lower + j (kp_upper - kp_lower)/n_k2,
 * j = 1..n_k2, which excludes the open lower end. An empty branch contributes
 * nothing. C2 is skipped when zeta_m == 1.
 */
inline std::vector<LocusCandidate> enumerate_locus(const PerformanceSpec& spec, double tau_d, int n_k1,
                                                   int n_k2) {
  if (n_k1 < 1 || n_k2 < 1) {
    throw ParameterError("grid counts n_k1 and n_k2 must be >= 1");
  }
  std::vector<LocusCandidate> out;
  const LocusBranch b1 = c1_bounds(spec, tau_d);
  if (!b1.empty()) {
    for (int j = 0; j < n_k1; ++j) {
      const double kp = n_k1 == 1 ? b1.kp_lower
                                  : b1.kp_lower + (b1.kp_upper - b1.kp_lower) * j / (n_k1 - 1);
      out.push_back({{kp, c1_kd(kp, spec, tau_d)}, Branch::C1});
    }
  }
  if (spec.zeta_m < 1.0) {
    const LocusBranch b2 = c2_bounds(spec, tau_d);
    if (!b2.empty()) {
      for (int j = 1; j <= n_k2; ++j) {
        const double kp = b2.kp_lower + (b2.kp_upper - b2.kp_lower) * j / n_k2;
        out.push_back({{kp, c2_kd(kp, spec, tau_d)}, Branch::C2});
      }
    }
  }
  return out;
}

}  // namespace platoon
