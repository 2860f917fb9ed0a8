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

#pragma once

#include <array>
#include <utility>

#include <Eigen/Dense>

#include "platoon/core_model.hpp"
#include "platoon/lmi.hpp"
#include "platoon/sdp_feas.hpp"

namespace platoon::sdp {

/// Decision vector layout: the 10 upper-triangular entries of P1 (row-major)
/// followed by p2.
inline constexpr int kPlatoonVars = 11;

inline constexpr std::array<std::pair<int, int>, 10> kP1Entries = {
    {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};

inline Eigen::VectorXd pack_decision(const Eigen::Matrix4d& P1, double p2) {
  Eigen::VectorXd y(kPlatoonVars);
  for (int k = 0; k < 10; ++k) {
    y[k] = P1(kP1Entries[k].first, kP1Entries[k].second);
  }
  y[10] = p2;
  return y;
}

inline std::pair<Eigen::Matrix4d, double> unpack_decision(const Eigen::VectorXd& y) {
  Eigen::Matrix4d P1;
  for (int k = 0; k < 10; ++k) {
    const auto [r, c] = kP1Entries[k];
    P1(r, c) = y[k];
    P1(c, r) = y[k];
  }
  return {P1, y[10]};
}

/// P1 = I, p2 = 1.
inline Eigen::VectorXd platoon_initial_point() { return pack_decision(Eigen::Matrix4d::Identity(), 1.0); }

/**
 * Feasibility system for fixed (gains, Ts, Delta, delta, theta):
 * M(0) < 0, M((Delta+1) Ts) < 0, -P1 < 0, -p2 < 0.
 *
 * M is affine in (P1, p2), so the coefficient matrices are exact differences
 * of M evaluated at unit decision vectors.
 */
inline AffineLmiSystem platoon_system(const ClosedLoopMatrices& clm, double Ts, int Delta, double delta,
                                      double theta) {
  if (!(Ts > 0.0) || Delta < 0 || !(delta > 0.0)) {
    throw ParameterError("platoon_system needs Ts > 0, Delta >= 0, delta > 0");
  }
  AffineLmiSystem sys;
  sys.n_vars = kPlatoonVars;

  StabilityCertificate base;
  base.P1.setZero();
  base.p2 = 0.0;
  base.delta = delta;
  base.theta = theta;
  base.Delta = Delta;

  for (const double sigma : {0.0, sigma_end(Delta, Ts)}) {
    AffineLmi lmi;
    const Matrix6d m0 = assemble_M(sigma, base, clm);
    lmi.F0 = m0;
    for (int k = 0; k < kPlatoonVars; ++k) {
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(kPlatoonVars);
      unit[k] = 1.0;
      StabilityCertificate c = base;
      std::tie(c.P1, c.p2) = unpack_decision(unit);
      lmi.F.emplace_back(assemble_M(sigma, c, clm) - m0);
    }
    sys.constraints.push_back(std::move(lmi));
  }

  AffineLmi p1_pos;
  p1_pos.F0 = Eigen::MatrixXd::Zero(4, 4);
  for (int k = 0; k < kPlatoonVars; ++k) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(kPlatoonVars);
    unit[k] = 1.0;
    p1_pos.F.emplace_back(-unpack_decision(unit).first);
  }
  sys.constraints.push_back(std::move(p1_pos));

  AffineLmi p2_pos;
  p2_pos.F0 = Eigen::MatrixXd::Zero(1, 1);
  for (int k = 0; k < kPlatoonVars; ++k) {
    p2_pos.F.emplace_back(Eigen::MatrixXd::Constant(1, 1, k == 10 ? -1.0 : 0.0));
  }
  sys.constraints.push_back(std::move(p2_pos));
  return sys;
}

inline StabilityCertificate certificate_from(const Eigen::VectorXd& y, double delta, double theta, int Delta) {
  StabilityCertificate c;
  std::tie(c.P1, c.p2) = unpack_decision(y);
  c.delta = delta;
  c.theta = theta;
  c.Delta = Delta;
  return c;
}

}  // namespace platoon::sdp
