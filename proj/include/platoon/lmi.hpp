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
 * @file lmi.hpp
 * @brief Timer-dependent dissipation matrix M(sigma) and certificate checks.
 *
 * With V(x) = x~' P1 x~ + p2 eta^2 exp(-delta sigma), the flow derivative plus
 * the supply rate omega_i^2 - theta^2 omega_{i-1}^2 equals the quadratic form
 * psi' M(sigma) psi, psi = (x~, eta, omega_{i-1}). Negative definiteness of M
 * on [0, (Delta+1) Ts] certifies the L2 gain theta and exponential
 * input-to-state stability. Since M depends on sigma only through
 * exp(-delta sigma), it suffices to check the two endpoints.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "platoon/core_model.hpp"

namespace platoon {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Witness (P1, p2, delta) for gain bound theta at MANSD Delta.
struct StabilityCertificate {
  Eigen::Matrix4d P1 = Eigen::Matrix4d::Identity();
  double p2 = 1.0;
  double delta = 1.0;
  double theta = 1.0;
  int Delta = 0;
};

/// theta = sqrt(1 + epsilon).
inline double theta_from_epsilon(double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw ParameterError("epsilon must be >= 0");
  }
  return std::sqrt(1.0 + epsilon);
}

inline double sigma_end(int Delta, double Ts) { return (Delta + 1) * Ts; }

inline Matrix6d assemble_M(double sigma, const StabilityCertificate& cert, const ClosedLoopMatrices& clm) {
  if (!(sigma >= 0.0)) {
    throw ParameterError("sigma must be >= 0");
  }
  const double decay = std::exp(-cert.delta * sigma);
  const Eigen::Matrix4d& P1 = cert.P1;

  Matrix6d M = Matrix6d::Zero();
  const Eigen::Matrix4d pa = P1 * clm.A_xx;
  M.topLeftCorner<4, 4>() = pa + pa.transpose() + clm.C_omega.transpose() * clm.C_omega;
  const Eigen::Vector4d m12 =
      P1 * clm.A_x_eta + clm.C_omega.transpose() + decay * cert.p2 * clm.A_eta_x.transpose();
  const Eigen::Vector4d m13 = P1 * clm.A_x_omega;
  M.block<4, 1>(0, 4) = m12;
  M.block<1, 4>(4, 0) = m12.transpose();
  M.block<4, 1>(0, 5) = m13;
  M.block<1, 4>(5, 0) = m13.transpose();
  M(4, 4) = -cert.delta * cert.p2 * decay + 1.0;
  M(4, 5) = -decay * cert.p2 / clm.h;
  M(5, 4) = M(4, 5);
  M(5, 5) = -cert.theta * cert.theta;
  return M;
}

/// Split M(sigma) = constant + exp(-delta sigma) * exp_part.
struct AffineDecomposition {
  Matrix6d constant;
  Matrix6d exp_part;

  Matrix6d at(double decay) const { return constant + decay * exp_part; }
};

inline AffineDecomposition decompose_M(const StabilityCertificate& cert, const ClosedLoopMatrices& clm) {
  AffineDecomposition d;
  d.constant = Matrix6d::Zero();
  d.exp_part = Matrix6d::Zero();
  const Eigen::Matrix4d pa = cert.P1 * clm.A_xx;
  d.constant.topLeftCorner<4, 4>() = pa + pa.transpose() + clm.C_omega.transpose() * clm.C_omega;
  const Eigen::Vector4d c12 = cert.P1 * clm.A_x_eta + clm.C_omega.transpose();
  const Eigen::Vector4d c13 = cert.P1 * clm.A_x_omega;
  d.constant.block<4, 1>(0, 4) = c12;
  d.constant.block<1, 4>(4, 0) = c12.transpose();
  d.constant.block<4, 1>(0, 5) = c13;
  d.constant.block<1, 4>(5, 0) = c13.transpose();
  d.constant(4, 4) = 1.0;
  d.constant(5, 5) = -cert.theta * cert.theta;

  const Eigen::Vector4d e12 = cert.p2 * clm.A_eta_x.transpose();
  d.exp_part.block<4, 1>(0, 4) = e12;
  d.exp_part.block<1, 4>(4, 0) = e12.transpose();
  d.exp_part(4, 4) = -cert.delta * cert.p2;
  d.exp_part(4, 5) = -cert.p2 / clm.h;
  d.exp_part(5, 4) = d.exp_part(4, 5);
  return d;
}

/// (M(0), M((Delta+1) Ts)).
inline std::pair<Matrix6d, Matrix6d> endpoint_matrices(const StabilityCertificate& cert,
                                                       const ClosedLoopMatrices& clm, double Ts) {
  return {assemble_M(0.0, cert, clm), assemble_M(sigma_end(cert.Delta, Ts), cert, clm)};
}

template <typename Derived>
double lambda_max(const Eigen::MatrixBase<Derived>& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym.eval(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

template <typename Derived>
double lambda_min(const Eigen::MatrixBase<Derived>& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym.eval(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline constexpr double kDefaultCertificateMargin = 1e-7;
inline constexpr int kDefaultInteriorSamples = 100;

struct VerificationReport {
  bool passed = false;
  double lambda_max_M0 = 0.0;
  double lambda_max_Mend = 0.0;
  double lambda_min_P1 = 0.0;
  double p2 = 0.0;
  double worst_interior = -std::numeric_limits<double>::infinity();  ///< max lambda_max over interior samples
  double worst_interior_sigma = 0.0;
  std::vector<std::string> failures;
};

/**
 * Dense eigenvalue check of a certificate: both endpoints must satisfy
 * lambda_max < -margin, P1 and p2 must exceed margin, and n_interior uniformly
 * spaced interior timer values must all give lambda_max < 0.
 */
inline VerificationReport verify_certificate(const StabilityCertificate& cert, const ClosedLoopMatrices& clm,
                                             double Ts, double margin = kDefaultCertificateMargin,
                                             int n_interior = kDefaultInteriorSamples) {
  if (!(margin > 0.0)) {
    throw ParameterError("margin must be > 0");
  }
  if (n_interior < 0) {
    throw ParameterError("n_interior must be >= 0");
  }
  if (cert.Delta < 0) {
    throw ParameterError("certificate Delta must be >= 0");
  }
  VerificationReport r;
  const auto [m0, mend] = endpoint_matrices(cert, clm, Ts);
  r.lambda_max_M0 = lambda_max(m0);
  r.lambda_max_Mend = lambda_max(mend);
  const Eigen::Matrix4d p1_sym = 0.5 * (cert.P1 + cert.P1.transpose());
  r.lambda_min_P1 = lambda_min(p1_sym);
  r.p2 = cert.p2;

  if (!(r.lambda_max_M0 < -margin)) {
    r.failures.push_back("M(0) negativity");
  }
  if (!(r.lambda_max_Mend < -margin)) {
    r.failures.push_back("M((Delta+1)Ts) negativity");
  }
  if (!(r.lambda_min_P1 > margin)) {
    r.failures.push_back("P1 positivity");
  }
  if (!(cert.p2 > margin)) {
    r.failures.push_back("p2 positivity");
  }
  if ((cert.P1 - cert.P1.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cert.P1.cwiseAbs().maxCoeff())) {
    r.failures.push_back("P1 symmetry");
  }
  const double s_end = sigma_end(cert.Delta, Ts);
  for (int k = 1; k <= n_interior; ++k) {
    const double sigma = s_end * k / (n_interior + 1);
    const double lm = lambda_max(assemble_M(sigma, cert, clm));
    if (lm > r.worst_interior) {
      r.worst_interior = lm;
      r.worst_interior_sigma = sigma;
    }
  }
  if (n_interior > 0 && !(r.worst_interior < 0.0)) {
    r.failures.push_back("interior sample negativity");
  }
  r.passed = r.failures.empty();
  return r;
}

}  // namespace platoon
