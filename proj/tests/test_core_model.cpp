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

#include <algorithm>
#include <complex>
#include <cstring>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "platoon/core_model.hpp"
#include "test_oracles.hpp"

namespace platoon {
namespace {

TEST(BuildErrorMatrix, BaselineGainsRow3) {
  const auto A = build_error_matrix({0.2, 0.7}, 0.1);
  EXPECT_NEAR(A(2, 0), -2.0, 1e-12);
  EXPECT_NEAR(A(2, 1), -7.0, 1e-12);
  EXPECT_NEAR(A(2, 2), -10.0, 1e-12);
  EXPECT_EQ(A(0, 1), 1.0);
  EXPECT_EQ(A(1, 2), 1.0);
  EXPECT_EQ(A(0, 0), 0.0);
  EXPECT_EQ(A(1, 0), 0.0);
}

TEST(BuildErrorMatrix, TunedGainsRow3) {
  const auto A = build_error_matrix({0.82, 2.6}, 0.1);
  EXPECT_NEAR(A(2, 0), -8.2, 1e-12);
  EXPECT_NEAR(A(2, 1), -26.0, 1e-12);
  EXPECT_NEAR(A(2, 2), -10.0, 1e-12);
}

TEST(BuildErrorMatrix, ZeroGainsUnitTimeConstant) {
  const auto A = build_error_matrix({0.0, 0.0}, 1.0);
  EXPECT_EQ(A(2, 0), 0.0);
  EXPECT_EQ(A(2, 1), 0.0);
  EXPECT_EQ(A(2, 2), -1.0);
  const auto ev = eigenvalues_3x3(A);
  EXPECT_NEAR(ev[0].real(), 0.0, 1e-12);
  EXPECT_NEAR(ev[1].real(), 0.0, 1e-12);
  EXPECT_NEAR(ev[2].real(), -1.0, 1e-12);
  for (const auto& s : ev) {
    EXPECT_EQ(s.imag(), 0.0);
  }
}

TEST(BuildErrorMatrix, RejectsNonPositiveTimeConstant) {
  EXPECT_THROW(build_error_matrix({1.0, 1.0}, 0.0), ParameterError);
  EXPECT_THROW(build_error_matrix({1.0, 1.0}, -0.1), ParameterError);
}

TEST(BuildClosedLoop, TunedGainsBlocks) {
  const PlatoonParams p{0.7, 0.1, 0.05, 10};
  const auto clm = build_closed_loop({0.82, 2.6}, p);
  EXPECT_NEAR(clm.A_xx(3, 3), -1.0 / 0.7, 1e-15);
  EXPECT_NEAR(clm.A_xx(3, 3), -1.4286, 1e-4);
  EXPECT_EQ(clm.A_eta_x(0), 0.0);
  EXPECT_EQ(clm.A_eta_x(1), 0.0);
  EXPECT_EQ(clm.A_eta_x(2), 0.0);
  EXPECT_NEAR(clm.A_eta_x(3), 1.0 / 0.7, 1e-15);
  EXPECT_TRUE((clm.A_xx.topLeftCorner<3, 3>().isApprox(clm.A_e)));
  EXPECT_TRUE((clm.A_xx.block<3, 1>(0, 3).isZero()));
  EXPECT_TRUE((clm.A_xx.block<1, 3>(3, 0).isZero()));
  EXPECT_EQ(clm.A_x_eta(2), -10.0);
  EXPECT_EQ(clm.A_x_eta(0) + clm.A_x_eta(1) + clm.A_x_eta(3), 0.0);
  EXPECT_TRUE(clm.A_x_omega.isApprox(clm.A_eta_x.transpose()));
}

TEST(BuildClosedLoop, UnitTimeGap) {
  const auto clm = build_closed_loop({0.5, 1.0}, {1.0, 0.1, 0.05, 3});
  EXPECT_EQ(clm.A_x_omega, Eigen::Vector4d(0, 0, 0, 1));
}

TEST(BuildClosedLoop, OutputPicksKp) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int k = 0; k < 50; ++k) {
    const Gains g{u(rng), u(rng)};
    const auto clm = build_closed_loop(g, {});
    EXPECT_EQ(clm.C_omega * Eigen::Vector4d(1, 0, 0, 0), g.kp);
    EXPECT_EQ(clm.C_omega, Eigen::RowVector4d(g.kp, g.kd, 0, 1));
  }
}

TEST(BuildClosedLoop, RejectsInvalidParams) {
  EXPECT_THROW(build_closed_loop({1, 1}, {0.0, 0.1, 0.05, 1}), ParameterError);
  EXPECT_THROW(build_closed_loop({1, 1}, {0.7, -1.0, 0.05, 1}), ParameterError);
  EXPECT_THROW(build_closed_loop({1, 1}, {0.7, 0.1, 0.0, 1}), ParameterError);
  EXPECT_THROW(build_closed_loop({1, 1}, {0.7, 0.1, 0.05, 0}), ParameterError);
}

TEST(BuildClosedLoop, BitIdenticalOnRepeat) {
  const PlatoonParams p{0.63, 0.11, 0.04, 4};
  const auto a = build_closed_loop({0.731, 2.17}, p);
  const auto b = build_closed_loop({0.731, 2.17}, p);
  EXPECT_EQ(std::memcmp(a.A_xx.data(), b.A_xx.data(), sizeof(double) * 16), 0);
  EXPECT_EQ(std::memcmp(a.A_e.data(), b.A_e.data(), sizeof(double) * 9), 0);
  EXPECT_EQ(a.C_omega, b.C_omega);
  EXPECT_EQ(a.A_x_eta, b.A_x_eta);
}

TEST(Eigenvalues3x3, BaselineGainsAgainstOracle) {
  const auto A = build_error_matrix({0.2, 0.7}, 0.1);
  const auto ev = eigenvalues_3x3(A);
  EXPECT_LT(oracle::root_set_distance(ev, oracle::eigenvalues(A)), 1e-10);
  // One real root near -9.268 and a complex pair near -0.36 with damping ~0.78.
  EXPECT_NEAR(ev[2].real(), -9.268, 1e-3);
  const double s = ev[2].real();
  EXPECT_NEAR(s * s * s + 10.0 * s * s + 7.0 * s + 2.0, 0.0, 1e-9);
  EXPECT_EQ(ev[2].imag(), 0.0);
  EXPECT_NEAR(ev[0].real(), -0.36, 1e-2);
  EXPECT_LT(ev[0].imag(), 0.0);
  EXPECT_GT(ev[1].imag(), 0.0);
  EXPECT_NEAR(min_damping(ev), 0.78, 1e-2);
}

TEST(Eigenvalues3x3, TunedGainsDominantRealPart) {
  const auto ev = eigenvalues_3x3(build_error_matrix({0.82, 2.6}, 0.1));
  EXPECT_NEAR(dominant_real_part(ev), -0.367, 5e-3);
  EXPECT_NEAR(dominant_real_part(ev), oracle::eigenvalues(build_error_matrix({0.82, 2.6}, 0.1))[0].real(), 1e-10);
}

TEST(Eigenvalues3x3, SortedDescendingRealThenAscendingImag) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    Eigen::Matrix3d A;
    for (int i = 0; i < 9; ++i) {
      A.data()[i] = u(rng);
    }
    const auto ev = eigenvalues_3x3(A);
    for (int j = 0; j + 1 < 3; ++j) {
      EXPECT_TRUE(ev[j].real() > ev[j + 1].real() ||
                  (ev[j].real() == ev[j + 1].real() && ev[j].imag() <= ev[j + 1].imag()));
    }
  }
}

// Random dense matrices and random companion matrices, checked against a
// general-purpose eigensolver.
TEST(Eigenvalues3x3, RandomMatricesAgainstOracle) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 500; ++k) {
    Eigen::Matrix3d A;
    for (int i = 0; i < 9; ++i) {
      A.data()[i] = u(rng);
    }
    const auto ev = eigenvalues_3x3(A);
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    EXPECT_LT(oracle::root_set_distance(ev, oracle::eigenvalues(A)), 1e-8 * scale) << "matrix " << k;
  }
}

TEST(Eigenvalues3x3, ReexpansionReproducesCoefficients) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> kp(0.01, 20.0);
  std::uniform_real_distribution<double> kd(0.01, 50.0);
  std::uniform_real_distribution<double> tau(0.02, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double t = tau(rng);
    const Gains g{kp(rng), kd(rng)};
    const auto ev = eigenvalues_3x3(build_error_matrix(g, t));
    // (s - r0)(s - r1)(s - r2) = s^3 - e1 s^2 + e2 s - e3
    const auto e1 = ev[0] + ev[1] + ev[2];
    const auto e2 = ev[0] * ev[1] + ev[0] * ev[2] + ev[1] * ev[2];
    const auto e3 = ev[0] * ev[1] * ev[2];
    const double c2 = 1.0 / t;
    const double c1 = g.kd / t;
    const double c0 = g.kp / t;
    EXPECT_LT(std::abs(-e1 - c2), 1e-9 * std::max(1.0, c2));
    EXPECT_LT(std::abs(e2 - c1), 1e-9 * std::max(1.0, c1));
    EXPECT_LT(std::abs(-e3 - c0), 1e-9 * std::max(1.0, c0));
  }
}

TEST(CompanionStructure, TraceAndDeterminant) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int k = 0; k < 200; ++k) {
    const double t = u(rng) / 10.0;
    const Gains g{u(rng), u(rng)};
    const auto A = build_error_matrix(g, t);
    EXPECT_NEAR(A.trace(), -1.0 / t, 1e-12 / t);
    EXPECT_NEAR(A.determinant(), -g.kp / t, 1e-9 * g.kp / t);
  }
}

TEST(CheckPerformance, TunedGainsPass) {
  EXPECT_TRUE(check_performance(build_error_matrix({0.82, 2.6}, 0.1), {-0.367, 0.7}, 5e-3));
}

TEST(CheckPerformance, EigenvalueAtZeroFails) {
  EXPECT_FALSE(check_performance(build_error_matrix({0.0, 0.0}, 1.0), {-0.367, 0.7}));
}

TEST(CheckPerformance, BaselineGainsPassAtLooserTolerance) {
  EXPECT_TRUE(check_performance(build_error_matrix({0.2, 0.7}, 0.1), {-0.367, 0.7}, 1e-2));
}

TEST(CheckPerformance, DampingBelowMinimumFails) {
  // Pair at -0.367 +- 1j has damping ~0.34.
  const std::complex<double> a(-0.367, 1.0);
  const double r = -5.0;
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  A(0, 1) = 1.0;
  A(1, 2) = 1.0;
  const double e1 = 2 * a.real() + r;
  const double e2 = std::norm(a) + 2 * a.real() * r;
  const double e3 = std::norm(a) * r;
  A(2, 0) = e3;
  A(2, 1) = -e2;
  A(2, 2) = e1;
  EXPECT_FALSE(check_performance(A, {-0.367, 0.7}));
  EXPECT_TRUE(check_performance(A, {-0.367, 0.3}));
}

TEST(PerformanceSpec, Validation) {
  EXPECT_THROW((PerformanceSpec{0.0, 0.7}).validate(), ParameterError);
  EXPECT_THROW((PerformanceSpec{-0.3, 0.0}).validate(), ParameterError);
  EXPECT_THROW((PerformanceSpec{-0.3, 1.1}).validate(), ParameterError);
  EXPECT_NO_THROW((PerformanceSpec{-0.3, 1.0}).validate());
  EXPECT_THROW((PerformanceSpec{-4.0, 0.7}).validate_for(0.1), ConditionError);
  EXPECT_NO_THROW((PerformanceSpec{-3.0, 0.7}).validate_for(0.1));
}

TEST(Gains, Validation) {
  EXPECT_THROW((Gains{0.0, 1.0}).validate(), ParameterError);
  EXPECT_THROW((Gains{1.0, -1.0}).validate(), ParameterError);
  EXPECT_NO_THROW((Gains{1.0, 1.0}).validate());
}

}  // namespace
}  // namespace platoon
