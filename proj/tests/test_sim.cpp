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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "platoon/sim.hpp"
#include "platoon/tuner.hpp"
#include "test_oracles.hpp"

namespace platoon {
namespace {

const PlatoonParams kParams{0.7, 0.1, 0.05, 10};
const Gains kTuned{0.82, 2.6};
const Gains kBaseline{0.2, 0.7};

SimOptions short_run(double t_end) {
  SimOptions o;
  o.t_end = t_end;
  return o;
}

TEST(Simulate, EquilibriumIsInvariant) {
  const auto tr = simulate(kParams, kTuned, worst_case_schedule(5, 10.0, kParams.Ts), LeaderProfile{}, short_run(10.0));
  for (int i = 0; i <= kParams.m; ++i) {
    for (std::size_t k = 0; k < tr.samples(); ++k) {
      ASSERT_LE(std::abs(tr.e[i][k]), 1e-12);
      ASSERT_LE(std::abs(tr.v[i][k] - 15.0), 1e-12);
      ASSERT_LE(std::abs(tr.a[i][k]), 1e-12);
    }
  }
}

TEST(Simulate, SampleGridAndShapes) {
  const auto tr = simulate(kParams, kTuned, AttackSchedule{}, LeaderProfile::default_maneuver(), short_run(2.0));
  EXPECT_EQ(tr.samples(), 2u * 20u * 20u + 1u);
  EXPECT_DOUBLE_EQ(tr.t.front(), 0.0);
  EXPECT_NEAR(tr.t.back(), 2.0, 1e-12);
  EXPECT_EQ(tr.q.size(), 11u);
  EXPECT_EQ(tr.events.size(), 40u * 10u);
}

TEST(Simulate, IntegratedErrorMatchesPositions) {
  const auto tr =
      simulate(kParams, kTuned, worst_case_schedule(5, 30.0, kParams.Ts), LeaderProfile::default_maneuver(), SimOptions{});
  EXPECT_LT(spacing_error_mismatch(tr), 1e-6);
}

TEST(Simulate, WorstCaseDeliveryInstants) {
  const auto s = worst_case_schedule(5, 2.0, kParams.Ts);
  const auto t = delivery_times(s, 3, 2.0, kParams.Ts);
  ASSERT_GE(t.size(), 6u);
  for (std::size_t j = 0; j < t.size(); ++j) {
    EXPECT_NEAR(t[j], 0.3 * static_cast<double>(j + 1), 1e-12);
  }
}

TEST(Simulate, DeltaZeroDeliversEverything) {
  const auto ok = worst_case_schedule(0, 1.0, kParams.Ts).delivery(1, 20);
  for (long k = 1; k <= 20; ++k) {
    EXPECT_TRUE(ok[static_cast<std::size_t>(k)]);
  }
}

TEST(Simulate, DeltaOneAlternates) {
  const auto ok = worst_case_schedule(1, 1.0, kParams.Ts).delivery(2, 20);
  for (long k = 1; k <= 20; ++k) {
    EXPECT_EQ(ok[static_cast<std::size_t>(k)], k % 2 == 0) << k;
  }
}

TEST(Simulate, RandomScheduleRespectsDelta) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AttackSchedule s;
    s.kind = AttackKind::Random;
    s.Delta = 3;
    s.seed = seed;
    s.drop_probability = 0.9;
    EXPECT_NO_THROW(s.validate(10, 600));
    for (int link = 1; link <= 10; ++link) {
      const auto ok = s.delivery(link, 600);
      int run = 0;
      for (long k = 1; k <= 600; ++k) {
        run = ok[static_cast<std::size_t>(k)] ? 0 : run + 1;
        ASSERT_LE(run, 3);
      }
      EXPECT_EQ(ok, s.delivery(link, 600));
    }
  }
}

TEST(Simulate, ExplicitDropsBeyondDeltaRejected) {
  AttackSchedule s;
  s.Delta = 2;
  s.explicit_drops[1] = {4, 5, 6};
  EXPECT_THROW(s.validate(10, 100), ParameterError);
  s.explicit_drops[1] = {4, 5, 7};
  EXPECT_NO_THROW(s.validate(10, 100));
  s.explicit_drops[11] = {1};
  EXPECT_THROW(s.validate(10, 100), ParameterError);
  AttackSchedule over;
  over.Delta = 2;
  over.explicit_drops[1] = {4, 5, 6};
  EXPECT_THROW(simulate(kParams, kTuned, over, LeaderProfile{}, short_run(1.0)), ParameterError);
}

TEST(Simulate, TimersStayInFlowSet) {
  for (int Delta : {0, 2, 5}) {
    const auto tr = simulate(kParams, kTuned, worst_case_schedule(Delta, 5.0, kParams.Ts),
                             LeaderProfile::default_maneuver(), short_run(5.0));
    const double bound = (Delta + 1) * kParams.Ts * (1.0 + 1e-9);
    for (int i = 1; i <= kParams.m; ++i) {
      for (double s : tr.sigma[i]) {
        ASSERT_GE(s, 0.0);
        ASSERT_LE(s, bound);
      }
    }
  }
}

TEST(Simulate, BitIdenticalRepeats) {
  AttackSchedule s;
  s.kind = AttackKind::Random;
  s.Delta = 4;
  s.seed = 7;
  const auto a = simulate(kParams, kTuned, s, LeaderProfile::default_maneuver(), short_run(8.0));
  const auto b = simulate(kParams, kTuned, s, LeaderProfile::default_maneuver(), short_run(8.0));
  EXPECT_EQ(a.e, b.e);
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.omega, b.omega);
}

TEST(Simulate, ScalingLeaderKeepsRatios) {
  const auto sched = worst_case_schedule(3, 30.0, kParams.Ts);
  const auto a = simulate(kParams, kTuned, sched, LeaderProfile::default_maneuver(), SimOptions{});
  const auto b = simulate(kParams, kTuned, sched, LeaderProfile::default_maneuver().scaled(2.5), SimOptions{});
  for (int i = 1; i <= kParams.m; ++i) {
    EXPECT_NEAR(l2_ratio(a, i), l2_ratio(b, i), 1e-3) << i;
  }
}

TEST(Simulate, Superposition) {
  const auto sched = worst_case_schedule(2, 20.0, kParams.Ts);
  const LeaderProfile la{{{0.0, 0.0}, {1.0, 1.5}, {4.0, 0.0}}};
  const LeaderProfile lb{{{0.0, 0.0}, {2.0, -1.0}, {7.5, 0.0}}};
  const LeaderProfile lab{{{0.0, 0.0}, {1.0, 1.5}, {2.0, 0.5}, {4.0, -1.0}, {7.5, 0.0}}};
  const auto ta = simulate(kParams, kTuned, sched, la, short_run(20.0));
  const auto tb = simulate(kParams, kTuned, sched, lb, short_run(20.0));
  const auto tab = simulate(kParams, kTuned, sched, lab, short_run(20.0));
  double worst = 0.0;
  for (int i = 1; i <= kParams.m; ++i) {
    for (std::size_t k = 0; k < tab.samples(); ++k) {
      worst = std::max(worst, std::abs(tab.e[i][k] - ta.e[i][k] - tb.e[i][k]));
    }
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Simulate, RatioUndefinedWhenUpstreamIsZero) {
  const auto tr = simulate(kParams, kTuned, AttackSchedule{}, LeaderProfile{}, short_run(1.0));
  EXPECT_THROW(l2_ratio(tr, 1), DomainError);
  EXPECT_THROW(l2_ratio(tr, 0), ParameterError);
  const auto m = compute_metrics(tr);
  EXPECT_TRUE(std::isnan(m.l2_ratio[1]));
}

TEST(Simulate, SampledControllerConvergesToContinuous) {
  // The lossless ZOH loop approaches the continuous controller as Ts shrinks.
  const LeaderProfile leader{{{0.0, 0.0}, {1.0, 2.0}, {6.0, 0.0}}};
  const auto cmd = [&](double t) { return leader.command_at(t); };
  const double t_end = 12.0;
  const auto ref = oracle::continuous_errors(3, kParams.h, kParams.tau_d, kTuned.kp, kTuned.kd, t_end, 1.25e-4, 100,
                                             cmd);  // samples every 0.0125 s
  std::vector<double> err;
  for (const double Ts : {0.05, 0.025, 0.0125}) {
    PlatoonParams p{kParams.h, kParams.tau_d, Ts, 3};
    const auto tr = simulate(p, kTuned, AttackSchedule{}, leader, short_run(t_end));
    const auto stride = static_cast<std::size_t>(std::lround(0.0125 / (Ts / 20.0)));
    double w = 0.0;
    for (int i = 1; i <= 3; ++i) {
      for (std::size_t j = 0; j < ref[i].size(); ++j) {
        w = std::max(w, std::abs(tr.e[i][j * stride] - ref[i][j]));
      }
    }
    err.push_back(w);
  }
  EXPECT_GT(err[0] / err[1], 1.8);
  EXPECT_GT(err[1] / err[2], 1.8);
  EXPECT_LT(err[2], 1e-2);
}

TEST(Simulate, RejectsBadInputs) {
  EXPECT_THROW(simulate(kParams, kTuned, AttackSchedule{}, LeaderProfile{}, short_run(-1.0)), ParameterError);
  LeaderProfile bad{{{1.0, 0.0}}};
  EXPECT_THROW(simulate(kParams, kTuned, AttackSchedule{}, bad, short_run(1.0)), ParameterError);
  auto init = equilibrium_state(kParams, SimOptions{});
  init.q.pop_back();
  EXPECT_THROW(simulate(kParams, kTuned, AttackSchedule{}, LeaderProfile{}, short_run(1.0), init), ParameterError);
}

TEST(Simulate, MetricsOnManeuver) {
  const auto tr = simulate(kParams, kTuned, worst_case_schedule(5, 30.0, kParams.Ts),
                           LeaderProfile::default_maneuver(), SimOptions{});
  const auto m = compute_metrics(tr);
  for (int i = 1; i <= kParams.m; ++i) {
    EXPECT_TRUE(std::isfinite(m.l2_ratio[i]));
    EXPECT_GE(m.max_overshoot[i], 0.0);
  }
  EXPECT_EQ(m.max_overshoot[0], 0.0);
}

class LyapunovTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto r = estimate_mansd(kTuned, kParams, TuningConfig{});
    ASSERT_TRUE(r.certificate.has_value());
    cert_ = new StabilityCertificate(*r.certificate);
  }
  static void TearDownTestSuite() {
    delete cert_;
    cert_ = nullptr;
  }

  static SimTrace perturbed(const AttackSchedule& s) {
    auto init = equilibrium_state(kParams, SimOptions{});
    init.q[1] -= 1.0;
    init.v[1] += 0.5;
    return simulate(kParams, kTuned, s, LeaderProfile{}, short_run(20.0), init);
  }

  static StabilityCertificate* cert_;
};

StabilityCertificate* LyapunovTest::cert_ = nullptr;

TEST_F(LyapunovTest, DecreasesWithoutAttack) {
  const auto rep = lyapunov_along_trace(perturbed(AttackSchedule{}), *cert_);
  EXPECT_GT(rep.flow_intervals_checked, 100);
  EXPECT_GT(rep.jumps_checked, 100);
  EXPECT_TRUE(rep.clean()) << rep.flow_violations << " flow, " << rep.jump_violations << " jump";
}

TEST_F(LyapunovTest, DecreasesUnderWorstCaseAttack) {
  const auto rep = lyapunov_along_trace(perturbed(worst_case_schedule(cert_->Delta, 20.0, kParams.Ts)), *cert_);
  EXPECT_TRUE(rep.clean()) << rep.flow_violations << " flow, " << rep.jump_violations << " jump";
}

TEST_F(LyapunovTest, CorruptedCertificateIsCaught) {
  StabilityCertificate bad = *cert_;
  bad.P1(0, 0) = -std::abs(bad.P1(0, 0)) - 1.0;
  const auto rep = lyapunov_along_trace(perturbed(AttackSchedule{}), bad);
  EXPECT_FALSE(rep.clean());
}

TEST_F(LyapunovTest, NeedsQuietUpstream) {
  const auto tr = simulate(kParams, kTuned, AttackSchedule{}, LeaderProfile::default_maneuver(), short_run(3.0));
  EXPECT_THROW(lyapunov_along_trace(tr, *cert_), ParameterError);
}

}  // namespace
}  // namespace platoon
