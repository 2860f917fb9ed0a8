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
 * @file sim.hpp
 * @brief Hybrid simulation of a homogeneous CACC platoon over a lossy link.
 *
 * Vehicle i >= 1 runs u' = (-u + kp e + kd e' + u^_{i-1}) / h, where u^_{i-1}
 * is a zero-order hold refreshed only by delivered packets. Packets leave
 * every vehicle at k Ts, k >= 1. The flow is integrated with fixed-step RK4
 * (Ts / substeps); receptions are applied exactly at the transmission instants.
 *
 * The leader's command u_0 is an exogenous piecewise-constant profile and is
 * also its performance output (omega_0 = u_0).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "platoon/core_model.hpp"
#include "platoon/lmi.hpp"

namespace platoon {

struct LeaderSegment {
  double start = 0.0;    ///< [s]
  double command = 0.0;  ///< [m/s^2]
};

struct LeaderProfile {
  std::vector<LeaderSegment> segments{{0.0, 0.0}};

  void validate() const {
    if (segments.empty() || segments.front().start != 0.0) {
      throw ParameterError("leader profile must start with a segment at t = 0");
    }
    for (std::size_t i = 1; i < segments.size(); ++i) {
      if (!(segments[i].start > segments[i - 1].start)) {
        throw ParameterError("leader segments must be strictly time-ordered");
      }
    }
    for (const auto& s : segments) {
      if (!std::isfinite(s.command)) {
        throw ParameterError("leader command must be finite");
      }
    }
  }

  /// Command in effect at t (right-continuous).
  double command_at(double t) const {
    double c = segments.front().command;
    for (const auto& s : segments) {
      if (s.start <= t) {
        c = s.command;
      } else {
        break;
      }
    }
    return c;
  }

  LeaderProfile scaled(double factor) const {
    LeaderProfile p = *this;
    for (auto& s : p.segments) {
      s.command *= factor;
    }
    return p;
  }

  /// +2 m/s^2 on [1, 6) s, -4 m/s^2 on [16, 18.5) s, zero otherwise.
  static LeaderProfile default_maneuver() {
    return LeaderProfile{{{0.0, 0.0}, {1.0, 2.0}, {6.0, 0.0}, {16.0, -4.0}, {18.5, 0.0}}};
  }
};

enum class AttackKind { None, WorstCase, Random };

inline std::string_view to_string(AttackKind k) {
  switch (k) {
    case AttackKind::None:
      return "none";
    case AttackKind::WorstCase:
      return "worst_case";
    case AttackKind::Random:
      return "random";
  }
  return "unknown";
}

/**
 * Packet-loss pattern per link. Link i carries u_{i-1} to follower i;
 * transmission k >= 1 happens at k Ts. explicit_drops, when given for a link,
 * overrides the kind for that link.
 */
struct AttackSchedule {
  AttackKind kind = AttackKind::None;
  int Delta = 0;
  std::uint64_t seed = 0;
  double drop_probability = 0.5;  ///< random kind only
  std::map<int, std::vector<long>> explicit_drops;

  /// Delivery flags for transmissions 1..n_tx on the given link (index 0 unused).
  std::vector<bool> delivery(int link, long n_tx) const {
    std::vector<bool> ok(static_cast<std::size_t>(n_tx + 1), true);
    if (auto it = explicit_drops.find(link); it != explicit_drops.end()) {
      for (long k : it->second) {
        if (k >= 1 && k <= n_tx) {
          ok[static_cast<std::size_t>(k)] = false;
        }
      }
      return ok;
    }
    switch (kind) {
      case AttackKind::None:
        break;
      case AttackKind::WorstCase:
        for (long k = 1; k <= n_tx; ++k) {
          ok[static_cast<std::size_t>(k)] = (k % (Delta + 1)) == 0;
        }
        break;
      case AttackKind::Random: {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(link) * 0x9E3779B97F4A7C15ULL);
        std::bernoulli_distribution drop(drop_probability);
        int run = 0;
        for (long k = 1; k <= n_tx; ++k) {
          const bool d = run < Delta && drop(rng);
          ok[static_cast<std::size_t>(k)] = !d;
          run = d ? run + 1 : 0;
        }
        break;
      }
    }
    return ok;
  }

  void validate(int m, long n_tx) const {
    if (Delta < 0) {
      throw ParameterError("attack Delta must be >= 0");
    }
    if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
      throw ParameterError("drop_probability must lie in [0, 1]");
    }
    for (const auto& [link, drops] : explicit_drops) {
      if (link < 1 || link > m) {
        std::ostringstream os;
        os << "explicit drops given for nonexistent link " << link;
        throw ParameterError(os.str());
      }
      for (long k : drops) {
        if (k < 1) {
          throw ParameterError("dropped transmission indices start at 1");
        }
      }
    }
    for (int link = 1; link <= m; ++link) {
      const auto ok = delivery(link, n_tx);
      int run = 0;
      for (long k = 1; k <= n_tx; ++k) {
        run = ok[static_cast<std::size_t>(k)] ? 0 : run + 1;
        if (run > Delta) {
          std::ostringstream os;
          os << "schedule drops more than Delta = " << Delta << " consecutive packets on link " << link
             << " (transmission " << k << ")";
          throw ParameterError(os.str());
        }
      }
    }
  }
};

/// Delta drops followed by one delivery, repeated, starting with a drop.
inline AttackSchedule worst_case_schedule(int Delta, double t_end, double Ts) {
  if (Delta < 0) {
    throw ParameterError("Delta must be >= 0");
  }
  if (!(t_end > 0.0) || !(Ts > 0.0)) {
    throw ParameterError("t_end and Ts must be > 0");
  }
  AttackSchedule s;
  s.kind = AttackKind::WorstCase;
  s.Delta = Delta;
  return s;
}

inline long transmission_count(double t_end, double Ts) {
  return static_cast<long>(std::floor(t_end / Ts + 1e-9));
}

/// Instants of delivered packets on a link within (0, t_end].
inline std::vector<double> delivery_times(const AttackSchedule& s, int link, double t_end, double Ts) {
  const long n = transmission_count(t_end, Ts);
  const auto ok = s.delivery(link, n);
  std::vector<double> t;
  for (long k = 1; k <= n; ++k) {
    if (ok[static_cast<std::size_t>(k)]) {
      t.push_back(k * Ts);
    }
  }
  return t;
}

/// Full platoon state; vectors indexed by vehicle 0..m (follower-only
/// entries ignore index 0).
struct PlatoonState {
  std::vector<double> q, v, a;
  std::vector<double> u;      ///< controller state (follower); command (leader)
  std::vector<double> u_hat;  ///< ZOH memory of u_{i-1}
  std::vector<double> sigma;  ///< time since the last delivery on link i

  int followers() const { return static_cast<int>(q.size()) - 1; }
};

struct SimOptions {
  double t_end = 30.0;
  int substeps = 20;
  double r = 2.0;  ///< standstill distance [m]
  double L = 4.5;  ///< vehicle length [m]

  void validate() const {
    if (!(t_end > 0.0)) {
      throw ParameterError("t_end must be > 0");
    }
    if (substeps < 1) {
      throw ParameterError("substeps must be >= 1");
    }
    if (!(r >= 0.0) || !(L >= 0.0)) {
      throw ParameterError("r and L must be >= 0");
    }
  }
};

/// Equilibrium at common speed v0: zero spacing errors, accelerations and
/// controller states.
inline PlatoonState equilibrium_state(const PlatoonParams& params, const SimOptions& opt, double v0 = 15.0) {
  const auto n = static_cast<std::size_t>(params.m + 1);
  PlatoonState s;
  s.q.assign(n, 0.0);
  s.v.assign(n, v0);
  s.a.assign(n, 0.0);
  s.u.assign(n, 0.0);
  s.u_hat.assign(n, 0.0);
  s.sigma.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    s.q[i] = s.q[i - 1] - opt.L - opt.r - params.h * v0;
  }
  return s;
}

struct LinkEvent {
  double t = 0.0;
  int link = 0;
  bool delivered = false;
  std::size_t sample = 0;     ///< trace index of the instant (post-jump sample)
  double u_hat_before = 0.0;  ///< ZOH value just before the instant
  double sigma_before = 0.0;
};

struct SimTrace {
  PlatoonParams params;
  Gains gains;
  double r = 0.0;
  double L = 0.0;
  int schedule_Delta = 0;
  std::vector<double> t;
  // [vehicle][sample]
  std::vector<std::vector<double>> q, v, a, u, e, omega;
  std::vector<std::vector<double>> u_hat, sigma;
  std::vector<LinkEvent> events;

  int followers() const { return params.m; }
  std::size_t samples() const { return t.size(); }
};

namespace detail {

// Per vehicle: q, v, a, u, e.
constexpr int kSimStride = 5;

inline void flow(const Eigen::VectorXd& x, const std::vector<double>& u_hat, double leader_cmd,
                 const PlatoonParams& p, const Gains& g, Eigen::VectorXd& dx) {
  const int n = p.m + 1;
  dx.resize(x.size());
  for (int i = 0; i < n; ++i) {
    const int o = kSimStride * i;
    const double v = x[o + 1];
    const double acc = x[o + 2];
    const double u = i == 0 ? leader_cmd : x[o + 3];
    dx[o + 0] = v;
    dx[o + 1] = acc;
    dx[o + 2] = (u - acc) / p.tau_d;
    if (i == 0) {
      dx[o + 3] = 0.0;
      dx[o + 4] = 0.0;
      continue;
    }
    const int prev = o - kSimStride;
    const double edot = x[prev + 1] - v - p.h * acc;
    dx[o + 4] = edot;
    dx[o + 3] = (-u + g.kp * x[o + 4] + g.kd * edot + u_hat[static_cast<std::size_t>(i)]) / p.h;
  }
}

inline void rk4_step(Eigen::VectorXd& x, double dt, const std::vector<double>& u_hat, double leader_cmd,
                     const PlatoonParams& p, const Gains& g) {
  Eigen::VectorXd k1, k2, k3, k4;
  flow(x, u_hat, leader_cmd, p, g, k1);
  flow(x + 0.5 * dt * k1, u_hat, leader_cmd, p, g, k2);
  flow(x + 0.5 * dt * k2, u_hat, leader_cmd, p, g, k3);
  flow(x + dt * k3, u_hat, leader_cmd, p, g, k4);
  x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/**
 * Simulate on [0, t_end]. The trace holds t = 0 plus one sample per RK4 step;
 * at transmission instants the stored sample is the post-jump state.
 */
inline SimTrace simulate(const PlatoonParams& params, const Gains& gains, const AttackSchedule& schedule,
                         const LeaderProfile& leader, const SimOptions& opt, const PlatoonState& init) {
  params.validate();
  opt.validate();
  leader.validate();
  const long n_tx = transmission_count(opt.t_end, params.Ts);
  schedule.validate(params.m, n_tx);
  const auto n = static_cast<std::size_t>(params.m + 1);
  for (const auto* vec : {&init.q, &init.v, &init.a, &init.u, &init.u_hat, &init.sigma}) {
    if (vec->size() != n) {
      throw ParameterError("initial state size does not match the platoon size");
    }
  }
  const double sigma_max = (schedule.Delta + 1) * params.Ts;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(init.sigma[i] >= 0.0 && init.sigma[i] <= params.Ts)) {
      throw ParameterError("initial timers must lie in [0, Ts]");
    }
  }

  std::vector<std::vector<bool>> delivered(n);
  for (std::size_t i = 1; i < n; ++i) {
    delivered[i] = schedule.delivery(static_cast<int>(i), n_tx);
  }

  Eigen::VectorXd x(detail::kSimStride * static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto o = detail::kSimStride * static_cast<Eigen::Index>(i);
    x[o + 0] = init.q[i];
    x[o + 1] = init.v[i];
    x[o + 2] = init.a[i];
    x[o + 3] = init.u[i];
    x[o + 4] = i == 0 ? 0.0 : init.q[i - 1] - init.q[i] - opt.L - opt.r - params.h * init.v[i];
  }
  std::vector<double> u_hat = init.u_hat;
  std::vector<double> sigma = init.sigma;

  SimTrace tr;
  tr.params = params;
  tr.gains = gains;
  tr.r = opt.r;
  tr.L = opt.L;
  tr.schedule_Delta = schedule.Delta;
  const long n_steps_per_tx = opt.substeps;
  const long total_steps = static_cast<long>(std::ceil(opt.t_end / params.Ts * opt.substeps - 1e-9));
  const double dt = params.Ts / opt.substeps;
  for (auto* col : {&tr.q, &tr.v, &tr.a, &tr.u, &tr.e, &tr.omega, &tr.u_hat, &tr.sigma}) {
    col->assign(n, {});
    for (auto& c : *col) {
      c.reserve(static_cast<std::size_t>(total_steps + 1));
    }
  }
  tr.t.reserve(static_cast<std::size_t>(total_steps + 1));

  const auto record = [&](double t) {
    tr.t.push_back(t);
    const double cmd = leader.command_at(t);
    for (std::size_t i = 0; i < n; ++i) {
      const auto o = detail::kSimStride * static_cast<Eigen::Index>(i);
      const double ui = i == 0 ? cmd : x[o + 3];
      tr.q[i].push_back(x[o + 0]);
      tr.v[i].push_back(x[o + 1]);
      tr.a[i].push_back(x[o + 2]);
      tr.u[i].push_back(ui);
      tr.e[i].push_back(x[o + 4]);
      tr.u_hat[i].push_back(u_hat[i]);
      tr.sigma[i].push_back(sigma[i]);
      if (i == 0) {
        tr.omega[i].push_back(cmd);
      } else {
        const double edot = x[o - detail::kSimStride + 1] - x[o + 1] - params.h * x[o + 2];
        tr.omega[i].push_back(gains.kp * x[o + 4] + gains.kd * edot + u_hat[i]);
      }
    }
  };

  // Leader breakpoints falling strictly inside a step split that step.
  std::vector<double> breaks;
  for (const auto& s : leader.segments) {
    if (s.start > 0.0) {
      breaks.push_back(s.start);
    }
  }

  record(0.0);
  for (long step = 1; step <= total_steps; ++step) {
    const double t0 = (step - 1) * dt;
    const double t1 = std::min(step * dt, opt.t_end);
    double ta = t0;
    for (double b : breaks) {
      if (b > ta + 1e-9 * dt && b < t1 - 1e-9 * dt) {
        detail::rk4_step(x, b - ta, u_hat, leader.command_at(0.5 * (ta + b)), params, gains);
        ta = b;
      }
    }
    detail::rk4_step(x, t1 - ta, u_hat, leader.command_at(0.5 * (ta + t1)), params, gains);
    for (std::size_t i = 1; i < n; ++i) {
      sigma[i] += t1 - t0;
    }

    if (step % n_steps_per_tx == 0) {
      const long k = step / n_steps_per_tx;
      if (k <= n_tx) {
        const double cmd_before = leader.command_at(t1 - 0.5 * dt);
        std::vector<double> sent(n);
        for (std::size_t i = 0; i < n; ++i) {
          sent[i] = i == 0 ? cmd_before : x[detail::kSimStride * static_cast<Eigen::Index>(i) + 3];
        }
        for (std::size_t i = 1; i < n; ++i) {
          const bool ok = delivered[i][static_cast<std::size_t>(k)];
          tr.events.push_back({t1, static_cast<int>(i), ok, tr.t.size(), u_hat[i], sigma[i]});
          if (sigma[i] > sigma_max * (1.0 + 1e-9)) {
            throw Error("timer left the flow set; schedule bound not respected");
          }
          if (ok) {
            u_hat[i] = sent[i - 1];
            sigma[i] = 0.0;
          }
        }
      }
    }
    record(t1);
  }
  return tr;
}

inline SimTrace simulate(const PlatoonParams& params, const Gains& gains, const AttackSchedule& schedule,
                         const LeaderProfile& leader, const SimOptions& opt, double v0 = 15.0) {
  return simulate(params, gains, schedule, leader, opt, equilibrium_state(params, opt, v0));
}

/// Spacing errors recomputed from positions and speeds, [vehicle][sample];
/// the leader row is zero.
inline std::vector<std::vector<double>> spacing_errors(const SimTrace& tr) {
  std::vector<std::vector<double>> e(tr.q.size(), std::vector<double>(tr.samples(), 0.0));
  for (std::size_t i = 1; i < tr.q.size(); ++i) {
    for (std::size_t k = 0; k < tr.samples(); ++k) {
      e[i][k] = (tr.q[i - 1][k] - tr.q[i][k] - tr.L) - (tr.r + tr.params.h * tr.v[i][k]);
    }
  }
  return e;
}

/// Max |position-level error - integrated error| over all followers and samples.
inline double spacing_error_mismatch(const SimTrace& tr) {
  const auto e = spacing_errors(tr);
  double worst = 0.0;
  for (std::size_t i = 1; i < e.size(); ++i) {
    for (std::size_t k = 0; k < tr.samples(); ++k) {
      worst = std::max(worst, std::abs(e[i][k] - tr.e[i][k]));
    }
  }
  return worst;
}

/// Trapezoidal L2 norm of a sampled signal.
inline double l2_norm(const std::vector<double>& t, const std::vector<double>& x) {
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    acc += 0.5 * (t[k] - t[k - 1]) * (x[k] * x[k] + x[k - 1] * x[k - 1]);
  }
  return std::sqrt(acc);
}

/// ||omega_i|| / ||omega_{i-1}|| over the trace horizon.
inline double l2_ratio(const SimTrace& tr, int i) {
  if (i < 1 || i > tr.followers()) {
    throw ParameterError("l2_ratio needs a follower index 1..m");
  }
  const double den = l2_norm(tr.t, tr.omega[static_cast<std::size_t>(i - 1)]);
  if (!(den > 0.0)) {
    throw DomainError("L2 ratio undefined: upstream performance output is identically zero");
  }
  return l2_norm(tr.t, tr.omega[static_cast<std::size_t>(i)]) / den;
}

/// Largest excursion of v_i outside the leader's speed envelope [min v_0, max v_0].
inline double max_overshoot(const SimTrace& tr, int i) {
  const auto& v0 = tr.v[0];
  const auto& vi = tr.v[static_cast<std::size_t>(i)];
  const auto [lo0, hi0] = std::minmax_element(v0.begin(), v0.end());
  const auto [loi, hii] = std::minmax_element(vi.begin(), vi.end());
  return std::max({0.0, *hii - *hi0, *lo0 - *loi});
}

struct SimMetrics {
  std::vector<double> l2_ratio;       ///< index i = link into follower i; NaN when undefined
  std::vector<double> max_overshoot;  ///< per vehicle
  std::vector<double> final_abs_error;
};

inline SimMetrics compute_metrics(const SimTrace& tr) {
  SimMetrics m;
  const auto n = static_cast<std::size_t>(tr.followers() + 1);
  m.l2_ratio.assign(n, std::numeric_limits<double>::quiet_NaN());
  m.max_overshoot.assign(n, 0.0);
  m.final_abs_error.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.max_overshoot[i] = max_overshoot(tr, static_cast<int>(i));
    m.final_abs_error[i] = std::abs(tr.e[i].back());
    if (i >= 1) {
      try {
        m.l2_ratio[i] = l2_ratio(tr, static_cast<int>(i));
      } catch (const DomainError&) {
      }
    }
  }
  return m;
}

struct LyapunovReport {
  int link = 1;
  std::vector<double> V;  ///< per sample (post-jump)
  int flow_violations = 0;
  int jump_violations = 0;
  int jumps_checked = 0;
  int flow_intervals_checked = 0;
  double worst_flow_increase = -std::numeric_limits<double>::infinity();  ///< max (V_end - V_start) / V_start

  bool clean() const { return flow_violations == 0 && jump_violations == 0; }
};

namespace detail {

struct LinkCoordinates {
  Eigen::Vector4d x;  // (e, e', e'', u_{i-1})
  double eta = 0.0;
  double sigma = 0.0;
};

inline LinkCoordinates link_coordinates(const SimTrace& tr, int i, std::size_t k, double u_hat, double sigma) {
  const auto ii = static_cast<std::size_t>(i);
  const double h = tr.params.h;
  const double ai = tr.a[ii][k];
  const double adot = (tr.u[ii][k] - ai) / tr.params.tau_d;
  LinkCoordinates c;
  c.x[0] = tr.e[ii][k];
  c.x[1] = tr.v[ii - 1][k] - tr.v[ii][k] - h * ai;
  c.x[2] = tr.a[ii - 1][k] - ai - h * adot;
  c.x[3] = tr.u[ii - 1][k];
  c.eta = u_hat - tr.u[ii - 1][k];
  c.sigma = sigma;
  return c;
}

inline double lyapunov_value(const LinkCoordinates& c, const StabilityCertificate& cert) {
  return c.x.dot(cert.P1 * c.x) + cert.p2 * c.eta * c.eta * std::exp(-cert.delta * c.sigma);
}

}  // namespace detail

/**
 * Evaluate V = x~' P1 x~ + p2 eta^2 exp(-delta sigma) for link i along a trace
 * whose upstream input omega_{i-1} is identically zero.
 *
 * A flow interval is a violation when V grows by at least flow_tol * |V|
 * (flow_tol = 0 demands strict decrease) while the state is farther than 1e-6
 * from the attractor; a jump is a violation when V grows.
 */
inline LyapunovReport lyapunov_along_trace(const SimTrace& tr, const StabilityCertificate& cert, int link = 1,
                                           double flow_tol = 0.0) {
  if (link < 1 || link > tr.followers()) {
    throw ParameterError("link index must be 1..m");
  }
  const auto up = static_cast<std::size_t>(link - 1);
  for (double w : tr.omega[up]) {
    if (std::abs(w) > 1e-12) {
      throw ParameterError("Lyapunov check needs omega_{i-1} == 0 along the trace");
    }
  }
  const auto li = static_cast<std::size_t>(link);
  LyapunovReport rep;
  rep.link = link;
  rep.V.resize(tr.samples());
  for (std::size_t k = 0; k < tr.samples(); ++k) {
    rep.V[k] = detail::lyapunov_value(detail::link_coordinates(tr, link, k, tr.u_hat[li][k], tr.sigma[li][k]), cert);
  }
  // Pre-jump values at delivered instants.
  std::map<std::size_t, double> pre_jump;
  for (const auto& ev : tr.events) {
    if (ev.link != link || !ev.delivered) {
      continue;
    }
    const double v_pre =
        detail::lyapunov_value(detail::link_coordinates(tr, link, ev.sample, ev.u_hat_before, ev.sigma_before), cert);
    pre_jump[ev.sample] = v_pre;
    ++rep.jumps_checked;
    if (rep.V[ev.sample] > v_pre) {
      ++rep.jump_violations;
    }
  }
  for (std::size_t k = 1; k < tr.samples(); ++k) {
    const auto c = detail::link_coordinates(tr, link, k - 1, tr.u_hat[li][k - 1], tr.sigma[li][k - 1]);
    const double dist = std::sqrt(c.x.squaredNorm() + c.eta * c.eta);
    if (dist <= 1e-6) {
      continue;
    }
    const auto it = pre_jump.find(k);
    const double v_end = it != pre_jump.end() ? it->second : rep.V[k];
    const double v_start = rep.V[k - 1];
    ++rep.flow_intervals_checked;
    const double rel = (v_end - v_start) / std::max(std::abs(v_start), std::numeric_limits<double>::min());
    rep.worst_flow_increase = std::max(rep.worst_flow_increase, rel);
    if (v_end - v_start >= flow_tol * std::abs(v_start)) {
      ++rep.flow_violations;
    }
  }
  return rep;
}

}  // namespace platoon
