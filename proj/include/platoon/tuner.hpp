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
 * @file tuner.hpp
 * @brief MANSD estimation for fixed gains and the two-stage gain search.
 *
 * estimate_mansd walks Delta = 0, 1, 2, ... and, for each value, line-searches
 * the exponential rate delta over a fixed grid until the two endpoint LMIs are
 * feasible. The first Delta without any feasible delta ends the walk.
 *
 * tune runs estimate_mansd over the C1 grid, then the C2 grid, and keeps the
 * gains with the largest Delta (ties: smallest kd, then smallest kp).
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "platoon/core_model.hpp"
#include "platoon/gain_locus.hpp"
#include "platoon/lmi.hpp"
#include "platoon/platoon_lmi.hpp"
#include "platoon/sdp_feas.hpp"

namespace platoon {

/// n points log-uniformly spaced on [lo, hi].
inline std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 1) {
    throw ParameterError("geometric grid needs 0 < lo < hi and n >= 1");
  }
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = n == 1 ? lo : std::pow(10.0, a + (b - a) * i / (n - 1));
  }
  return g;
}

/// n points uniformly spaced on [lo, hi].
inline std::vector<double> linear_grid(double lo, double hi, int n) {
  if (!(hi > lo) || n < 1) {
    throw ParameterError("linear grid needs lo < hi and n >= 1");
  }
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  }
  return g;
}

struct TuningConfig {
  int n_k1 = 162;
  int n_k2 = 13;
  std::vector<double> delta_grid = geometric_grid(1e-2, 1e2, 241);
  int Delta_max = 50;
  double epsilon = 0.01;
  double tol_feas = 1e-7;
  int jobs = 1;  ///< worker threads for the candidate map; 0 = hardware concurrency

  void validate() const {
    if (n_k1 < 1 || n_k2 < 1) {
      throw ParameterError("n_k1 and n_k2 must be >= 1");
    }
    if (delta_grid.empty()) {
      throw ParameterError("delta_grid must not be empty");
    }
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
      if (!(delta_grid[i] > 0.0)) {
        throw ParameterError("delta_grid entries must be > 0");
      }
      if (i > 0 && !(delta_grid[i] > delta_grid[i - 1])) {
        throw ParameterError("delta_grid must be strictly increasing");
      }
    }
    if (Delta_max < 0) {
      throw ParameterError("Delta_max must be >= 0");
    }
    if (!(epsilon > 0.0)) {
      throw ParameterError("epsilon must be > 0");
    }
    if (!(tol_feas > 0.0)) {
      throw ParameterError("tol_feas must be > 0");
    }
    if (jobs < 0) {
      throw ParameterError("jobs must be >= 0");
    }
  }
};

enum class MansdOutcome {
  Certified,       ///< Delta >= 0 with a verified certificate
  NotCertifiable,  ///< no feasible delta on the grid even at Delta = 0 (Delta = -1)
  Inconclusive,    ///< every solve at Delta = 0 failed numerically
};

inline std::string_view to_string(MansdOutcome o) {
  switch (o) {
    case MansdOutcome::Certified:
      return "certified";
    case MansdOutcome::NotCertifiable:
      return "not_certifiable";
    case MansdOutcome::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

struct MansdResult {
  int Delta = -1;
  MansdOutcome outcome = MansdOutcome::NotCertifiable;
  std::optional<StabilityCertificate> certificate;
  double delta_star = 0.0;  ///< first feasible delta on the grid at the final Delta
  double margin = 0.0;      ///< margin t* of the retained certificate
  std::int64_t solver_calls = 0;
  int numerical_failures = 0;
  std::vector<std::string> anomalies;
};

namespace detail {

struct LineSearchResult {
  bool found = false;
  bool all_numerical_failures = true;
  double first_delta = 0.0;  ///< smallest feasible delta on the grid
  double first_margin = 0.0;
  Eigen::VectorXd first_y;
  double best_delta = 0.0;  ///< delta of the largest-margin solution
  double best_margin = 0.0;
  Eigen::VectorXd best_y;
  std::int64_t calls = 0;
  int numerical_failures = 0;
};

// Ascending scan of the delta grid. With first_only the scan stops at the
// first feasible delta; otherwise it keeps the largest-margin solution too.
//
// known_infeasible[j] marks grid points already proven infeasible at a
// smaller Delta. Those stay infeasible: M((Delta+1) Ts) is a convex
// combination of M(0) and M((Delta+2) Ts), so any certificate for Delta + 1
// also certifies Delta. Points the solver proves infeasible are marked here.
inline LineSearchResult line_search_delta(const ClosedLoopMatrices& clm, double Ts, int Delta,
                                          const TuningConfig& cfg, bool first_only,
                                          std::vector<char>* known_infeasible = nullptr) {
  LineSearchResult out;
  if (known_infeasible != nullptr) {
    known_infeasible->resize(cfg.delta_grid.size(), 0);
  }
  const double theta = theta_from_epsilon(cfg.epsilon);
  sdp::SolverOptions opt;
  opt.tol_feas = cfg.tol_feas;
  opt.initial = sdp::platoon_initial_point();
  opt.stop_when_feasible = first_only;
  for (std::size_t j = 0; j < cfg.delta_grid.size(); ++j) {
    if (known_infeasible != nullptr && (*known_infeasible)[j]) {
      out.all_numerical_failures = false;
      continue;
    }
    const double delta = cfg.delta_grid[j];
    const auto sys = sdp::platoon_system(clm, Ts, Delta, delta, theta);
    const auto r = sdp::solve_feasibility(sys, opt);
    ++out.calls;
    if (r.status == sdp::FeasibilityStatus::NumericalFailure) {
      ++out.numerical_failures;
      continue;
    }
    out.all_numerical_failures = false;
    if (!r.feasible()) {
      if (known_infeasible != nullptr) {
        (*known_infeasible)[j] = 1;
      }
      continue;
    }
    if (!out.found) {
      out.found = true;
      out.first_delta = delta;
      out.first_margin = r.t_star;
      out.first_y = r.y;
    }
    if (out.best_y.size() == 0 || r.t_star > out.best_margin) {
      out.best_delta = delta;
      out.best_margin = r.t_star;
      out.best_y = r.y;
    }
    if (first_only) {
      break;
    }
  }
  return out;
}

}  // namespace detail

/**
 * Largest Delta (up to cfg.Delta_max) certified on the delta grid.
 *
 * With strongest_certificate set, the final Delta is re-scanned over the
 * whole grid with full margin solves and the largest-margin certificate is
 * kept; delta_star still reports the first feasible delta.
 */
inline MansdResult estimate_mansd(const Gains& gains, const PlatoonParams& params, const TuningConfig& cfg,
                                  bool strongest_certificate = true) {
  gains.validate();
  params.validate();
  cfg.validate();
  const ClosedLoopMatrices clm = build_closed_loop(gains, params);
  const double theta = theta_from_epsilon(cfg.epsilon);

  MansdResult res;
  std::optional<detail::LineSearchResult> last;
  std::vector<char> known_infeasible(cfg.delta_grid.size(), 0);
  std::vector<char> infeasible_at_final;  // marks valid for the retained Delta
  for (int trial = 0; trial <= cfg.Delta_max; ++trial) {
    auto ls = detail::line_search_delta(clm, params.Ts, trial, cfg, true, &known_infeasible);
    res.solver_calls += ls.calls;
    res.numerical_failures += ls.numerical_failures;
    if (!ls.found) {
      if (trial == 0) {
        res.outcome = ls.all_numerical_failures ? MansdOutcome::Inconclusive : MansdOutcome::NotCertifiable;
      }
      break;
    }
    res.Delta = trial;
    res.outcome = MansdOutcome::Certified;
    last = std::move(ls);
    infeasible_at_final = known_infeasible;
  }
  if (!last) {
    return res;
  }
  res.delta_star = last->first_delta;
  res.margin = last->first_margin;
  res.certificate = sdp::certificate_from(last->first_y, last->first_delta, theta, res.Delta);

  if (strongest_certificate) {
    const auto full = detail::line_search_delta(clm, params.Ts, res.Delta, cfg, false, &infeasible_at_final);
    res.solver_calls += full.calls;
    res.numerical_failures += full.numerical_failures;
    if (full.found && full.best_margin >= res.margin) {
      res.margin = full.best_margin;
      res.certificate = sdp::certificate_from(full.best_y, full.best_delta, theta, res.Delta);
    }
  }

  // Feasibility must be monotone in Delta: the certificate for Delta also
  // holds for every smaller Delta with the same delta.
  for (int smaller = 0; smaller < res.Delta; ++smaller) {
    StabilityCertificate c = *res.certificate;
    c.Delta = smaller;
    const auto rep = verify_certificate(c, clm, params.Ts, cfg.tol_feas, 0);
    if (!rep.passed) {
      std::ostringstream os;
      os << "certificate for Delta=" << res.Delta << " fails at Delta=" << smaller;
      res.anomalies.push_back(os.str());
    }
  }
  const auto rep = verify_certificate(*res.certificate, clm, params.Ts, cfg.tol_feas, 0);
  if (!rep.passed) {
    res.anomalies.push_back("retained certificate fails endpoint re-verification");
  }
  return res;
}

struct LocusEntry {
  Gains gains;
  Branch branch = Branch::C1;
  int Delta = -1;
  double delta_star = 0.0;
  MansdOutcome outcome = MansdOutcome::NotCertifiable;
};

struct TuningReport {
  Gains best_gains;
  int best_Delta = -1;
  Branch branch = Branch::C1;
  std::optional<StabilityCertificate> certificate;
  double delta_star = 0.0;
  double margin = 0.0;
  std::vector<LocusEntry> locus_table;
  double stage1_seconds = 0.0;
  double stage2_seconds = 0.0;
  double total_seconds = 0.0;
  std::int64_t solver_calls = 0;
  std::vector<std::string> anomalies;
};

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  unsigned workers = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : static_cast<unsigned>(jobs);
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) {
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

// Larger Delta wins; then smaller kd; then smaller kp; then C1 before C2.
inline bool better_candidate(const LocusEntry& a, const LocusEntry& b) {
  if (a.Delta != b.Delta) {
    return a.Delta > b.Delta;
  }
  if (a.gains.kd != b.gains.kd) {
    return a.gains.kd < b.gains.kd;
  }
  if (a.gains.kp != b.gains.kp) {
    return a.gains.kp < b.gains.kp;
  }
  return a.branch == Branch::C1 && b.branch == Branch::C2;
}

}  // namespace detail

inline TuningReport tune(const PlatoonParams& params, const PerformanceSpec& spec, const TuningConfig& cfg) {
  params.validate();
  cfg.validate();
  spec.validate_for(params.tau_d);
  const auto candidates = enumerate_locus(spec, params.tau_d, cfg.n_k1, cfg.n_k2);
  if (candidates.empty()) {
    std::ostringstream os;
    os << "both gain loci are empty for lambda_M = " << spec.lambda_M << ", zeta_m = " << spec.zeta_m
       << ": C1 needs its damping bound on kp above the placement bound, C2 needs zeta_m < 1 and "
          "its damping bound above the placement bound";
    throw ConditionError(os.str());
  }

  TuningReport report;
  report.locus_table.resize(candidates.size());
  std::vector<std::int64_t> calls(candidates.size(), 0);
  std::vector<std::vector<std::string>> anomalies(candidates.size());
  const auto run_stage = [&](Branch branch) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (candidates[i].branch == branch) {
        idx.push_back(i);
      }
    }
    const auto t0 = std::chrono::steady_clock::now();
    detail::parallel_for(idx.size(), cfg.jobs, [&](std::size_t k) {
      const std::size_t i = idx[k];
      const auto r = estimate_mansd(candidates[i].gains, params, cfg, false);
      auto& e = report.locus_table[i];
      e.gains = candidates[i].gains;
      e.branch = candidates[i].branch;
      e.Delta = r.Delta;
      e.delta_star = r.delta_star;
      e.outcome = r.outcome;
      calls[i] = r.solver_calls;
      anomalies[i] = r.anomalies;
    });
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const auto start = std::chrono::steady_clock::now();
  report.stage1_seconds = run_stage(Branch::C1);
  report.stage2_seconds = run_stage(Branch::C2);

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    report.solver_calls += calls[i];
    for (const auto& a : anomalies[i]) {
      std::ostringstream os;
      os << "kp=" << candidates[i].gains.kp << ": " << a;
      report.anomalies.push_back(os.str());
    }
  }

  const LocusEntry* best = nullptr;
  for (const auto& e : report.locus_table) {
    if (e.outcome != MansdOutcome::Certified) {
      continue;
    }
    if (best == nullptr || detail::better_candidate(e, *best)) {
      best = &e;
    }
  }
  if (best != nullptr) {
    report.best_gains = best->gains;
    report.branch = best->branch;
    const auto refined = estimate_mansd(best->gains, params, cfg, true);
    report.solver_calls += refined.solver_calls;
    report.best_Delta = refined.Delta;
    report.certificate = refined.certificate;
    report.delta_star = refined.delta_star;
    report.margin = refined.margin;
    if (refined.Delta != best->Delta) {
      report.anomalies.push_back("re-estimation of the selected gains changed Delta");
    }
  }
  report.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace platoon
