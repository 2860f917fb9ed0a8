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
 * @file reports.hpp
 * @brief JSON and CSV schemas of everything the command-line tool writes.
 */
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "platoon/core_model.hpp"
#include "platoon/gain_locus.hpp"
#include "platoon/io/format.hpp"
#include "platoon/lmi.hpp"
#include "platoon/sim.hpp"
#include "platoon/tuner.hpp"

namespace platoon::io {

inline constexpr const char* kLocusHeader = "branch,kp,kd,dominant_real_part,min_damping";
inline constexpr const char* kCandidateHeader = "branch,kp,kd,Delta,delta_star,outcome";
inline constexpr const char* kEventsHeader = "t,link,delivered";

inline Json certificate_json(const StabilityCertificate& c) {
  Json p1 = Json::array();
  for (int r = 0; r < 4; ++r) {
    for (int col = 0; col < 4; ++col) {
      p1.push_back(c.P1(r, col));
    }
  }
  Json j;
  j["P1"] = p1;
  j["p2"] = c.p2;
  j["delta"] = c.delta;
  j["theta"] = c.theta;
  j["Delta"] = c.Delta;
  return j;
}

inline Json verification_json(const VerificationReport& r) {
  Json j;
  j["passed"] = r.passed;
  j["lambda_max_M0"] = r.lambda_max_M0;
  j["lambda_max_Mend"] = r.lambda_max_Mend;
  j["lambda_min_P1"] = r.lambda_min_P1;
  j["p2"] = r.p2;
  j["worst_interior"] = r.worst_interior;
  j["worst_interior_sigma"] = r.worst_interior_sigma;
  j["failures"] = r.failures;
  return j;
}

inline Json params_json(const PlatoonParams& p) {
  Json j;
  j["h"] = p.h;
  j["tau_d"] = p.tau_d;
  j["Ts"] = p.Ts;
  j["m"] = p.m;
  return j;
}

namespace detail {

inline const Json& field(const Json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name)) {
    throw InputError(where + ": missing field '" + name + "'");
  }
  return j.at(name);
}

inline double number_field(const Json& j, const char* name, const std::string& where) {
  const Json& v = field(j, name, where);
  if (!v.is_number()) {
    throw InputError(where + ": field '" + std::string(name) + "' must be a number");
  }
  return v.get<double>();
}

inline std::string line_col(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace detail

/// Accepts a bare certificate object or any report that embeds one under
/// "certificate".
inline StabilityCertificate parse_certificate(const std::string& text, const std::string& source) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + ":" + detail::line_col(text, e.byte) + ": malformed JSON");
  }
  std::string where = source;
  if (j.is_object() && j.contains("certificate")) {
    j = j.at("certificate");
    where += ": certificate";
    if (j.is_null()) {
      throw InputError(where + " is null (no certificate was found)");
    }
  }
  StabilityCertificate c;
  const Json& p1 = detail::field(j, "P1", where);
  if (!p1.is_array() || p1.size() != 16) {
    throw InputError(where + ": field 'P1' must be an array of 16 numbers (row-major 4x4)");
  }
  for (int k = 0; k < 16; ++k) {
    if (!p1[static_cast<std::size_t>(k)].is_number()) {
      throw InputError(where + ": field 'P1[" + std::to_string(k) + "]' must be a number");
    }
    c.P1(k / 4, k % 4) = p1[static_cast<std::size_t>(k)].get<double>();
  }
  c.p2 = detail::number_field(j, "p2", where);
  c.delta = detail::number_field(j, "delta", where);
  c.theta = detail::number_field(j, "theta", where);
  const Json& d = detail::field(j, "Delta", where);
  if (!d.is_number_integer()) {
    throw InputError(where + ": field 'Delta' must be an integer");
  }
  c.Delta = d.get<int>();
  return c;
}

inline StabilityCertificate load_certificate(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw InputError("cannot open certificate file '" + path + "'");
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_certificate(ss.str(), path);
}

/// Locus rows with the eigenvalue columns recomputed from A_e.
inline std::string locus_csv(const std::vector<LocusCandidate>& cands, double tau_d) {
  std::ostringstream os;
  os << kLocusHeader << '\n';
  for (const auto& c : cands) {
    const auto ev = eigenvalues_3x3(build_error_matrix(c.gains, tau_d));
    os << to_string(c.branch) << ',' << csv_number(c.gains.kp) << ',' << csv_number(c.gains.kd) << ','
       << csv_number(dominant_real_part(ev)) << ',' << csv_number(min_damping(ev)) << '\n';
  }
  return os.str();
}

inline Json mansd_json(const Gains& g, const PlatoonParams& p, const MansdResult& r, double theta,
                       const std::optional<VerificationReport>& ver) {
  Json j;
  j["status"] = std::string(to_string(r.outcome));
  j["kp"] = g.kp;
  j["kd"] = g.kd;
  j["Delta"] = r.Delta;
  j["delta_star"] = r.certificate ? Json(r.delta_star) : Json(nullptr);
  j["theta"] = theta;
  j["margin"] = r.certificate ? Json(r.margin) : Json(nullptr);
  j["certificate"] = r.certificate ? certificate_json(*r.certificate) : Json(nullptr);
  j["verification"] = ver ? verification_json(*ver) : Json(nullptr);
  j["params"] = params_json(p);
  j["solver_calls"] = r.solver_calls;
  j["numerical_failures"] = r.numerical_failures;
  j["anomalies"] = r.anomalies;
  return j;
}

inline std::string candidates_csv(const TuningReport& rep) {
  std::ostringstream os;
  os << kCandidateHeader << '\n';
  for (const auto& e : rep.locus_table) {
    os << to_string(e.branch) << ',' << csv_number(e.gains.kp) << ',' << csv_number(e.gains.kd) << ',' << e.Delta
       << ',' << (e.outcome == MansdOutcome::Certified ? csv_number(e.delta_star) : std::string()) << ','
       << to_string(e.outcome) << '\n';
  }
  return os.str();
}

inline Json tuning_json(const TuningReport& rep, const PlatoonParams& p, const PerformanceSpec& spec,
                        const std::optional<VerificationReport>& ver) {
  Json j;
  j["status"] = rep.certificate ? "certified" : "not_certifiable";
  if (rep.certificate) {
    j["best_gains"] = Json{{"kp", rep.best_gains.kp}, {"kd", rep.best_gains.kd}};
    j["best_Delta"] = rep.best_Delta;
    j["branch"] = std::string(to_string(rep.branch));
    j["delta_star"] = rep.delta_star;
    j["margin"] = rep.margin;
    j["certificate"] = certificate_json(*rep.certificate);
  } else {
    j["best_gains"] = nullptr;
    j["best_Delta"] = -1;
    j["branch"] = nullptr;
    j["delta_star"] = nullptr;
    j["margin"] = nullptr;
    j["certificate"] = nullptr;
  }
  j["verification"] = ver ? verification_json(*ver) : Json(nullptr);
  j["params"] = params_json(p);
  j["performance"] = Json{{"lambda_M", spec.lambda_M}, {"zeta_m", spec.zeta_m}};
  Json table = Json::array();
  for (const auto& e : rep.locus_table) {
    Json row;
    row["branch"] = std::string(to_string(e.branch));
    row["kp"] = e.gains.kp;
    row["kd"] = e.gains.kd;
    row["Delta"] = e.Delta;
    row["delta_star"] = e.outcome == MansdOutcome::Certified ? Json(e.delta_star) : Json(nullptr);
    row["outcome"] = std::string(to_string(e.outcome));
    table.push_back(row);
  }
  j["locus_table"] = table;
  j["timing"] = Json{{"stage1_seconds", rep.stage1_seconds},
                     {"stage2_seconds", rep.stage2_seconds},
                     {"total_seconds", rep.total_seconds}};
  j["solver_calls"] = rep.solver_calls;
  j["anomalies"] = rep.anomalies;
  return j;
}

/// Header "t" then q_i,v_i,a_i,u_i,e_i,omega_i for i = 0..m.
inline std::string trace_csv(const SimTrace& tr) {
  std::ostringstream os;
  os << 't';
  const auto n = tr.q.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (const char* c : {"q", "v", "a", "u", "e", "omega"}) {
      os << ',' << c << '_' << i;
    }
  }
  os << '\n';
  for (std::size_t k = 0; k < tr.samples(); ++k) {
    os << csv_number(tr.t[k]);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto* col : {&tr.q, &tr.v, &tr.a, &tr.u, &tr.e, &tr.omega}) {
        os << ',' << csv_number((*col)[i][k]);
      }
    }
    os << '\n';
  }
  return os.str();
}

inline std::string events_csv(const SimTrace& tr) {
  std::ostringstream os;
  os << kEventsHeader << '\n';
  for (const auto& ev : tr.events) {
    os << csv_number(ev.t) << ',' << ev.link << ',' << (ev.delivered ? 1 : 0) << '\n';
  }
  return os.str();
}

inline Json metrics_json(const SimTrace& tr, const SimMetrics& m) {
  Json j;
  Json links = Json::array();
  for (std::size_t i = 1; i < m.l2_ratio.size(); ++i) {
    links.push_back(Json{{"link", i}, {"l2_ratio", m.l2_ratio[i]}});
  }
  Json vehicles = Json::array();
  for (std::size_t i = 0; i < m.max_overshoot.size(); ++i) {
    vehicles.push_back(
        Json{{"vehicle", i}, {"max_overshoot", m.max_overshoot[i]}, {"final_abs_error", m.final_abs_error[i]}});
  }
  j["kp"] = tr.gains.kp;
  j["kd"] = tr.gains.kd;
  j["params"] = params_json(tr.params);
  j["attack_Delta"] = tr.schedule_Delta;
  j["t_end"] = tr.t.empty() ? 0.0 : tr.t.back();
  j["links"] = links;
  j["vehicles"] = vehicles;
  j["spacing_error_mismatch"] = spacing_error_mismatch(tr);
  return j;
}

}  // namespace platoon::io
