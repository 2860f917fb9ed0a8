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
 * @file scenario.hpp
 * @brief Scenario files: sectioned "key = value" text.
 *
 *   [platoon]      h, tau_d, Ts, m
 *   [performance]  lambda_M, zeta_m
 *   [tuning]       n_k1, n_k2, delta_grid, Delta_max, epsilon, tol_feas
 *   [attack]       kind, Delta, seed, drop_probability, drops
 *   [leader]       segments
 *   [sim]          t_end, substeps, v0, r, L
 *
 * delta_grid is "geometric LO HI N", "linear LO HI N" or "list X1 X2 ...".
 * segments is a comma-separated list of START:COMMAND pairs. drops is a
 * comma-separated list of LINK:TRANSMISSION pairs. '#' and ';' start
 * comments. Omitted keys keep their defaults; unknown sections and keys are
 * rejected.
 */
#pragma once

#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/core_model.hpp"
#include "platoon/errors.hpp"
#include "platoon/sim.hpp"
#include "platoon/tuner.hpp"

namespace platoon::io {

struct Scenario {
  PlatoonParams platoon;
  PerformanceSpec performance;
  TuningConfig tuning;
  AttackSchedule attack;
  LeaderProfile leader = LeaderProfile::default_maneuver();
  SimOptions sim;
  double v0 = 15.0;

  /// Checks every section against its module preconditions.
  void validate() const {
    platoon.validate();
    performance.validate();
    tuning.validate();
    leader.validate();
    sim.validate();
    if (!std::isfinite(v0)) {
      throw ParameterError("v0 must be finite");
    }
    attack.validate(platoon.m, transmission_count(sim.t_end, platoon.Ts));
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
      ++i;
    }
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') {
      ++i;
    }
    if (i > b) {
      out.push_back(s.substr(b, i - b));
    }
  }
  return out;
}

class Located {
 public:
  Located(std::string source, int line, std::string section, std::string key)
      : source_(std::move(source)), line_(line), section_(std::move(section)), key_(std::move(key)) {}

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << source_ << ":" << line_ << ": [" << section_ << "] " << key_ << ": " << what;
    throw InputError(os.str());
  }

  double number(std::string_view tok) const {
    double x = 0.0;
    const auto* end = tok.data() + tok.size();
    const auto r = std::from_chars(tok.data(), end, x);
    if (tok.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(x)) {
      fail("expected a finite number, got '" + std::string(tok) + "'");
    }
    return x;
  }

  long long integer(std::string_view tok) const {
    long long x = 0;
    const auto* end = tok.data() + tok.size();
    const auto r = std::from_chars(tok.data(), end, x);
    if (tok.empty() || r.ec != std::errc() || r.ptr != end) {
      fail("expected an integer, got '" + std::string(tok) + "'");
    }
    return x;
  }

  int small_int(std::string_view tok) const {
    const long long x = integer(tok);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      fail("integer out of range: '" + std::string(tok) + "'");
    }
    return static_cast<int>(x);
  }

 private:
  std::string source_;
  int line_;
  std::string section_;
  std::string key_;
};

inline std::vector<double> parse_grid(const Located& at, std::string_view value) {
  const auto w = words(value);
  if (w.empty()) {
    at.fail("empty grid specification");
  }
  try {
    if (w[0] == "geometric" || w[0] == "linear") {
      if (w.size() != 4) {
        at.fail("expected '" + std::string(w[0]) + " LO HI N'");
      }
      const double lo = at.number(w[1]);
      const double hi = at.number(w[2]);
      const int n = at.small_int(w[3]);
      return w[0] == "geometric" ? geometric_grid(lo, hi, n) : linear_grid(lo, hi, n);
    }
    if (w[0] == "list") {
      std::vector<double> g;
      for (std::size_t i = 1; i < w.size(); ++i) {
        g.push_back(at.number(w[i]));
      }
      return g;
    }
  } catch (const ParameterError& e) {
    at.fail(e.what());
  }
  at.fail("grid kind must be geometric, linear or list, got '" + std::string(w[0]) + "'");
}

}  // namespace detail

/// Parse scenario text. source names the input in error messages.
inline Scenario parse_scenario(std::string_view text, const std::string& source = "<scenario>") {
  static const std::map<std::string, std::set<std::string>> kKeys = {
      {"platoon", {"h", "tau_d", "Ts", "m"}},
      {"performance", {"lambda_M", "zeta_m"}},
      {"tuning", {"n_k1", "n_k2", "delta_grid", "Delta_max", "epsilon", "tol_feas"}},
      {"attack", {"kind", "Delta", "seed", "drop_probability", "drops"}},
      {"leader", {"segments"}},
      {"sim", {"t_end", "substeps", "v0", "r", "L"}},
  };

  Scenario sc;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) {
      line = line.substr(0, c);
    }
    line = detail::trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw InputError(source + ":" + std::to_string(line_no) + ": malformed section header");
      }
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (kKeys.find(section) == kKeys.end()) {
        throw InputError(source + ":" + std::to_string(line_no) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (section.empty()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": key '" + key + "' outside any section");
    }
    const detail::Located at(source, line_no, section, key);
    if (kKeys.at(section).count(key) == 0) {
      at.fail("unknown key '" + key + "'");
    }
    if (!seen.insert(section + "." + key).second) {
      at.fail("duplicate key '" + key + "'");
    }

    if (section == "platoon") {
      if (key == "h") {
        sc.platoon.h = at.number(value);
      } else if (key == "tau_d") {
        sc.platoon.tau_d = at.number(value);
      } else if (key == "Ts") {
        sc.platoon.Ts = at.number(value);
      } else {
        sc.platoon.m = at.small_int(value);
      }
    } else if (section == "performance") {
      (key == "lambda_M" ? sc.performance.lambda_M : sc.performance.zeta_m) = at.number(value);
    } else if (section == "tuning") {
      if (key == "n_k1") {
        sc.tuning.n_k1 = at.small_int(value);
      } else if (key == "n_k2") {
        sc.tuning.n_k2 = at.small_int(value);
      } else if (key == "delta_grid") {
        sc.tuning.delta_grid = detail::parse_grid(at, value);
      } else if (key == "Delta_max") {
        sc.tuning.Delta_max = at.small_int(value);
      } else if (key == "epsilon") {
        sc.tuning.epsilon = at.number(value);
      } else {
        sc.tuning.tol_feas = at.number(value);
      }
    } else if (section == "attack") {
      if (key == "kind") {
        if (value == "none") {
          sc.attack.kind = AttackKind::None;
        } else if (value == "worst_case") {
          sc.attack.kind = AttackKind::WorstCase;
        } else if (value == "random") {
          sc.attack.kind = AttackKind::Random;
        } else {
          at.fail("kind must be none, worst_case or random, got '" + std::string(value) + "'");
        }
      } else if (key == "Delta") {
        sc.attack.Delta = at.small_int(value);
      } else if (key == "seed") {
        const long long s = at.integer(value);
        if (s < 0) {
          at.fail("seed must be >= 0");
        }
        sc.attack.seed = static_cast<std::uint64_t>(s);
      } else if (key == "drop_probability") {
        sc.attack.drop_probability = at.number(value);
      } else {
        for (const auto item : detail::split(value, ',')) {
          const auto parts = detail::split(item, ':');
          if (parts.size() != 2) {
            at.fail("expected LINK:TRANSMISSION, got '" + std::string(item) + "'");
          }
          sc.attack.explicit_drops[at.small_int(parts[0])].push_back(static_cast<long>(at.integer(parts[1])));
        }
      }
    } else if (section == "leader") {
      sc.leader.segments.clear();
      for (const auto item : detail::split(value, ',')) {
        const auto parts = detail::split(item, ':');
        if (parts.size() != 2) {
          at.fail("expected START:COMMAND, got '" + std::string(item) + "'");
        }
        sc.leader.segments.push_back({at.number(parts[0]), at.number(parts[1])});
      }
    } else {
      if (key == "t_end") {
        sc.sim.t_end = at.number(value);
      } else if (key == "substeps") {
        sc.sim.substeps = at.small_int(value);
      } else if (key == "v0") {
        sc.v0 = at.number(value);
      } else if (key == "r") {
        sc.sim.r = at.number(value);
      } else {
        sc.sim.L = at.number(value);
      }
    }
  }
  try {
    sc.validate();
  } catch (const ParameterError& e) {
    throw InputError(source + ": " + e.what());
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw InputError("cannot open scenario file '" + path + "'");
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace platoon::io
