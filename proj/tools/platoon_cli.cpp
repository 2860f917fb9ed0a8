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

// platoon: gain-locus | mansd | tune | simulate | verify
//
// Exit codes: 0 success, 1 infeasible or unstable result, 2 input error,
// 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "platoon/gain_locus.hpp"
#include "platoon/io/format.hpp"
#include "platoon/io/reports.hpp"
#include "platoon/io/scenario.hpp"
#include "platoon/lmi.hpp"
#include "platoon/sim.hpp"
#include "platoon/tuner.hpp"

namespace {

using namespace platoon;

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kInputError = 2;
constexpr int kNumericalFailure = 3;

struct Options {
  std::string scenario;
  std::optional<double> kp;
  std::optional<double> kd;
  std::string out;
  std::string locus_out;
  int jobs = 0;
  std::optional<long long> seed;
  std::string certificate;
  std::optional<int> Delta;
};

io::Scenario load(const Options& o) {
  io::Scenario sc = o.scenario.empty() ? io::Scenario{} : io::load_scenario(o.scenario);
  if (o.seed) {
    if (*o.seed < 0) {
      throw InputError("--seed must be >= 0");
    }
    sc.attack.seed = static_cast<std::uint64_t>(*o.seed);
  }
  sc.tuning.jobs = o.jobs;
  try {
    sc.validate();
  } catch (const ParameterError& e) {
    throw InputError(e.what());
  }
  return sc;
}

Gains gains_from(const Options& o) {
  if (!o.kp || !o.kd) {
    throw InputError("--kp and --kd are required");
  }
  Gains g{*o.kp, *o.kd};
  try {
    g.validate();
  } catch (const ParameterError& e) {
    throw InputError(e.what());
  }
  return g;
}

int cmd_gain_locus(const Options& o) {
  const auto sc = load(o);
  sc.performance.validate_for(sc.platoon.tau_d);
  const auto cands = enumerate_locus(sc.performance, sc.platoon.tau_d, sc.tuning.n_k1, sc.tuning.n_k2);
  if (cands.empty()) {
    const auto b1 = c1_bounds(sc.performance, sc.platoon.tau_d);
    std::cerr << "platoon: gain locus is empty: C1 needs kp_lower <= kp_upper, got [" << b1.kp_lower << ", "
              << b1.kp_upper << "]";
    if (sc.performance.zeta_m < 1.0) {
      const auto b2 = c2_bounds(sc.performance, sc.platoon.tau_d);
      std::cerr << "; C2 needs kp_lower < kp_upper, got (" << b2.kp_lower << ", " << b2.kp_upper << "]";
    } else {
      std::cerr << "; C2 needs zeta_m < 1";
    }
    std::cerr << '\n';
    return kRejected;
  }
  io::emit(o.out, io::locus_csv(cands, sc.platoon.tau_d));
  return kOk;
}

int cmd_mansd(const Options& o) {
  const auto sc = load(o);
  const Gains g = gains_from(o);
  const auto r = estimate_mansd(g, sc.platoon, sc.tuning, true);
  std::optional<VerificationReport> ver;
  if (r.certificate) {
    ver = verify_certificate(*r.certificate, build_closed_loop(g, sc.platoon), sc.platoon.Ts);
  }
  io::emit(o.out, io::dump_json(io::mansd_json(g, sc.platoon, r, theta_from_epsilon(sc.tuning.epsilon), ver)));
  switch (r.outcome) {
    case MansdOutcome::Certified:
      return ver && ver->passed ? kOk : kNumericalFailure;
    case MansdOutcome::NotCertifiable:
      return kRejected;
    case MansdOutcome::Inconclusive:
      return kNumericalFailure;
  }
  return kNumericalFailure;
}

int cmd_tune(const Options& o) {
  const auto sc = load(o);
  const auto rep = tune(sc.platoon, sc.performance, sc.tuning);
  std::optional<VerificationReport> ver;
  if (rep.certificate) {
    ver = verify_certificate(*rep.certificate, build_closed_loop(rep.best_gains, sc.platoon), sc.platoon.Ts);
  }
  const std::string json = io::dump_json(io::tuning_json(rep, sc.platoon, sc.performance, ver));
  if (!o.locus_out.empty()) {
    io::write_file_atomic(o.locus_out, io::candidates_csv(rep));
  }
  io::emit(o.out, json);
  if (!rep.certificate) {
    return kRejected;
  }
  return ver && ver->passed ? kOk : kNumericalFailure;
}

// run.csv -> run.events.csv, run.metrics.json
std::string sibling(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  if (p.extension() == ".csv") {
    p.replace_extension();
  }
  return p.string() + suffix;
}

int cmd_simulate(const Options& o) {
  const auto sc = load(o);
  const Gains g = gains_from(o);
  if (o.out.empty()) {
    throw InputError("simulate needs --out <trace.csv>");
  }
  const auto tr = simulate(sc.platoon, g, sc.attack, sc.leader, sc.sim, sc.v0);
  bool finite = true;
  for (const auto* col : {&tr.q, &tr.v, &tr.a, &tr.u, &tr.e, &tr.omega}) {
    for (const auto& series : *col) {
      for (double x : series) {
        finite = finite && std::isfinite(x);
      }
    }
  }
  const std::string trace = io::trace_csv(tr);
  const std::string events = io::events_csv(tr);
  const std::string metrics = io::dump_json(io::metrics_json(tr, compute_metrics(tr)));
  io::write_file_atomic(o.out, trace);
  io::write_file_atomic(sibling(o.out, ".events.csv"), events);
  io::write_file_atomic(sibling(o.out, ".metrics.json"), metrics);
  return finite ? kOk : kRejected;
}

int cmd_verify(const Options& o) {
  const auto sc = load(o);
  const Gains g = gains_from(o);
  if (o.certificate.empty()) {
    throw InputError("verify needs --certificate <file>");
  }
  StabilityCertificate cert = io::load_certificate(o.certificate);
  if (o.Delta) {
    if (*o.Delta < 0) {
      throw InputError("--Delta must be >= 0");
    }
    cert.Delta = *o.Delta;
  }
  if (cert.Delta < 0) {
    throw InputError(o.certificate + ": certificate field 'Delta' must be >= 0");
  }
  const auto rep = verify_certificate(cert, build_closed_loop(g, sc.platoon), sc.platoon.Ts);
  io::Json j;
  j["status"] = rep.passed ? "pass" : "fail";
  j["kp"] = g.kp;
  j["kd"] = g.kd;
  j["Delta"] = cert.Delta;
  j["margin"] = kDefaultCertificateMargin;
  j["interior_samples"] = kDefaultInteriorSamples;
  j["verification"] = io::verification_json(rep);
  io::emit(o.out, io::dump_json(j));
  return rep.passed ? kOk : kRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DOS-resilient CACC gain tuning and hybrid platoon simulation"};
  app.require_subcommand(1);
  Options o;

  const auto add_scenario = [&](CLI::App* c) {
    c->add_option("--scenario", o.scenario, "Scenario file (defaults apply when omitted)");
  };
  const auto add_gains = [&](CLI::App* c) {
    c->add_option("--kp", o.kp, "Proportional gain");
    c->add_option("--kd", o.kd, "Derivative gain");
  };
  const auto add_out = [&](CLI::App* c, const char* what) { c->add_option("--out", o.out, what); };

  auto* locus = app.add_subcommand("gain-locus", "Export the (kp, kd) candidate loci as CSV");
  add_scenario(locus);
  add_out(locus, "Output CSV (standard output when omitted)");

  auto* mansd = app.add_subcommand("mansd", "Estimate the MANSD Delta of fixed gains");
  add_scenario(mansd);
  add_gains(mansd);
  add_out(mansd, "Output JSON (standard output when omitted)");

  auto* tune_cmd = app.add_subcommand("tune", "Search the loci for the gains with the largest Delta");
  add_scenario(tune_cmd);
  add_out(tune_cmd, "Output JSON report (standard output when omitted)");
  tune_cmd->add_option("--locus-out", o.locus_out, "Per-candidate CSV");
  tune_cmd->add_option("--jobs", o.jobs, "Worker threads; 0 uses every hardware thread")->check(CLI::NonNegativeNumber);

  auto* sim = app.add_subcommand("simulate", "Simulate the platoon under the scenario's attack schedule");
  add_scenario(sim);
  add_gains(sim);
  add_out(sim, "Trace CSV; events and metrics are written next to it");
  sim->add_option("--seed", o.seed, "Seed for the random attack kind");

  auto* verify = app.add_subcommand("verify", "Re-check a stability certificate");
  add_scenario(verify);
  add_gains(verify);
  add_out(verify, "Output JSON (standard output when omitted)");
  verify->add_option("--certificate", o.certificate, "Certificate JSON or a report embedding one");
  verify->add_option("--Delta", o.Delta, "Check against this Delta instead of the certificate's");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*locus) {
      return cmd_gain_locus(o);
    }
    if (*mansd) {
      return cmd_mansd(o);
    }
    if (*tune_cmd) {
      return cmd_tune(o);
    }
    if (*sim) {
      return cmd_simulate(o);
    }
    return cmd_verify(o);
  } catch (const InputError& e) {
    std::cerr << "platoon: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ParameterError& e) {
    std::cerr << "platoon: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ConditionError& e) {
    std::cerr << "platoon: " << e.what() << '\n';
    return kRejected;
  } catch (const std::exception& e) {
    std::cerr << "platoon: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}
