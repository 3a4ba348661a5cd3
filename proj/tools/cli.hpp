// Copyright 2026 The ghzdistill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Reads a state file ({"amps": [[re, im] x 8]}),
// writes one JSON envelope to stdout and diagnostics to stderr.
//
// Exit codes: 0 success, 2 usage or input error, 3 numerical invariant
// failure, 4 state not in the GHZ class.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ghzdistill/ghzdistill.hpp"

namespace ghzdistill::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kUsage = 2, kInvariant = 3, kNotDistillable = 4 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotDistillable : std::runtime_error {
  NotDistillable(EntanglementClass cls, const std::string& what) : std::runtime_error(what), label(cls) {}
  EntanglementClass label;
};

struct StateFile {
  State3Q state;
  std::optional<std::string> label;
};

inline StateFile parse_state_json(const json& doc, std::ostream& err) {
  if (!doc.is_object() || !doc.contains("amps")) throw InputError("state file needs an \"amps\" field");
  const json& amps = doc.at("amps");
  if (!amps.is_array() || amps.size() != 8) throw InputError("\"amps\" must hold exactly 8 entries");
  Amplitudes raw;
  for (std::size_t i = 0; i < 8; ++i) {
    const json& e = amps[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw InputError("amplitude " + std::to_string(i) + " must be [re, im]");
    }
    raw[i] = Complex(e[0].get<double>(), e[1].get<double>());
  }
  StateFile out;
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) throw InputError("\"label\" must be a string");
    out.label = doc["label"].get<std::string>();
  }
  const double norm = std::sqrt(norm_squared(raw));
  try {
    out.state = normalize(raw);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  if (std::abs(norm - 1.0) > 1e-6) {
    err << "warning: state norm is " << norm << ", renormalized\n";
  }
  return out;
}

inline StateFile read_state_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return parse_state_json(doc, err);
}

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const LocalVec& v) { return json::array({to_json(v(0)), to_json(v(1))}); }

inline json to_json(const LocalOp& m) {
  json rows = json::array();
  for (int i = 0; i < 2; ++i) rows.push_back(json::array({to_json(m(i, 0)), to_json(m(i, 1))}));
  return rows;
}

inline LocalOp local_op_from_json(const json& rows) {
  LocalOp m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = Complex(rows.at(i).at(j).at(0).get<double>(), rows.at(i).at(j).at(1).get<double>());
  return m;
}

inline json to_json(const ProductDecomposition& d) {
  return {{"mu1", d.mu1}, {"mu2", d.mu2}, {"phi", d.phi}, {"sa", d.sa}, {"sb", d.sb}, {"sc", d.sc},
          {"a1", to_json(d.a1)}, {"a2", to_json(d.a2)}, {"b1", to_json(d.b1)}, {"b2", to_json(d.b2)},
          {"c1", to_json(d.c1)}, {"c2", to_json(d.c2)}};
}

inline json to_json(const PovmTriple& t) {
  json out;
  for (Party p : kAllParties) {
    out[std::string(to_string(p))] = {{"success", to_json(t[p].success)}, {"failure", to_json(t[p].failure)}};
  }
  return out;
}

// Inverse of to_json(PovmTriple); used to check that emitted operators
// reproduce the branch probability.
inline PovmTriple povms_from_json(const json& j) {
  auto pair = [&j](const char* name) {
    return PovmPair{local_op_from_json(j.at(name).at("success")), local_op_from_json(j.at(name).at("failure"))};
  };
  return {pair("A"), pair("B"), pair("C")};
}

struct Options {
  double tol = kDefaultRankTolerance;
  std::uint64_t seed = 0;
  bool pretty = false;
  bool timings = false;
  std::string state_path;
  std::uint64_t trials = 0;
  unsigned workers = 1;
  int povms = 0;
  int diagonal_steps = 0;
  int restarts = kDefaultRestarts;
};

namespace detail {

inline Distillation require_distillable(const State3Q& state, double tol) {
  const EntanglementClass cls = classify(state, tol);
  if (cls != EntanglementClass::GHZClass) {
    const std::string what = cls == EntanglementClass::WClass ? "W class" : std::string(to_string(cls));
    throw NotDistillable(cls, "GHZ not distillable from " + what);
  }
  return distill(state, tol);
}

inline json cmd_classify(const StateFile& in, const Options& opt) {
  const Classification c = classify_detailed(in.state, opt.tol);
  const auto& r = c.evidence.single_party_ranks;
  return {{"class", to_string(c.label)},
          {"evidence",
           {{"single_party_ranks", {{"A", r[0]}, {"B", r[1]}, {"C", r[2]}}},
            {"product_vectors_in_range_bc", c.evidence.product_vectors},
            {"root_separation", c.evidence.root_separation}}}};
}

inline json cmd_distill(const StateFile& in, const Options& opt) {
  const Distillation dist = require_distillable(in.state, opt.tol);
  const OsbpSolution& s = dist.solution;
  return {{"class", "GHZClass"},
          {"decomposition", to_json(dist.decomposition)},
          {"p_opt", s.p_opt},
          {"x_star", s.x_star},
          {"coefficients",
           {{"alpha1", s.alpha1}, {"alpha2", s.alpha2}, {"beta1", s.beta1}, {"beta2", s.beta2},
            {"gamma1", s.gamma1}, {"gamma2", s.gamma2}}},
          {"phases", {{"A", s.phase_a}, {"B", s.phase_b}, {"C", s.phase_c}}},
          {"povms", to_json(dist.povms)},
          {"exact_branch_probability", exact_branch_probability(in.state, dist.povms)}};
}

inline json cmd_simulate(const StateFile& in, const Options& opt) {
  const Distillation dist = require_distillable(in.state, opt.tol);
  const SimulationReport r = run_protocol(in.state, dist.povms, opt.trials, opt.seed, opt.workers);
  const double p = dist.solution.p_opt;
  return {{"p_opt", p},
          {"trials", r.trials},
          {"successes", r.successes},
          {"success_rate", r.success_rate},
          {"binomial_sigma", std::sqrt(p * (1.0 - p) / static_cast<double>(r.trials))},
          {"mean_success_fidelity", r.mean_success_fidelity},
          {"min_success_fidelity", r.min_success_fidelity},
          {"seed", r.seed}};
}

inline json cmd_audit(const StateFile& in, const Options& opt) {
  require_distillable(in.state, opt.tol);
  if (opt.diagonal_steps > 0) {
    const ProductDecomposition d0 = decompose(in.state, opt.tol);
    const bool reduce = d0.sa > 1e-10;
    const State3Q phi2 = reduce ? to_phi2_form(in.state, opt.tol) : in.state;
    const ProductDecomposition d = reduce ? decompose(phi2, opt.tol) : d0;
    const auto scan = scan_diagonal_family(phi2, opt.diagonal_steps, opt.tol);
    json table = json::array();
    DiagonalScanPoint lowest = scan.front();
    for (const auto& pt : scan) {
      table.push_back(json::array({pt.x, pt.slack}));
      if (pt.slack < lowest.slack) lowest = pt;
    }
    return {{"mode", "diagonal-scan"},
            {"reduced_to_phi2", reduce},
            {"mu1_squared", d.mu1 * d.mu1},
            {"argmin_x", lowest.x},
            {"min_slack", lowest.slack},
            {"table", table}};
  }

  std::mt19937_64 seeds(opt.seed);
  json per_party;
  double overall_min = std::numeric_limits<double>::infinity();
  double worst_sum_error = 0.0;
  for (Party p : kAllParties) {
    double lo = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (int k = 0; k < opt.povms; ++k) {
      const MonotoneReport r = audit_povm(in.state, random_povm_pair(seeds()), p, opt.tol);
      lo = std::min(lo, r.slack);
      total += r.slack;
      worst_sum_error = std::max(worst_sum_error, std::abs(r.probability_sum() - 1.0));
    }
    overall_min = std::min(overall_min, lo);
    per_party[std::string(to_string(p))] = {{"min_slack", lo}, {"mean_slack", total / opt.povms}};
  }
  return {{"mode", "random-povms"},
          {"povms_per_party", opt.povms},
          {"p_before", maximize_objective(decompose(in.state, opt.tol)).value},
          {"min_slack", overall_min},
          {"per_party", per_party},
          {"max_branch_probability_sum_error", worst_sum_error}};
}

inline json cmd_fidelity(const StateFile& in, const Options& opt) {
  const FidelityResult r = optimal_lu_fidelity(in.state, opt.restarts, opt.seed);
  json angles;
  for (Party p : kAllParties) {
    const std::size_t k = 3 * static_cast<std::size_t>(p);
    angles[std::string(to_string(p))] = {r.triple.angles[k], r.triple.angles[k + 1], r.triple.angles[k + 2]};
  }
  return {{"fidelity", r.fidelity}, {"input_ghz_fidelity", ghz_fidelity(in.state)}, {"angles", angles}};
}

}  // namespace detail

// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Optimal GHZ distillation from a single copy of a three-qubit pure state", "ghzdistill"};
  app.require_subcommand(1);
  app.add_option("--tol", opt.tol, "relative rank tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "seed for every stochastic path");
  auto* json_flag = app.add_flag("--json", "compact JSON output (default)");
  app.add_flag("--pretty", opt.pretty, "indented JSON output")->excludes(json_flag);
  app.add_flag("--timings", opt.timings, "add wall-clock timings to the diagnostics");

  auto add_command = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("state_file", opt.state_path, "JSON state file")->required();
    return sub;
  };
  CLI::App* classify_cmd = add_command("classify", "entanglement class of the state");
  CLI::App* distill_cmd = add_command("distill", "optimal one-successful-branch protocol");
  CLI::App* simulate_cmd = add_command("simulate", "Monte Carlo run of the optimal protocol");
  simulate_cmd->add_option("--trials", opt.trials, "number of trials")->required()->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
  CLI::App* audit_cmd = add_command("audit", "monotonicity audit under local POVMs");
  auto* povms_opt = audit_cmd->add_option("--povms", opt.povms, "random POVMs per party")->check(CLI::PositiveNumber);
  auto* scan_opt = audit_cmd->add_option("--diagonal-scan", opt.diagonal_steps, "steps of the diagonal family scan")
                       ->check(CLI::Range(3, 1000000));
  povms_opt->excludes(scan_opt);
  CLI::App* fidelity_cmd = add_command("fidelity", "best local-unitary GHZ fidelity");
  fidelity_cmd->add_option("--restarts", opt.restarts, "random restarts")->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"ghzdistill"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  if (audit_cmd->parsed() && povms_opt->count() == 0 && scan_opt->count() == 0) {
    err << "usage error: audit needs --povms K or --diagonal-scan STEPS\n";
    return kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  std::string command;
  json result;
  std::optional<std::string> label;
  try {
    const StateFile in = read_state_file(opt.state_path, err);
    label = in.label;
    if (classify_cmd->parsed()) {
      command = "classify";
      result = detail::cmd_classify(in, opt);
    } else if (distill_cmd->parsed()) {
      command = "distill";
      result = detail::cmd_distill(in, opt);
    } else if (simulate_cmd->parsed()) {
      command = "simulate";
      result = detail::cmd_simulate(in, opt);
    } else if (audit_cmd->parsed()) {
      command = "audit";
      result = detail::cmd_audit(in, opt);
    } else {
      command = "fidelity";
      result = detail::cmd_fidelity(in, opt);
    }
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const NotDistillable& e) {
    err << "error: " << e.what() << "\n";
    return kNotDistillable;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kInvariant;
  }
  const double elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  json diagnostics = {{"tolerances", {{"rank", opt.tol}, {"double_root", kDoubleRootThreshold}}},
                      {"seed", opt.seed}};
  if (opt.timings) diagnostics["timings_ms"] = {{"total", elapsed}};
  const json envelope = {{"command", command},
                         {"input_label", label ? json(*label) : json(nullptr)},
                         {"result", result},
                         {"diagnostics", diagnostics}};
  out << envelope.dump(opt.pretty ? 2 : -1) << "\n";
  return kOk;
}

}  // namespace ghzdistill::cli
