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

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "gtest/gtest.h"

using namespace ghzdistill;
using json = nlohmann::json;

namespace {

std::string sample(const std::string& name) { return std::string(GHZDISTILL_SAMPLES_DIR) + "/" + name + ".json"; }

struct Outcome {
  int code;
  std::string out;
  std::string err;

  json result() const { return json::parse(out).at("result"); }
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Temporary state file removed on scope exit.
class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ghzdistill_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".json");
    std::ofstream(path_) << contents;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

std::string state_json(const Amplitudes& amps) {
  json doc;
  doc["amps"] = json::array();
  for (const Complex& z : amps) doc["amps"].push_back({z.real(), z.imag()});
  return doc.dump();
}

}  // namespace

TEST(cli, classify) {
  Outcome ghz = run_cli({"classify", sample("ghz")});
  ASSERT_EQ(ghz.code, 0) << ghz.err;
  ASSERT_EQ(ghz.result()["class"], "GHZClass");
  const json env = json::parse(ghz.out);
  ASSERT_EQ(env["command"], "classify");
  ASSERT_EQ(env["input_label"], "GHZ");
  ASSERT_EQ(env["diagnostics"]["seed"], 0);
  ASSERT_DOUBLE_EQ(env["diagnostics"]["tolerances"]["rank"].get<double>(), 1e-10);
  ASSERT_FALSE(env["diagnostics"].contains("timings_ms"));

  ASSERT_EQ(run_cli({"classify", sample("w")}).result()["class"], "WClass");
  ASSERT_EQ(run_cli({"classify", sample("biseparable_a")}).result()["class"], "Biseparable(A|BC)");
  ASSERT_EQ(run_cli({"classify", sample("product_000")}).result()["class"], "FullyProduct");
  ASSERT_EQ(run_cli({"classify", sample("generic")}).result()["class"], "GHZClass");

  const Outcome timed = run_cli({"--timings", "classify", sample("ghz")});
  ASSERT_TRUE(json::parse(timed.out)["diagnostics"].contains("timings_ms"));
}

TEST(cli, input_errors) {
  TempFile malformed("{\"amps\": [[1, 0], ");
  Outcome r = run_cli({"classify", malformed.path()});
  ASSERT_EQ(r.code, 2);
  ASSERT_TRUE(r.out.empty());
  ASSERT_NE(r.err.find("input error"), std::string::npos);

  TempFile seven("{\"amps\": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}");
  ASSERT_EQ(run_cli({"classify", seven.path()}).code, 2);
  TempFile zero(state_json(Amplitudes{}));
  ASSERT_EQ(run_cli({"classify", zero.path()}).code, 2);
  TempFile not_pair("{\"amps\": [1,0,0,0,0,0,0,0]}");
  ASSERT_EQ(run_cli({"classify", not_pair.path()}).code, 2);

  ASSERT_EQ(run_cli({"classify", "/nonexistent/state.json"}).code, 2);
  ASSERT_EQ(run_cli({}).code, 2);
  ASSERT_EQ(run_cli({"frobnicate", sample("ghz")}).code, 2);
  ASSERT_EQ(run_cli({"simulate", sample("ghz")}).code, 2);
  ASSERT_EQ(run_cli({"simulate", sample("ghz"), "--trials", "0"}).code, 2);
  ASSERT_EQ(run_cli({"audit", sample("ghz")}).code, 2);
  ASSERT_EQ(run_cli({"audit", sample("ghz"), "--povms", "3", "--diagonal-scan", "5"}).code, 2);
  ASSERT_EQ(run_cli({"--tol", "-1", "classify", sample("ghz")}).code, 2);
}

TEST(cli, renormalizes_with_warning) {
  Amplitudes raw{};
  raw[0] = 2.0;
  raw[7] = 2.0;
  TempFile f(state_json(raw));
  const Outcome r = run_cli({"classify", f.path()});
  ASSERT_EQ(r.code, 0);
  ASSERT_NE(r.err.find("renormalized"), std::string::npos);
  ASSERT_EQ(json::parse(r.out)["input_label"], nullptr);
}

TEST(cli, distill) {
  const Outcome b = run_cli({"distill", sample("psi_b")});
  ASSERT_EQ(b.code, 0) << b.err;
  const json res = b.result();
  ASSERT_NEAR(res["p_opt"].get<double>(), 0.4, 1e-9);
  ASSERT_NEAR(res["coefficients"]["gamma1"].get<double>(), std::sqrt(0.4), 1e-6);
  ASSERT_NEAR(res["coefficients"]["gamma2"].get<double>(), std::sqrt(0.4), 1e-6);
  ASSERT_NEAR(res["decomposition"]["sc"].get<double>(), 0.6, 1e-10);

  const json ghz = run_cli({"distill", sample("ghz")}).result();
  ASSERT_NEAR(ghz["p_opt"].get<double>(), 1.0, 1e-9);
  for (const char* p : {"A", "B", "C"}) {
    const LocalOp m = cli::local_op_from_json(ghz["povms"][p]["success"]);
    ASSERT_LT(max_abs_entry(m - LocalOp::Identity()), 1e-9);
  }

  const Outcome w = run_cli({"distill", sample("w")});
  ASSERT_EQ(w.code, 4);
  ASSERT_NE(w.err.find("GHZ not distillable from W class"), std::string::npos);
  const Outcome bisep = run_cli({"distill", sample("biseparable_a")});
  ASSERT_EQ(bisep.code, 4);
  ASSERT_NE(bisep.err.find("Biseparable(A|BC)"), std::string::npos);
}

TEST(cli, invariant_failure_exit_code) {
  // GHZ class, but so close to W that the decomposition's normalization
  // cannot be resolved to 1e-10 in double precision.
  Amplitudes raw = State3Q::w().amps();
  raw[7] += 1e-8;
  TempFile f(state_json(raw));
  ASSERT_EQ(run_cli({"classify", f.path()}).result()["class"], "GHZClass");
  const Outcome r = run_cli({"distill", f.path()});
  ASSERT_EQ(r.code, 3);
  ASSERT_NE(r.err.find("numerical error"), std::string::npos);
}

TEST(cli, povm_json_round_trip) {
  for (const char* name : {"psi_b", "generic", "ghz"}) {
    const json res = run_cli({"distill", sample(name)}).result();
    const PovmTriple t = cli::povms_from_json(res["povms"]);
    const cli::StateFile in = cli::read_state_file(sample(name), std::cerr);
    ASSERT_NEAR(exact_branch_probability(in.state, t), res["p_opt"].get<double>(), 1e-8) << name;
    for (Party p : kAllParties) ASSERT_LT(completeness_error(t[p]), 1e-10);
  }
}

TEST(cli, simulate) {
  const Outcome r = run_cli({"--seed", "42", "simulate", sample("psi_b"), "--trials", "100000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json res = r.result();
  const double sigma = res["binomial_sigma"].get<double>();
  ASSERT_NEAR(sigma, std::sqrt(0.24 / 1e5), 1e-9);
  ASSERT_NEAR(res["success_rate"].get<double>(), 0.4, 4 * sigma);
  ASSERT_EQ(res["seed"], 42);
  ASSERT_EQ(run_cli({"--seed", "42", "simulate", sample("psi_b"), "--trials", "100000"}).out, r.out);
  ASSERT_EQ(run_cli({"--seed", "42", "simulate", sample("psi_b"), "--trials", "100000", "--workers", "3"}).out, r.out);

  const json ghz = run_cli({"simulate", sample("ghz"), "--trials", "10"}).result();
  ASSERT_EQ(ghz["success_rate"].get<double>(), 1.0);
  ASSERT_EQ(run_cli({"simulate", sample("w"), "--trials", "10"}).code, 4);
}

TEST(cli, audit) {
  const Outcome r = run_cli({"--seed", "1", "audit", sample("ghz"), "--povms", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json res = r.result();
  ASSERT_GE(res["min_slack"].get<double>(), -1e-7);
  ASSERT_LE(res["max_branch_probability_sum_error"].get<double>(), 1e-10);
  ASSERT_EQ(run_cli({"--seed", "1", "audit", sample("ghz"), "--povms", "100"}).out, r.out);

  const json generic = run_cli({"audit", sample("generic"), "--povms", "20"}).result();
  ASSERT_LE(generic["max_branch_probability_sum_error"].get<double>(), 1e-10);
  ASSERT_GE(generic["min_slack"].get<double>(), -1e-7);

  const json scan = run_cli({"audit", sample("psi_b"), "--diagonal-scan", "101"}).result();
  ASSERT_EQ(scan["table"].size(), 101u);
  ASSERT_NEAR(scan["argmin_x"].get<double>(), 0.5, 0.01);
  ASSERT_NEAR(scan["min_slack"].get<double>(), 0.0, 1e-8);

  const json reduced = run_cli({"audit", sample("generic"), "--diagonal-scan", "51"}).result();
  ASSERT_TRUE(reduced["reduced_to_phi2"].get<bool>());
  const double step = reduced["table"][1][0].get<double>() - reduced["table"][0][0].get<double>();
  ASSERT_LE(std::abs(reduced["argmin_x"].get<double>() - reduced["mu1_squared"].get<double>()), step);
}

TEST(cli, fidelity) {
  const json ghz = run_cli({"fidelity", sample("ghz")}).result();
  ASSERT_NEAR(ghz["fidelity"].get<double>(), 1.0, 1e-10);
  ASSERT_EQ(ghz["angles"]["A"].size(), 3u);
  ASSERT_NEAR(run_cli({"fidelity", sample("product_000")}).result()["fidelity"].get<double>(), 0.5, 1e-6);
  const double w1 = run_cli({"--seed", "1", "fidelity", sample("w")}).result()["fidelity"].get<double>();
  const double w2 = run_cli({"--seed", "2", "fidelity", sample("w")}).result()["fidelity"].get<double>();
  ASSERT_NEAR(w1, w2, 1e-8);
  ASSERT_EQ(run_cli({"fidelity", sample("w"), "--restarts", "0"}).code, 2);
}

TEST(cli, pretty_output_is_same_document) {
  const Outcome compact = run_cli({"distill", sample("generic")});
  const Outcome pretty = run_cli({"--pretty", "distill", sample("generic")});
  ASSERT_NE(compact.out, pretty.out);
  ASSERT_EQ(json::parse(compact.out), json::parse(pretty.out));
  ASSERT_EQ(compact.out.find('\n'), compact.out.size() - 1);
}
