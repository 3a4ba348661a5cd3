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

// Monte Carlo execution of a one-successful-branch protocol: Alice, Bob and
// Claire measure their two-outcome POVMs in that order and a trial stops at
// the first failure outcome.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "ghzdistill/errors.hpp"
#include "ghzdistill/osbp_solver.hpp"
#include "ghzdistill/tensor_core.hpp"

namespace ghzdistill {

inline constexpr double kUnderflowProbability = 1e-14;

// Independent generator for one trial, keyed by (seed, trial index), so a
// trial's draws do not depend on which worker runs it or in what order.
inline std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

struct BranchSample {
  int outcome = 0;  // 0 = success operator, 1 = failure operator
  State3Q post_state;
  double probability = 0.0;
  bool underflow = false;  // drawn outcome was negligible and was flipped
};

template <typename Urbg>
BranchSample sample_branch(const State3Q& state, const PovmPair& povm, Party party, Urbg& rng) {
  if (completeness_error(povm) > 1e-10) {
    throw Error(ErrorCode::PreconditionViolated, "POVM pair is not complete");
  }
  const std::array<Amplitudes, 2> raw{apply_on_party(state.amps(), povm.success, party),
                                      apply_on_party(state.amps(), povm.failure, party)};
  const std::array<double, 2> prob{norm_squared(raw[0]), norm_squared(raw[1])};
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  BranchSample out;
  out.outcome = u * (prob[0] + prob[1]) < prob[0] ? 0 : 1;
  if (prob[out.outcome] < kUnderflowProbability) {
    out.outcome = 1 - out.outcome;
    out.underflow = true;
  }
  out.probability = prob[out.outcome];
  out.post_state = normalize(raw[out.outcome]);
  return out;
}

struct SimulationReport {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  double mean_success_fidelity = 0.0;  // 0 when no trial succeeded
  double min_success_fidelity = 0.0;
  std::uint64_t seed = 0;
};

// <psi| A'A (x) B'B (x) C'C |psi> for the success operators.
inline double exact_branch_probability(const State3Q& state, const PovmTriple& povms) {
  return apply_local(state, povms.a.success, povms.b.success, povms.c.success).probability;
}

namespace detail {

// GHZ fidelity of the trial's final state, or a negative value on failure.
inline double run_trial(const State3Q& state, const PovmTriple& povms, std::uint64_t seed, std::uint64_t trial) {
  auto rng = trial_stream(seed, trial);
  State3Q current = state;
  for (Party p : kAllParties) {
    const BranchSample s = sample_branch(current, povms[p], p, rng);
    if (s.outcome != 0) return -1.0;
    current = s.post_state;
  }
  return ghz_fidelity(current);
}

}  // namespace detail

// Runs `trials` independent protocol executions. Results are merged by
// trial index, so the report is bit-identical for any worker count.
inline SimulationReport run_protocol(const State3Q& state, const PovmTriple& povms, std::uint64_t trials,
                                     std::uint64_t seed, unsigned workers = 1) {
  if (trials < 1) throw Error(ErrorCode::PreconditionViolated, "need at least one trial");
  for (Party p : kAllParties) {
    if (completeness_error(povms[p]) > 1e-10) {
      throw Error(ErrorCode::PreconditionViolated, "POVM pair is not complete");
    }
  }
  std::vector<double> fidelity(trials);
  workers = std::clamp<unsigned>(workers, 1u, 64u);
  if (workers == 1) {
    for (std::uint64_t t = 0; t < trials; ++t) fidelity[t] = detail::run_trial(state, povms, seed, t);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t t = w; t < trials; t += workers) fidelity[t] = detail::run_trial(state, povms, seed, t);
      });
    }
  }

  SimulationReport report;
  report.trials = trials;
  report.seed = seed;
  double sum = 0.0;
  double lowest = 1.0;
  for (double f : fidelity) {
    if (f < 0.0) continue;
    ++report.successes;
    sum += f;
    lowest = std::min(lowest, f);
  }
  report.success_rate = static_cast<double>(report.successes) / static_cast<double>(trials);
  if (report.successes > 0) {
    report.mean_success_fidelity = sum / static_cast<double>(report.successes);
    report.min_success_fidelity = lowest;
  }
  return report;
}

}  // namespace ghzdistill
