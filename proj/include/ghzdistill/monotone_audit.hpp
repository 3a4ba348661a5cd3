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

// Empirical audit of the monotone inequality
//
//   P(psi) >= sum_i p_i P(psi_i)
//
// for a local two-outcome POVM {N1, N2} on one party, where P is the
// optimal OSBP probability and P = 0 for outcomes outside the GHZ class.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ghzdistill/decomposition.hpp"
#include "ghzdistill/errors.hpp"
#include "ghzdistill/osbp_solver.hpp"
#include "ghzdistill/tensor_core.hpp"

namespace ghzdistill {

using TwoOutcomePovm = std::array<LocalOp, 2>;

// N1 is a random complex contraction (largest singular value drawn
// uniformly in (0, 1]); N2 = sqrt(1 - N1'N1).
inline TwoOutcomePovm random_povm_pair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LocalOp g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  const double top = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const LocalOp n1 = g * ((1.0 - top) / spectral_norm(g));  // 1 - top lies in (0, 1]
  return {n1, povm_completion(n1)};
}

inline double povm_completeness_error(const TwoOutcomePovm& povm) {
  return max_abs_entry(povm[0].adjoint() * povm[0] + povm[1].adjoint() * povm[1] - LocalOp::Identity());
}

// Optimal OSBP probability of a state, 0 outside the GHZ class.
inline double distillation_probability(const State3Q& state, double tol = kDefaultRankTolerance,
                                       EntanglementClass* label = nullptr) {
  const EntanglementClass cls = classify(state, tol);
  if (label) *label = cls;
  if (cls != EntanglementClass::GHZClass) return 0.0;
  return maximize_objective(decompose(state, tol)).value;
}

struct BranchDetail {
  double probability = 0.0;
  std::optional<EntanglementClass> label;  // empty when the outcome has vanishing norm
  double distillation = 0.0;
};

struct MonotoneReport {
  double p_before = 0.0;
  double weighted_after = 0.0;
  double slack = 0.0;
  std::vector<BranchDetail> branches;

  double probability_sum() const {
    double s = 0.0;
    for (const auto& b : branches) s += b.probability;
    return s;
  }
};

inline MonotoneReport audit_povm(const State3Q& state, const TwoOutcomePovm& povm, Party party,
                                 double tol = kDefaultRankTolerance) {
  if (povm_completeness_error(povm) > 1e-10) {
    throw Error(ErrorCode::PreconditionViolated, "POVM is not complete");
  }
  MonotoneReport report;
  report.p_before = maximize_objective(decompose(state, tol)).value;
  for (const LocalOp& op : povm) {
    const Amplitudes raw = apply_on_party(state.amps(), op, party);
    BranchDetail branch;
    branch.probability = norm_squared(raw);
    if (branch.probability > kNormTolerance * kNormTolerance) {
      EntanglementClass cls{};
      branch.distillation = distillation_probability(normalize(raw), tol, &cls);
      branch.label = cls;
    }
    report.weighted_after += branch.probability * branch.distillation;
    report.branches.push_back(branch);
  }
  report.slack = report.p_before - report.weighted_after;
  return report;
}

// Alice's orthogonalizing map |a_i> -> |i>, applied and renormalized. The
// result has sa = 0 and the same b, c vectors and weight ratio.
inline State3Q to_phi2_form(const State3Q& state, double tol = kDefaultRankTolerance) {
  const ProductDecomposition d = decompose(state, tol);
  const auto [d1, d2] = dual_basis(d.a1, d.a2);
  LocalOp t;
  t.row(0) = d1.adjoint();
  t.row(1) = d2.adjoint();
  return normalize(apply_on_party(state.amps(), t, Party::A));
}

struct FeasibleRange {
  double lo;
  double hi;
};

// x range where every diagonal square of D1 and D2 lies in [0, 1].
inline FeasibleRange diagonal_feasible_range(const ProductDecomposition& d) {
  const double m1sq = d.mu1 * d.mu1;
  const double m2sq = d.mu2 * d.mu2;
  return {std::max(0.0, 1.0 - 2.0 * m2sq), std::min(1.0, 2.0 * m1sq)};
}

namespace detail {

inline double checked_square(double v) {
  constexpr double slack = 1e-12;
  if (v < -slack || v > 1.0 + slack) {
    throw Error(ErrorCode::InfeasibleX, "diagonal square " + std::to_string(v) + " outside [0, 1]");
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace detail

// Balanced diagonal POVM on Alice in her orthonormal {a1, a2} basis: D1 has
// squared diagonal (x / (2 mu1^2), (1 - x) / (2 mu2^2)) and D2 completes it.
inline TwoOutcomePovm diagonal_povm(const ProductDecomposition& d, double x) {
  if (d.sa > 1e-10) throw Error(ErrorCode::PreconditionViolated, "diagonal family needs sa = 0");
  const double d11 = detail::checked_square(x / (2.0 * d.mu1 * d.mu1));
  const double d12 = detail::checked_square((1.0 - x) / (2.0 * d.mu2 * d.mu2));
  LocalOp basis;
  basis.col(0) = d.a1;
  const LocalVec a2 = d.a2 - d.a1 * d.a1.dot(d.a2);
  basis.col(1) = a2 / a2.norm();
  auto diagonal = [&basis](double e1, double e2) {
    return LocalOp(basis * Eigen::Vector2cd(e1, e2).asDiagonal() * basis.adjoint());
  };
  return {diagonal(std::sqrt(d11), std::sqrt(d12)), diagonal(std::sqrt(1.0 - d11), std::sqrt(1.0 - d12))};
}

inline MonotoneReport diagonal_family_audit(const State3Q& state, double x, double tol = kDefaultRankTolerance) {
  const ProductDecomposition d = decompose(state, tol);
  return audit_povm(state, diagonal_povm(d, x), Party::A, tol);
}

struct DiagonalScanPoint {
  double x;
  double slack;
};

// Uniform sweep of the feasible x range with `steps` points.
inline std::vector<DiagonalScanPoint> scan_diagonal_family(const State3Q& state, int steps,
                                                           double tol = kDefaultRankTolerance) {
  if (steps < 3) throw Error(ErrorCode::PreconditionViolated, "diagonal scan needs at least 3 steps");
  const ProductDecomposition d = decompose(state, tol);
  if (d.sa > 1e-10) throw Error(ErrorCode::PreconditionViolated, "diagonal family needs sa = 0");
  const FeasibleRange range = diagonal_feasible_range(d);
  const double p_before = maximize_objective(d).value;
  std::vector<DiagonalScanPoint> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double x = k + 1 == steps ? range.hi : range.lo + (range.hi - range.lo) * k / (steps - 1);
    MonotoneReport r = audit_povm(state, diagonal_povm(d, x), Party::A, tol);
    out.push_back({x, p_before - r.weighted_after});
  }
  return out;
}

}  // namespace ghzdistill
