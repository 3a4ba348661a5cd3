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

// Optimal one-successful-branch protocol (OSBP): each party performs one
// two-outcome POVM {M, M_bar}, exactly one joint branch yields GHZ, and
// every failure operator has rank one so failure branches are disentangled.
//
// The success operators map the local pair {k1, k2} to {|0>, |1>},
//
//   M_k = k1 |0><k1~| + k2 e^{i phase_k} |1><k2~|,
//
// subject to (1 - k1^2)(1 - k2^2) = s_k^2 per party and the balance
// alpha1 beta1 gamma1 mu1 = alpha2 beta2 gamma2 mu2. The success
// probability is 2 (alpha1 beta1 gamma1 mu1)^2.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ghzdistill/decomposition.hpp"
#include "ghzdistill/errors.hpp"
#include "ghzdistill/scalar_search.hpp"
#include "ghzdistill/tensor_core.hpp"

namespace ghzdistill {

inline constexpr double kSqrtClamp = 1e-12;
inline const double kLogXBound = std::log(1e6);

struct OsbpSolution {
  double p_opt = 0.0;
  double x_star = 1.0;
  double alpha1 = 1.0, alpha2 = 1.0;
  double beta1 = 1.0, beta2 = 1.0;
  double gamma1 = 1.0, gamma2 = 1.0;
  double phase_a = 0.0, phase_b = 0.0, phase_c = 0.0;

  // 2 (alpha1 beta1 gamma1 mu1)^2
  double branch_probability(const ProductDecomposition& d) const {
    const double w = alpha1 * beta1 * gamma1 * d.mu1;
    return 2.0 * w * w;
  }
};

struct PovmPair {
  LocalOp success;
  LocalOp failure;
};

struct PovmTriple {
  PovmPair a;
  PovmPair b;
  PovmPair c;

  const PovmPair& operator[](Party p) const {
    switch (p) {
      case Party::A: return a;
      case Party::B: return b;
      case Party::C: break;
    }
    return c;
  }
};

namespace detail {

// f (1 - sqrt(1 - c / f^2)) = c / (f + sqrt(f^2 - c)). The caller passes
// gap = f^2 - c in a cancellation-free form; near gap = 0 the direct
// difference loses half the significant digits.
inline double reduced_branch_factor(double f, double c, double gap) {
  if (gap < 0.0) {
    if (gap < -kSqrtClamp * f * f) {
      throw Error(ErrorCode::InvariantViolation, "negative square-root argument " + std::to_string(gap));
    }
    gap = 0.0;
  }
  return c / (f + std::sqrt(gap));
}

}  // namespace detail

// Success probability as a function of the single free ratio x > 0 left
// after eliminating the balance and rank-one constraints:
//
//   P(x) = f1 f2 / 2 (1 - sqrt(1 - 4 (1 - sa^2) / f1^2))
//                    (1 - sqrt(1 - 4 mu1^2 mu2^2 (1 - sb^2)(1 - sc^2) / f2^2))
//
// with f1 = (x^2 + 1) / x and f2 = (mu2^2 x^2 + 2 mu1 mu2 sb sc x + mu1^2) / x.
inline double objective(const ProductDecomposition& d, double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::NonPositiveX, "objective needs x > 0, got " + std::to_string(x));
  const double m1 = d.mu1;
  const double m2 = d.mu2;
  const double cross = d.sb * d.sc;
  const double f1 = x + 1.0 / x;
  const double c1 = 4.0 * (1.0 - d.sa * d.sa);
  const double skew1 = x - 1.0 / x;
  const double gap1 = skew1 * skew1 + 4.0 * d.sa * d.sa;  // f1^2 - c1

  // f2 = dev + 2 mu1 mu2 (1 + sb sc) with dev = (mu2 sqrt(x) - mu1 / sqrt(x))^2.
  const double root_x = std::sqrt(x);
  const double dev = (m2 * root_x - m1 / root_x) * (m2 * root_x - m1 / root_x);
  const double f2 = dev + 2.0 * m1 * m2 * (1.0 + cross);
  const double c2 = 4.0 * m1 * m1 * m2 * m2 * (1.0 - d.sb * d.sb) * (1.0 - d.sc * d.sc);
  const double sum_s = d.sb + d.sc;
  const double gap2 = dev * dev + 4.0 * m1 * m2 * (1.0 + cross) * dev + 4.0 * m1 * m1 * m2 * m2 * sum_s * sum_s;
  return 0.5 * detail::reduced_branch_factor(f1, c1, gap1) * detail::reduced_branch_factor(f2, c2, gap2);
}

// Global maximum of objective over log x in [-ln 1e6, ln 1e6].
inline ScalarMaximum maximize_objective(const ProductDecomposition& d) {
  const ScalarMaximum m = maximize_multistart([&d](double y) { return objective(d, std::exp(y)); },
                                              -kLogXBound, kLogXBound);
  return {std::exp(m.argmax), m.value};
}

// Point (k1, k2) on the rank-one curve (1 - k1^2)(1 - k2^2) = s^2 with
// k1 / k2 = e^{log_ratio}. The map is a bijection from the real line onto
// the curve, including both branches k1 = 1 or k2 = 1 of the s = 0 case.
struct CoefficientPair {
  double k1;
  double k2;
};

inline CoefficientPair coefficients_for_ratio(double s, double log_ratio) {
  const double r = std::exp(log_ratio);
  const double big_f = 2.0 * std::cosh(log_ratio);
  const double q = 1.0 - s * s;
  const double sh = std::sinh(log_ratio);
  const double denom = big_f + 2.0 * std::sqrt(sh * sh + s * s);
  const double product = 2.0 * q / denom;  // k1 k2
  return {std::min(1.0, std::sqrt(product * r)), std::min(1.0, std::sqrt(product / r))};
}

struct DirectSolution {
  double alpha1, alpha2, beta1, beta2, gamma1, gamma2;
  double probability;  // 2 (alpha1 beta1 gamma1 mu1)^2
};

namespace detail {

// Two free log-ratios plus the party whose ratio the balance equation
// fixes. Eliminating the party with the largest overlap keeps the kinks of
// the s = 0 curves on coordinate axes, where nested line searches resolve
// them exactly.
struct DirectCoordinates {
  std::array<Party, 2> free;
  Party balanced;
};

inline DirectCoordinates choose_coordinates(const ProductDecomposition& d) {
  Party balanced = Party::A;
  for (Party p : kAllParties)
    if (d.overlap(p) > d.overlap(balanced)) balanced = p;
  DirectCoordinates out{{Party::A, Party::B}, balanced};
  int k = 0;
  for (Party p : kAllParties)
    if (p != balanced) out.free[k++] = p;
  return out;
}

inline DirectSolution direct_point(const ProductDecomposition& d, const DirectCoordinates& coords, double y0,
                                   double y1) {
  std::array<CoefficientPair, 3> k{};
  const auto idx = [](Party p) { return static_cast<unsigned>(p); };
  k[idx(coords.free[0])] = coefficients_for_ratio(d.overlap(coords.free[0]), y0);
  k[idx(coords.free[1])] = coefficients_for_ratio(d.overlap(coords.free[1]), y1);
  // Balance: (alpha1 / alpha2)(beta1 / beta2)(gamma1 / gamma2) = mu2 / mu1.
  const double y_balanced = std::log(d.mu2 / d.mu1) - y0 - y1;
  const CoefficientPair kb = coefficients_for_ratio(d.overlap(coords.balanced), y_balanced);
  if (!(kb.k1 > 0.0 && kb.k2 > 0.0 && kb.k1 <= 1.0 && kb.k2 <= 1.0)) {
    throw Error(ErrorCode::InfeasibleBalance, "no coefficient pair in (0, 1] balances this point");
  }
  k[idx(coords.balanced)] = kb;
  DirectSolution out{k[0].k1, k[0].k2, k[1].k1, k[1].k2, k[2].k1, k[2].k2, 0.0};
  const double w = out.alpha1 * out.beta1 * out.gamma1 * d.mu1;
  out.probability = 2.0 * w * w;
  return out;
}

inline double direct_value(const ProductDecomposition& d, const DirectCoordinates& coords, double y0, double y1) {
  try {
    return direct_point(d, coords, y0, y1).probability;
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace detail

// Maximizes 2 (alpha1 beta1 gamma1 mu1)^2 directly over two parties'
// coefficient ratios, the third party's ratio being fixed by the balance
// equation and every second coefficient by its rank-one constraint. Does
// not use the single-variable objective.
inline DirectSolution solve_coefficients(const ProductDecomposition& d) {
  const detail::DirectCoordinates coords = detail::choose_coordinates(d);
  MultistartOptions opt;
  opt.grid_points = 129;
  opt.min_starts = 2;
  opt.max_starts = 4;

  auto best_inner = [&](double y0) {
    return maximize_multistart([&](double y1) { return detail::direct_value(d, coords, y0, y1); }, -kLogXBound,
                               kLogXBound, opt);
  };
  const ScalarMaximum outer =
      maximize_multistart([&](double y0) { return best_inner(y0).value; }, -kLogXBound, kLogXBound, opt);
  const ScalarMaximum inner = best_inner(outer.argmax);
  return detail::direct_point(d, coords, outer.argmax, inner.argmax);
}

// 1 - sqrt(1 - 4 mu1^2 mu2^2 (1 - sc^2)) for states with sa = sb = 0.
inline double closed_form_phi1(const ProductDecomposition& d) {
  if (d.sa > 1e-10 || d.sb > 1e-10) {
    throw Error(ErrorCode::PreconditionViolated, "closed_form_phi1 needs sa = sb = 0");
  }
  const double m1sq = d.mu1 * d.mu1;
  const double m2sq = d.mu2 * d.mu2;
  const double c = 4.0 * m1sq * m2sq * (1.0 - d.sc * d.sc);
  // 1 - c with 1 = mu1^2 + mu2^2
  const double gap = (m1sq - m2sq) * (m1sq - m2sq) + 4.0 * m1sq * m2sq * d.sc * d.sc;
  return c / (1.0 + std::sqrt(gap));
}

struct Phi2ClosedForm {
  double p;
  double ratio_beta;   // beta1^2 / beta2^2
  double ratio_gamma;  // gamma1^2 / gamma2^2
  bool ratios_by_continuity = false;  // sb = sc = 0, ratios are a 0/0 limit
};

// Closed form for states with sa = 0, where only Bob and Claire act:
//
//   p = F (1 - sqrt(1 - 4 mu1^2 mu2^2 (1 - sb^2)(1 - sc^2) / F^2)),  F = 1 + 2 mu1 mu2 sb sc,
//
//   beta1^2 / beta2^2 = (mu2 / mu1) (mu2 sb + mu1 sc) / (mu1 sb + mu2 sc),
//   gamma1^2 / gamma2^2 = (beta2^2 / beta1^2) (mu2^2 / mu1^2).
//
// The ratios satisfy beta1 gamma1 mu1 = beta2 gamma2 mu2 with alpha1 = alpha2 = 1.
inline Phi2ClosedForm closed_form_phi2(const ProductDecomposition& d) {
  if (d.sa > 1e-10) throw Error(ErrorCode::PreconditionViolated, "closed_form_phi2 needs sa = 0");
  const double m1 = d.mu1;
  const double m2 = d.mu2;
  const double cross = d.sb * d.sc;
  const double f = 1.0 + 2.0 * m1 * m2 * cross;
  const double c = 4.0 * m1 * m1 * m2 * m2 * (1.0 - d.sb * d.sb) * (1.0 - d.sc * d.sc);
  // f^2 - c with 1 = mu1^2 + mu2^2, i.e. f = (mu1 - mu2)^2 + 2 mu1 mu2 (1 + sb sc).
  const double dev = (m1 - m2) * (m1 - m2);
  const double sum_s = d.sb + d.sc;
  const double gap = dev * dev + 4.0 * m1 * m2 * (1.0 + cross) * dev + 4.0 * m1 * m1 * m2 * m2 * sum_s * sum_s;
  Phi2ClosedForm out{detail::reduced_branch_factor(f, c, gap), m2 / m1, m2 / m1};
  if (d.sb <= 1e-10 && d.sc <= 1e-10) {
    out.ratios_by_continuity = true;
    return out;
  }
  out.ratio_beta = (m2 / m1) * (m2 * d.sb + m1 * d.sc) / (m1 * d.sb + m2 * d.sc);
  out.ratio_gamma = (m2 * m2) / (m1 * m1) / out.ratio_beta;
  return out;
}

// Maximal OSBP probability. p_opt and x_star come from the single-variable
// objective; the six coefficients come from the direct solver, and the two
// routes must agree.
inline OsbpSolution optimal_probability(const ProductDecomposition& d) {
  if (!(d.mu1 >= d.mu2 && d.mu2 > 0.0) || std::abs(d.norm_squared() - 1.0) > 1e-10) {
    throw Error(ErrorCode::PreconditionViolated, "invalid product decomposition");
  }
  const ScalarMaximum m = maximize_objective(d);
  const DirectSolution direct = solve_coefficients(d);
  if (std::abs(direct.probability - m.value) > 1e-6) {
    throw Error(ErrorCode::InvariantViolation, "direct solver and objective maximum disagree: " +
                                                   std::to_string(direct.probability) + " vs " +
                                                   std::to_string(m.value));
  }
  OsbpSolution sol;
  sol.p_opt = m.value;
  sol.x_star = m.argmax;
  sol.alpha1 = direct.alpha1;
  sol.alpha2 = direct.alpha2;
  sol.beta1 = direct.beta1;
  sol.beta2 = direct.beta2;
  sol.gamma1 = direct.gamma1;
  sol.gamma2 = direct.gamma2;
  sol.phase_a = d.phi == 0.0 ? 0.0 : 2.0 * std::numbers::pi - d.phi;
  sol.phase_b = 0.0;
  sol.phase_c = 0.0;
  return sol;
}

// Smaller singular value over larger; 0 for the zero operator.
inline double rank_one_defect(const LocalOp& m) {
  Eigen::JacobiSVD<LocalOp> svd(m);
  const Eigen::Vector2d sv = svd.singularValues();
  return sv(0) <= 1e-12 ? 0.0 : sv(1) / sv(0);
}

inline double completeness_error(const PovmPair& pair) {
  return max_abs_entry(pair.success.adjoint() * pair.success + pair.failure.adjoint() * pair.failure -
                       LocalOp::Identity());
}

inline LocalOp success_operator(const LocalVec& v1, const LocalVec& v2, double k1, double k2, double phase) {
  const auto [d1, d2] = dual_basis(v1, v2);
  LocalOp m = LocalOp::Zero();
  m.row(0) = k1 * d1.adjoint();
  m.row(1) = k2 * std::polar(1.0, phase) * d2.adjoint();
  return m;
}

// Explicit local POVMs of the protocol described by sol. Throws
// InvariantViolation when completeness or the rank-one failure condition
// does not hold.
inline PovmTriple build_povms(const ProductDecomposition& d, const OsbpSolution& sol) {
  PovmTriple t;
  t.a.success = success_operator(d.a1, d.a2, sol.alpha1, sol.alpha2, sol.phase_a);
  t.b.success = success_operator(d.b1, d.b2, sol.beta1, sol.beta2, sol.phase_b);
  t.c.success = success_operator(d.c1, d.c2, sol.gamma1, sol.gamma2, sol.phase_c);
  for (Party p : kAllParties) {
    PovmPair* pair = p == Party::A ? &t.a : p == Party::B ? &t.b : &t.c;
    // The zero eigenvalue of 1 - M'M is only resolved to about eps times
    // the squared condition number (1 + s) / (1 - s) of the local pair.
    const double s = d.overlap(p);
    const double floor = std::max(1e-13, 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + s) / (1.0 - s));
    pair->failure = povm_completion(pair->success, floor);
    if (completeness_error(*pair) > 1e-10) {
      throw Error(ErrorCode::InvariantViolation, "POVM pair is not complete");
    }
    if (rank_one_defect(pair->failure) > 1e-8) {
      throw Error(ErrorCode::InvariantViolation, "failure operator is not rank one");
    }
  }
  return t;
}

struct Distillation {
  ProductDecomposition decomposition;
  OsbpSolution solution;
  PovmTriple povms;
};

inline Distillation distill(const State3Q& state, double tol = kDefaultRankTolerance) {
  Distillation out;
  out.decomposition = decompose(state, tol);
  out.solution = optimal_probability(out.decomposition);
  out.povms = build_povms(out.decomposition, out.solution);
  return out;
}

}  // namespace ghzdistill
