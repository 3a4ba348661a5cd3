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

// Entanglement classes of three-qubit pure states and the two-term product
// decomposition
//
//   |psi> = mu1 |a1 b1 c1> + mu2 e^{i phi} |a2 b2 c2>,   mu1 >= mu2 > 0,
//
// which exists (and is unique) exactly for GHZ-class states. The product
// vectors |b_i c_i> are the two rank-one points of the range of rho_BC.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "ghzdistill/errors.hpp"
#include "ghzdistill/tensor_core.hpp"

namespace ghzdistill {

enum class EntanglementClass {
  FullyProduct,
  BiseparableA_BC,
  BiseparableB_AC,
  BiseparableC_AB,
  WClass,
  GHZClass,
};

inline std::string_view to_string(EntanglementClass c) {
  switch (c) {
    case EntanglementClass::FullyProduct: return "FullyProduct";
    case EntanglementClass::BiseparableA_BC: return "Biseparable(A|BC)";
    case EntanglementClass::BiseparableB_AC: return "Biseparable(B|AC)";
    case EntanglementClass::BiseparableC_AB: return "Biseparable(C|AB)";
    case EntanglementClass::WClass: return "WClass";
    case EntanglementClass::GHZClass: return "GHZClass";
  }
  return "Unknown";
}

// Roots of the range quadratic closer than this (chordal distance on the
// projective line) are treated as a double root, i.e. the W class.
inline constexpr double kDoubleRootThreshold = 1e-8;
inline constexpr double kZeroOverlap = 1e-12;

// det(s R0 + t R1) = a s^2 + b s t + c t^2 where R0, R1 are the 2x2
// reshapings (row b, column c) of an orthonormal basis of range(rho_BC).
struct RangeQuadratic {
  LocalOp r0;
  LocalOp r1;
  Complex a;
  Complex b;
  Complex c;
};

inline RangeQuadratic range_quadratic(const State3Q& state) {
  const DensityMatrix rho_bc = reduced_density(state, {Party::B, Party::C});
  Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(rho_bc);
  // Eigenvalues ascend; the last two columns span the range.
  const auto& vecs = solver.eigenvectors();
  RangeQuadratic q;
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c) {
      q.r0(b, c) = vecs(2 * b + c, 3);
      q.r1(b, c) = vecs(2 * b + c, 2);
    }
  const LocalOp& r0 = q.r0;
  const LocalOp& r1 = q.r1;
  q.a = r0.determinant();
  q.c = r1.determinant();
  q.b = r0(0, 0) * r1(1, 1) + r0(1, 1) * r1(0, 0) - r0(0, 1) * r1(1, 0) - r0(1, 0) * r1(0, 1);
  return q;
}

struct ProjectiveRoots {
  std::array<Eigen::Vector2cd, 2> roots;  // unit representatives (s, t)
  double separation;                      // |s1 t2 - s2 t1|
};

// Roots of a s^2 + b s t + c t^2 on the projective line. Solves in the
// affine chart with the larger leading coefficient so the root at infinity
// needs no special case.
inline ProjectiveRoots solve_homogeneous_quadratic(Complex a, Complex b, Complex c) {
  ProjectiveRoots out;
  auto unit = [](Complex s, Complex t) {
    Eigen::Vector2cd v(s, t);
    return Eigen::Vector2cd(v / v.norm());
  };
  if (std::abs(a) == 0.0 && std::abs(c) == 0.0) {
    out.roots = {unit(1.0, 0.0), unit(0.0, 1.0)};
  } else {
    const bool affine_s = std::abs(a) >= std::abs(c);
    // lead z^2 + mid z + tail = 0 with z = s/t or z = t/s.
    const Complex lead = affine_s ? a : c;
    const Complex tail = affine_s ? c : a;
    const Complex disc = std::sqrt(b * b - 4.0 * lead * tail);
    const Complex q1 = b + disc;
    const Complex q2 = b - disc;
    const Complex q = -0.5 * (std::abs(q1) >= std::abs(q2) ? q1 : q2);
    Complex z1;
    Complex z2;
    if (std::abs(q) == 0.0) {
      z1 = z2 = 0.0;
    } else {
      z1 = q / lead;
      z2 = tail / q;
    }
    if (affine_s) {
      out.roots = {unit(z1, 1.0), unit(z2, 1.0)};
    } else {
      out.roots = {unit(1.0, z1), unit(1.0, z2)};
    }
  }
  const auto& r = out.roots;
  out.separation = std::abs(r[0](0) * r[1](1) - r[1](0) * r[0](1));
  return out;
}

struct ClassificationEvidence {
  std::array<int, 3> single_party_ranks{};
  int product_vectors = 0;  // in range(rho_BC); 0 when the rank test decides
  double root_separation = 0.0;
};

struct Classification {
  EntanglementClass label;
  ClassificationEvidence evidence;
};

namespace detail {

inline std::array<int, 3> single_party_ranks(const State3Q& state, double tol) {
  std::array<int, 3> ranks{};
  for (Party p : kAllParties)
    ranks[static_cast<unsigned>(p)] = numeric_rank(reduced_density(state, {p}), tol);
  return ranks;
}

inline std::pair<bool, EntanglementClass> rank_verdict(const std::array<int, 3>& ranks) {
  const int pure = static_cast<int>(std::count(ranks.begin(), ranks.end(), 1));
  if (pure >= 2) return {true, EntanglementClass::FullyProduct};
  if (ranks[0] == 1) return {true, EntanglementClass::BiseparableA_BC};
  if (ranks[1] == 1) return {true, EntanglementClass::BiseparableB_AC};
  if (ranks[2] == 1) return {true, EntanglementClass::BiseparableC_AB};
  return {false, EntanglementClass::GHZClass};
}

}  // namespace detail

inline Classification classify_detailed(const State3Q& state, double tol = kDefaultRankTolerance) {
  if (!(tol > 0.0)) throw Error(ErrorCode::PreconditionViolated, "tolerance must be positive");
  Classification out{EntanglementClass::GHZClass, {}};
  out.evidence.single_party_ranks = detail::single_party_ranks(state, tol);
  if (auto [decided, label] = detail::rank_verdict(out.evidence.single_party_ranks); decided) {
    out.label = label;
    return out;
  }

  const RangeQuadratic q = range_quadratic(state);
  const double scale = std::max({std::abs(q.a), std::abs(q.b), std::abs(q.c)});
  if (scale <= 1e-12) {
    // A vanishing form means range(rho_BC) is all product vectors, which
    // only happens for a biseparable state the rank test let through.
    const double tighter = std::sqrt(tol);
    out.evidence.single_party_ranks = detail::single_party_ranks(state, tighter);
    if (auto [decided, label] = detail::rank_verdict(out.evidence.single_party_ranks); decided) {
      out.label = label;
      return out;
    }
    throw Error(ErrorCode::DegenerateQuadratic,
                "range quadratic vanishes identically although all single-party ranks are 2");
  }
  const ProjectiveRoots roots = solve_homogeneous_quadratic(q.a, q.b, q.c);
  out.evidence.root_separation = roots.separation;
  if (roots.separation < kDoubleRootThreshold) {
    out.evidence.product_vectors = 1;
    out.label = EntanglementClass::WClass;
  } else {
    out.evidence.product_vectors = 2;
    out.label = EntanglementClass::GHZClass;
  }
  return out;
}

inline EntanglementClass classify(const State3Q& state, double tol = kDefaultRankTolerance) {
  return classify_detailed(state, tol).label;
}

struct ProductDecomposition {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double phi = 0.0;  // in [0, 2 pi)
  LocalVec a1, a2, b1, b2, c1, c2;
  double sa = 0.0;  // <a1|a2>
  double sb = 0.0;
  double sc = 0.0;

  double overlap(Party p) const {
    switch (p) {
      case Party::A: return sa;
      case Party::B: return sb;
      case Party::C: return sc;
    }
    return 0.0;
  }
  std::pair<const LocalVec&, const LocalVec&> vectors(Party p) const {
    switch (p) {
      case Party::A: return {a1, a2};
      case Party::B: return {b1, b2};
      case Party::C: break;
    }
    return {c1, c2};
  }

  // mu1^2 + mu2^2 + 2 mu1 mu2 cos(phi) sa sb sc
  double norm_squared() const {
    return mu1 * mu1 + mu2 * mu2 + 2.0 * mu1 * mu2 * std::cos(phi) * sa * sb * sc;
  }
};

inline Amplitudes reconstruct_raw(const ProductDecomposition& d) {
  const Amplitudes t1 = product_amplitudes(d.a1, d.b1, d.c1);
  const Amplitudes t2 = product_amplitudes(d.a2, d.b2, d.c2);
  const Complex w2 = std::polar(d.mu2, d.phi);
  Amplitudes out;
  for (std::size_t i = 0; i < 8; ++i) out[i] = d.mu1 * t1[i] + w2 * t2[i];
  return out;
}

inline State3Q reconstruct(const ProductDecomposition& d) { return normalize(reconstruct_raw(d)); }

// Biorthonormal partner {v1~, v2~} with <vi~|vj> = delta_ij.
inline std::pair<LocalVec, LocalVec> dual_basis(const LocalVec& v1, const LocalVec& v2) {
  const double n1 = v1.norm();
  const double n2 = v2.norm();
  if (n1 == 0.0 || n2 == 0.0 || std::abs(v1.dot(v2)) / (n1 * n2) >= 1.0 - 1e-10) {
    throw Error(ErrorCode::ParallelVectors, "dual_basis needs linearly independent vectors");
  }
  LocalOp v;
  v.col(0) = v1;
  v.col(1) = v2;
  const LocalOp dual = v.inverse().adjoint();
  return {dual.col(0), dual.col(1)};
}

namespace detail {

inline int first_nonzero(const LocalVec& v) { return std::abs(v(0)) > kZeroOverlap ? 0 : 1; }

// Multiplies v by a phase so its first nonzero component is real positive;
// returns the phase factor removed from v.
inline Complex fix_leading_phase(LocalVec& v) {
  const Complex lead = v(first_nonzero(v));
  const Complex ph = lead / std::abs(lead);
  v /= ph;
  return ph;
}

inline bool lexicographically_greater(const LocalVec& x, const LocalVec& y) {
  for (int i = 0; i < 2; ++i) {
    const double dx = std::abs(x(i));
    const double dy = std::abs(y(i));
    if (std::abs(dx - dy) > 1e-12) return dx > dy;
  }
  return false;
}

struct Term {
  Complex weight;
  LocalVec a, b, c;
};

}  // namespace detail

// Unique product decomposition of a GHZ-class state.
//
// Conventions: each |k1> has its first nonzero component real positive,
// each |k2> is phased so <k1|k2> is real nonnegative (or, when the overlap
// vanishes, so its first nonzero component is real positive), the first
// term's coefficient is real positive, and phi collects the rest.
inline ProductDecomposition decompose(const State3Q& state, double tol = kDefaultRankTolerance) {
  const Classification cls = classify_detailed(state, tol);
  if (cls.label != EntanglementClass::GHZClass) {
    throw Error(ErrorCode::NotGHZClass,
                "state is " + std::string(to_string(cls.label)) + ", no two-term product decomposition");
  }
  const RangeQuadratic q = range_quadratic(state);
  const ProjectiveRoots roots = solve_homogeneous_quadratic(q.a, q.b, q.c);
  if (roots.separation < kDoubleRootThreshold) {
    throw Error(ErrorCode::IllConditioned, "product vectors of range(rho_BC) nearly coincide");
  }

  std::array<detail::Term, 2> terms;
  Eigen::Matrix<Complex, 4, 2> products;
  for (int i = 0; i < 2; ++i) {
    const LocalOp m = roots.roots[i](0) * q.r0 + roots.roots[i](1) * q.r1;
    Eigen::JacobiSVD<LocalOp> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    terms[i].b = svd.matrixU().col(0);
    terms[i].c = svd.matrixV().col(0).conjugate();
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) products(2 * b + c, i) = terms[i].b(b) * terms[i].c(c);
  }
  const Eigen::Vector4cd p1 = products.col(0);
  const Eigen::Vector4cd p2 = products.col(1);
  const double sin_angle = (p2 - p1.dot(p2) * p1).norm();
  if (sin_angle < kDoubleRootThreshold) {
    throw Error(ErrorCode::IllConditioned, "product vectors closer than 1e-8 in angle");
  }

  // psi = sum_a |a> (x) phi_a with phi_a = sum_i w_i[a] |b_i c_i>.
  const auto qr = products.colPivHouseholderQr();
  Eigen::Matrix2cd w;  // row a, column i
  for (int a = 0; a < 2; ++a) {
    Eigen::Vector4cd phi_a;
    for (int bc = 0; bc < 4; ++bc) phi_a(bc) = state[4 * a + bc];
    w.row(a) = qr.solve(phi_a).transpose();
  }
  for (int i = 0; i < 2; ++i) {
    const double lambda = w.col(i).norm();
    if (!(lambda > kNormTolerance)) {
      throw Error(ErrorCode::IllConditioned, "vanishing product-term weight");
    }
    terms[i].weight = lambda;
    terms[i].a = w.col(i) / lambda;
  }

  const double l1 = terms[0].weight.real();
  const double l2 = terms[1].weight.real();
  const bool tie = std::abs(l1 - l2) <= 1e-12 * std::max(l1, l2);
  if ((!tie && l2 > l1) || (tie && detail::lexicographically_greater(terms[1].a, terms[0].a))) {
    std::swap(terms[0], terms[1]);
  }

  std::array<double, 3> overlaps{};
  auto fix_pair = [&](LocalVec& k1, LocalVec& k2) {
    terms[0].weight *= detail::fix_leading_phase(k1);
    const Complex ov = k1.dot(k2);
    if (std::abs(ov) > kZeroOverlap) {
      const Complex ph = ov / std::abs(ov);
      k2 /= ph;
      terms[1].weight *= ph;
    } else {
      terms[1].weight *= detail::fix_leading_phase(k2);
    }
    return std::max(0.0, k1.dot(k2).real());
  };
  overlaps[0] = fix_pair(terms[0].a, terms[1].a);
  overlaps[1] = fix_pair(terms[0].b, terms[1].b);
  overlaps[2] = fix_pair(terms[0].c, terms[1].c);

  const Complex global = terms[0].weight / std::abs(terms[0].weight);
  ProductDecomposition d;
  d.mu1 = std::abs(terms[0].weight);
  d.mu2 = std::abs(terms[1].weight);
  if (tie) d.mu1 = d.mu2 = 0.5 * (d.mu1 + d.mu2);  // keeps mu1 >= mu2 after the lexicographic order
  double phi = std::arg(terms[1].weight / global);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
  d.phi = phi;
  d.a1 = terms[0].a;
  d.a2 = terms[1].a;
  d.b1 = terms[0].b;
  d.b2 = terms[1].b;
  d.c1 = terms[0].c;
  d.c2 = terms[1].c;
  d.sa = overlaps[0];
  d.sb = overlaps[1];
  d.sc = overlaps[2];

  if (std::abs(d.norm_squared() - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvariantViolation,
                "decomposition normalization off by " + std::to_string(d.norm_squared() - 1.0));
  }
  return d;
}

}  // namespace ghzdistill
