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

// Random states, local unitaries and product-form states for the test suites.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "ghzdistill/decomposition.hpp"
#include "ghzdistill/tensor_core.hpp"

namespace ghzdistill::testing {

using Rng = std::mt19937_64;

inline Complex gaussian_complex(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline State3Q random_state(Rng& rng) {
  Amplitudes raw;
  for (auto& z : raw) z = gaussian_complex(rng);
  return normalize(raw);
}

inline LocalVec random_local_vec(Rng& rng) {
  LocalVec v(gaussian_complex(rng), gaussian_complex(rng));
  return v / v.norm();
}

// Haar-random 2x2 unitary.
inline LocalOp random_unitary(Rng& rng) {
  LocalOp g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g(i, j) = gaussian_complex(rng);
  Eigen::HouseholderQR<LocalOp> qr(g);
  LocalOp q = qr.householderQ();
  const LocalOp r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 2; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

inline State3Q apply_unitaries(const State3Q& s, const LocalOp& ua, const LocalOp& ub, const LocalOp& uc) {
  return normalize(apply_local(s, ua, ub, uc).raw);
}

inline State3Q random_lu(const State3Q& s, Rng& rng) {
  const LocalOp ua = random_unitary(rng);
  const LocalOp ub = random_unitary(rng);
  const LocalOp uc = random_unitary(rng);
  return apply_unitaries(s, ua, ub, uc);
}

inline State3Q from_terms(double mu1, double mu2, double phi, const LocalVec& a1, const LocalVec& a2,
                          const LocalVec& b1, const LocalVec& b2, const LocalVec& c1, const LocalVec& c2) {
  const Amplitudes t1 = product_amplitudes(a1, b1, c1);
  const Amplitudes t2 = product_amplitudes(a2, b2, c2);
  Amplitudes raw;
  for (int i = 0; i < 8; ++i) raw[i] = mu1 * t1[i] + std::polar(mu2, phi) * t2[i];
  return normalize(raw);
}

inline LocalVec ket0() { return LocalVec(1.0, 0.0); }
inline LocalVec ket1() { return LocalVec(0.0, 1.0); }

// Real unit vector with <0|v> = s.
inline LocalVec tilted(double s) { return LocalVec(s, std::sqrt(1.0 - s * s)); }

// mu1 |0 0 c1> + mu2 e^{i phi} |1 1 c2> with mu1 > mu2.
inline State3Q random_phi1(Rng& rng) {
  const double mu1sq = uniform(rng, 0.5, 0.95);
  const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double sc = uniform(rng, 0.0, 0.95);
  return from_terms(std::sqrt(mu1sq), std::sqrt(1.0 - mu1sq), phi, ket0(), ket1(), ket0(), ket1(), ket0(),
                    tilted(sc));
}

// mu1 |0 b1 c1> + mu2 e^{i phi} |1 b2 c2> with generic b's and c's.
inline State3Q random_phi2(Rng& rng) {
  const double mu1sq = uniform(rng, 0.5, 0.95);
  const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double sb = uniform(rng, 0.0, 0.95);
  const double sc = uniform(rng, 0.0, 0.95);
  const LocalOp ub = random_unitary(rng);
  const LocalOp uc = random_unitary(rng);
  return from_terms(std::sqrt(mu1sq), std::sqrt(1.0 - mu1sq), phi, ket0(), ket1(), ub * ket0(), ub * tilted(sb),
                    uc * ket0(), uc * tilted(sc));
}

// Generic state; rejects the rare draws whose product vectors nearly
// coincide so decompositions stay well conditioned.
inline State3Q random_ghz_class(Rng& rng) {
  for (;;) {
    const State3Q s = random_state(rng);
    const Classification c = classify_detailed(s);
    if (c.label == EntanglementClass::GHZClass && c.evidence.root_separation > 1e-3) return s;
  }
}

inline State3Q psi_b() {
  Amplitudes raw{};
  raw[0] = 1.0;
  raw[6] = 0.6;
  raw[7] = 0.8;
  return normalize(raw);
}

}  // namespace ghzdistill::testing
