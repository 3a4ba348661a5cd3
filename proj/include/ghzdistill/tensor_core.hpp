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

// Dense three-qubit pure-state algebra. Basis ket |abc> lives at index
// 4a + 2b + c, so party A is the slowest index.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string_view>

#include <Eigen/Dense>

#include "ghzdistill/errors.hpp"

namespace ghzdistill {

using Complex = std::complex<double>;
using Amplitudes = std::array<Complex, 8>;
using LocalVec = Eigen::Vector2cd;
using LocalOp = Eigen::Matrix2cd;
using DensityMatrix = Eigen::MatrixXcd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kDefaultRankTolerance = 1e-10;

enum class Party : unsigned { A = 0, B = 1, C = 2 };

inline constexpr std::array<Party, 3> kAllParties{Party::A, Party::B, Party::C};

inline std::string_view to_string(Party p) {
  switch (p) {
    case Party::A: return "A";
    case Party::B: return "B";
    case Party::C: return "C";
  }
  return "?";
}

// Bit position of a party inside the basis index.
constexpr unsigned party_shift(Party p) { return 2u - static_cast<unsigned>(p); }

class PartySet {
 public:
  constexpr PartySet() = default;
  constexpr PartySet(std::initializer_list<Party> parties) {
    for (Party p : parties) mask_ |= 1u << static_cast<unsigned>(p);
  }

  constexpr bool contains(Party p) const { return (mask_ >> static_cast<unsigned>(p)) & 1u; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr PartySet complement() const {
    PartySet out;
    out.mask_ = ~mask_ & 0b111u;
    return out;
  }
  constexpr bool operator==(const PartySet&) const = default;

 private:
  unsigned mask_ = 0;
};

// Normalized three-qubit pure state.
class State3Q {
 public:
  State3Q() : State3Q(basis(0)) {}

  // Rescales raw amplitudes to unit norm. Throws ZeroVector when the norm
  // is at most 1e-12.
  static State3Q normalize(const Amplitudes& raw) {
    double norm2 = 0.0;
    for (const Complex& z : raw) norm2 += std::norm(z);
    const double norm = std::sqrt(norm2);
    if (!(norm > kNormTolerance)) {
      throw Error(ErrorCode::ZeroVector, "amplitude vector has norm " + std::to_string(norm));
    }
    Amplitudes amps;
    for (std::size_t i = 0; i < 8; ++i) amps[i] = raw[i] / norm;
    return State3Q(amps);
  }

  static State3Q basis(std::size_t index) {
    Amplitudes amps{};
    amps.at(index) = 1.0;
    return State3Q(amps);
  }

  static State3Q ghz() {
    Amplitudes amps{};
    amps[0] = amps[7] = 1.0 / std::sqrt(2.0);
    return State3Q(amps);
  }

  static State3Q w() {
    Amplitudes amps{};
    amps[1] = amps[2] = amps[4] = 1.0 / std::sqrt(3.0);
    return State3Q(amps);
  }

  const Amplitudes& amps() const { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  Eigen::Matrix<Complex, 8, 1> vector() const {
    return Eigen::Map<const Eigen::Matrix<Complex, 8, 1>>(amps_.data());
  }

 private:
  explicit State3Q(const Amplitudes& amps) : amps_(amps) {}

  Amplitudes amps_;
};

inline State3Q normalize(const Amplitudes& raw) { return State3Q::normalize(raw); }

inline double norm_squared(const Amplitudes& raw) {
  double n = 0.0;
  for (const Complex& z : raw) n += std::norm(z);
  return n;
}

// <s1|s2>
inline Complex overlap(const Amplitudes& s1, const Amplitudes& s2) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < 8; ++i) acc += std::conj(s1[i]) * s2[i];
  return acc;
}

inline Complex overlap(const State3Q& s1, const State3Q& s2) { return overlap(s1.amps(), s2.amps()); }

inline Amplitudes product_amplitudes(const LocalVec& a, const LocalVec& b, const LocalVec& c) {
  Amplitudes out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) out[4 * i + 2 * j + k] = a(i) * b(j) * c(k);
  return out;
}

// Tr_complement |psi><psi| for the kept parties, ordered A < B < C.
inline DensityMatrix reduced_density(const State3Q& state, PartySet keep) {
  if (keep.empty() || keep.size() == 3) {
    throw Error(ErrorCode::PreconditionViolated, "reduced_density needs a nonempty proper subset");
  }
  unsigned kept_bits = 0;
  for (Party p : kAllParties)
    if (keep.contains(p)) kept_bits |= 1u << party_shift(p);

  auto compress = [kept_bits](unsigned index) {
    unsigned out = 0;
    for (int bit = 2; bit >= 0; --bit) {
      if ((kept_bits >> bit) & 1u) out = (out << 1) | ((index >> bit) & 1u);
    }
    return out;
  };

  const int dim = 1 << keep.size();
  DensityMatrix rho = DensityMatrix::Zero(dim, dim);
  const auto& psi = state.amps();
  for (unsigned i = 0; i < 8; ++i) {
    for (unsigned j = 0; j < 8; ++j) {
      if ((i & ~kept_bits) != (j & ~kept_bits)) continue;
      rho(compress(i), compress(j)) += psi[i] * std::conj(psi[j]);
    }
  }
  return rho;
}

inline Eigen::VectorXd hermitian_eigenvalues(const DensityMatrix& m) {
  Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// Number of eigenvalues above tol times the largest one.
inline int numeric_rank(const DensityMatrix& m, double tol = kDefaultRankTolerance) {
  if (!(tol > 0.0)) throw Error(ErrorCode::PreconditionViolated, "rank tolerance must be positive");
  const Eigen::VectorXd ev = hermitian_eigenvalues(m);
  const double largest = ev.maxCoeff();
  if (!(largest > 0.0)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > tol * largest) ++rank;
  return rank;
}

// Applies op to one party, leaving the other two untouched.
inline Amplitudes apply_on_party(const Amplitudes& psi, const LocalOp& op, Party party) {
  const unsigned shift = party_shift(party);
  const unsigned bit = 1u << shift;
  Amplitudes out{};
  for (unsigned i = 0; i < 8; ++i) {
    const unsigned row = (i >> shift) & 1u;
    const unsigned base = i & ~bit;
    out[i] = op(row, 0) * psi[base] + op(row, 1) * psi[base | bit];
  }
  return out;
}

struct LocalResult {
  Amplitudes raw;      // (A (x) B (x) C)|psi>, unnormalized
  double probability;  // <psi| A'A (x) B'B (x) C'C |psi>
};

inline LocalResult apply_local(const State3Q& state, const LocalOp& op_a, const LocalOp& op_b,
                               const LocalOp& op_c) {
  Amplitudes raw = apply_on_party(state.amps(), op_a, Party::A);
  raw = apply_on_party(raw, op_b, Party::B);
  raw = apply_on_party(raw, op_c, Party::C);
  return {raw, norm_squared(raw)};
}

// |<GHZ|psi>|^2
inline double ghz_fidelity(const Amplitudes& psi) { return 0.5 * std::norm(psi[0] + psi[7]); }
inline double ghz_fidelity(const State3Q& state) { return ghz_fidelity(state.amps()); }

inline double max_abs_entry(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Largest singular value of a 2x2 operator.
inline double spectral_norm(const LocalOp& m) {
  Eigen::JacobiSVD<LocalOp> svd(m);
  return svd.singularValues()(0);
}

// PSD square root of a Hermitian 2x2 matrix. Eigenvalues below
// floor * max(1, largest) are rounding residue and are set to zero.
inline LocalOp psd_sqrt(const LocalOp& h, double floor = 1e-13) {
  const LocalOp sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<LocalOp> solver(sym);
  Eigen::Vector2d ev = solver.eigenvalues();
  const double cutoff = floor * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int i = 0; i < 2; ++i) {
    if (ev(i) < -cutoff) {
      throw Error(ErrorCode::InvariantViolation,
                  "matrix is not positive semidefinite (eigenvalue " + std::to_string(ev(i)) + ")");
    }
    ev(i) = ev(i) <= cutoff ? 0.0 : std::sqrt(ev(i));
  }
  const auto& v = solver.eigenvectors();
  return v * ev.cast<Complex>().asDiagonal() * v.adjoint();
}

// Failure operator completing {m, completion(m)} to a POVM.
inline LocalOp povm_completion(const LocalOp& m, double floor = 1e-13) {
  return psd_sqrt(LocalOp::Identity() - m.adjoint() * m, floor);
}

}  // namespace ghzdistill
