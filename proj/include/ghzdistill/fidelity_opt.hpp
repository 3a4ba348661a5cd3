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

// Best deterministic local-unitary approximation of GHZ:
//
//   F(psi) = max_{U_A, U_B, U_C} |<GHZ| U_A (x) U_B (x) U_C |psi>|^2.
//
// Each U is an SU(2) element in Z-Y-Z Euler angles (global phase dropped),
// so the search space has nine angles.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include "ghzdistill/tensor_core.hpp"

namespace ghzdistill {

using AngleVector = std::array<double, 9>;

// Rz(phi) Ry(theta) Rz(lambda)
inline LocalOp su2(double theta, double phi, double lambda) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  LocalOp u;
  u(0, 0) = std::polar(c, -0.5 * (phi + lambda));
  u(0, 1) = -std::polar(s, -0.5 * (phi - lambda));
  u(1, 0) = std::polar(s, 0.5 * (phi - lambda));
  u(1, 1) = std::polar(c, 0.5 * (phi + lambda));
  return u;
}

// d/dtheta, d/dphi, d/dlambda of su2.
inline std::array<LocalOp, 3> su2_derivatives(double theta, double phi, double lambda) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  LocalOp d_theta;
  d_theta(0, 0) = std::polar(-0.5 * s, -0.5 * (phi + lambda));
  d_theta(0, 1) = -std::polar(0.5 * c, -0.5 * (phi - lambda));
  d_theta(1, 0) = std::polar(0.5 * c, 0.5 * (phi - lambda));
  d_theta(1, 1) = std::polar(-0.5 * s, 0.5 * (phi + lambda));
  const LocalOp u = su2(theta, phi, lambda);
  const Eigen::Vector2cd half_z(Complex(0.0, -0.5), Complex(0.0, 0.5));
  const LocalOp d_phi = half_z.asDiagonal() * u;
  const LocalOp d_lambda = u * half_z.asDiagonal();
  return {d_theta, d_phi, d_lambda};
}

struct LocalUnitaryTriple {
  AngleVector angles{};  // (theta, phi, lambda) for A, then B, then C

  LocalOp unitary(Party p) const {
    const std::size_t k = 3 * static_cast<std::size_t>(p);
    return su2(angles[k], angles[k + 1], angles[k + 2]);
  }
};

namespace detail {

inline Complex ghz_amplitude(const Amplitudes& psi) { return (psi[0] + psi[7]) / std::sqrt(2.0); }

inline Complex rotated_ghz_amplitude(const State3Q& state, const std::array<LocalOp, 3>& u) {
  return ghz_amplitude(apply_local(state, u[0], u[1], u[2]).raw);
}

}  // namespace detail

inline double lu_fidelity(const State3Q& state, const AngleVector& angles) {
  const LocalUnitaryTriple t{angles};
  return std::norm(detail::rotated_ghz_amplitude(state, {t.unitary(Party::A), t.unitary(Party::B),
                                                         t.unitary(Party::C)}));
}

// Analytic gradient of lu_fidelity: dF = 2 Re(conj(z) dz).
inline AngleVector lu_fidelity_gradient(const State3Q& state, const AngleVector& angles) {
  const LocalUnitaryTriple t{angles};
  const std::array<LocalOp, 3> u{t.unitary(Party::A), t.unitary(Party::B), t.unitary(Party::C)};
  const Complex z = detail::rotated_ghz_amplitude(state, u);
  AngleVector grad{};
  for (std::size_t p = 0; p < 3; ++p) {
    const auto du = su2_derivatives(angles[3 * p], angles[3 * p + 1], angles[3 * p + 2]);
    for (std::size_t k = 0; k < 3; ++k) {
      std::array<LocalOp, 3> ops = u;
      ops[p] = du[k];
      grad[3 * p + k] = 2.0 * (std::conj(z) * detail::rotated_ghz_amplitude(state, ops)).real();
    }
  }
  return grad;
}

namespace detail {

// Ceres minimizes, so the cost is 1 - F.
class InfidelityCost final : public ceres::FirstOrderFunction {
 public:
  explicit InfidelityCost(const State3Q& state) : state_(state) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    AngleVector angles;
    std::copy(parameters, parameters + 9, angles.begin());
    cost[0] = 1.0 - lu_fidelity(state_, angles);
    if (gradient != nullptr) {
      const AngleVector g = lu_fidelity_gradient(state_, angles);
      for (std::size_t i = 0; i < 9; ++i) gradient[i] = -g[i];
    }
    return true;
  }

  int NumParameters() const override { return 9; }

 private:
  State3Q state_;
};

inline AngleVector local_ascent(const State3Q& state, AngleVector start) {
  ceres::GradientProblem problem(new InfidelityCost(state));
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = 1000;
  options.function_tolerance = 1e-16;
  options.gradient_tolerance = 1e-13;
  options.parameter_tolerance = 1e-14;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, start.data(), &summary);
  return start;
}

}  // namespace detail

struct FidelityResult {
  double fidelity;
  LocalUnitaryTriple triple;
};

inline constexpr int kDefaultRestarts = 32;

// Gradient ascent from the identity plus `restarts` seeded random angle
// vectors; the best fidelity wins, earlier starts win ties.
inline FidelityResult optimal_lu_fidelity(const State3Q& state, int restarts = kDefaultRestarts,
                                          std::uint64_t seed = 0) {
  if (restarts < 1) throw Error(ErrorCode::PreconditionViolated, "need at least one restart");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> turn(0.0, 2.0 * std::numbers::pi);

  FidelityResult best{-1.0, {}};
  for (int r = 0; r <= restarts; ++r) {
    AngleVector start{};
    if (r > 0) {
      for (double& a : start) a = turn(rng);
    }
    const AngleVector angles = detail::local_ascent(state, start);
    const double f = lu_fidelity(state, angles);
    if (f > best.fidelity) best = {f, LocalUnitaryTriple{angles}};
  }
  return best;
}

}  // namespace ghzdistill
