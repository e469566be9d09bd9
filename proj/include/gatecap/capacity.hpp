// Copyright 2026 The gatecap developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "gatecap/canonical.hpp"
#include "gatecap/qmath.hpp"

namespace gatecap {

struct CapacitySearchConfig {
  Eigen::Index alice_ancilla_dim = 2;
  Eigen::Index bob_ancilla_dim = 2;
  int restarts = 32;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-7;
  std::uint64_t seed = 0;
};

// Alice ancilla, Alice gate qubit, Bob gate qubit, Bob ancilla. The gate acts
// on positions 1 and 2.
inline SubsystemLayout capacity_layout(Eigen::Index alice_ancilla_dim,
                                       Eigen::Index bob_ancilla_dim) {
  return SubsystemLayout({
      Subsystem{alice_ancilla_dim, Party::alice, Role::ancilla},
      Subsystem{2, Party::alice, Role::gate_qubit},
      Subsystem{2, Party::bob, Role::gate_qubit},
      Subsystem{bob_ancilla_dim, Party::bob, Role::ancilla},
  });
}

// Change in Alice-Bob entanglement entropy when the gate acts on the two
// gate-qubit subsystems of psi.
inline double entropy_gain(const Gate& gate, const PartitionedState& psi) {
  const auto gate_pos = psi.layout.role_indices(Role::gate_qubit);
  const PartitionedState after = apply_operator(psi, gate.matrix, gate_pos);
  return entanglement_entropy(after) - entanglement_entropy(psi);
}

struct CapacityReport {
  double value = 0.0;
  std::optional<PartitionedState> best_state;
  std::vector<double> per_restart_values;
  int best_restart = -1;
  // True when the winning restart reached a stationary point: projected
  // gradient below tolerance, or no improving step at any line-search scale.
  // False only when its iteration budget ran out while still improving.
  bool converged = false;
};

namespace detail {

// d(entropy)/d(rho) on the support: -(log2 rho + 1/ln 2). Eigenvalues at or
// below the clamp contribute nothing, matching the clamped entropy they
// differentiate.
inline Eigen::MatrixXcd entropy_derivative(const Eigen::MatrixXcd& rho,
                                           double clamp = tol::eig_clamp) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  const double inv_ln2 = 1.0 / std::log(2.0);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > clamp) {
      out -= (std::log2(lam) + inv_ln2) * es.eigenvectors().col(i) *
             es.eigenvectors().col(i).adjoint();
    }
  }
  return out;
}

struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXcd gradient;
};

// sign * [S_A(U psi) - S_A(psi)] and its Wirtinger gradient with respect to
// conj(psi), for unit psi. The objective is phase invariant, so projecting
// out the complex psi direction gives the sphere gradient.
inline ObjectiveValue capacity_objective(const SubsystemLayout& layout,
                                         const Eigen::VectorXcd& psi,
                                         const Eigen::Matrix4cd& gate,
                                         const std::vector<std::size_t>& gate_pos,
                                         const std::vector<std::size_t>& alice_pos,
                                         double sign) {
  const Eigen::VectorXcd phi = vector_apply(layout, psi, gate, gate_pos);
  const Eigen::MatrixXcd rho_before =
      vector_partial_trace(layout, psi, alice_pos);
  const Eigen::MatrixXcd rho_after =
      vector_partial_trace(layout, phi, alice_pos);

  ObjectiveValue out;
  out.value = sign * (von_neumann_entropy(rho_after) -
                      von_neumann_entropy(rho_before));

  const Eigen::VectorXcd after_term = vector_apply(
      layout,
      vector_apply(layout, phi, entropy_derivative(rho_after), alice_pos),
      gate.adjoint(), gate_pos);
  const Eigen::VectorXcd before_term = vector_apply(
      layout, psi, entropy_derivative(rho_before), alice_pos);
  out.gradient = sign * (after_term - before_term);
  return out;
}

inline Eigen::VectorXcd haar_state(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v(i) = Complex(normal(rng), normal(rng));
  }
  return v / v.norm();
}

// Projected gradient ascent with Armijo backtracking over Haar-random
// restarts. sign = +1 maximizes the entropy gain, sign = -1 the entropy drop.
inline CapacityReport optimize_capacity(const Gate& gate,
                                        const CapacitySearchConfig& config,
                                        double sign) {
  const SubsystemLayout layout =
      capacity_layout(config.alice_ancilla_dim, config.bob_ancilla_dim);
  const auto gate_pos = layout.role_indices(Role::gate_qubit);
  const auto alice_pos = layout.party_indices(Party::alice);
  constexpr double armijo_c1 = 1e-4;
  constexpr double kValueStallTol = 1e-13;

  CapacityReport report;
  Eigen::VectorXcd best_psi;
  for (int restart = 0; restart < config.restarts; ++restart) {
    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(restart)};
    std::mt19937_64 rng(seq);
    Eigen::VectorXcd psi = haar_state(layout.total_dim(), rng);
    auto eval = capacity_objective(layout, psi, gate.matrix, gate_pos,
                                   alice_pos, sign);
    double step = 1.0;
    bool stationary = false;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
      const Complex radial = psi.adjoint() * eval.gradient;
      const Eigen::VectorXcd ascent = eval.gradient - radial * psi;
      const double ascent_norm = ascent.norm();
      if (ascent_norm <= config.gradient_tolerance) {
        stationary = true;
        break;
      }
      step = std::min(2.0 * step, 1.0);
      bool accepted = false;
      double improvement = 0.0;
      for (int halving = 0; halving < 50; ++halving) {
        Eigen::VectorXcd trial = psi + step * ascent;
        trial /= trial.norm();
        auto trial_eval = capacity_objective(layout, trial, gate.matrix,
                                             gate_pos, alice_pos, sign);
        const double required =
            eval.value + armijo_c1 * step * 2.0 * ascent_norm * ascent_norm;
        if (trial_eval.value >= required) {
          improvement = trial_eval.value - eval.value;
          psi = std::move(trial);
          eval = std::move(trial_eval);
          accepted = true;
          break;
        }
        step /= 2.0;
      }
      // Entropy gradients stay finite-large wherever reduced eigenvalues sit
      // near the clamp, so the gradient-norm test alone cannot fire there;
      // treat rounding-level progress (or none at any line-search scale) as
      // the stationary point it numerically is.
      if (!accepted || improvement <= kValueStallTol) {
        stationary = true;
        break;
      }
    }
    report.per_restart_values.push_back(eval.value);
    if (report.best_restart < 0 || eval.value > report.value) {
      report.value = eval.value;
      report.best_restart = restart;
      report.converged = stationary;
      best_psi = psi;
    }
  }
  if (report.best_restart >= 0) {
    report.best_state.emplace(best_psi, layout);
    report.value = sign * entropy_gain(gate, *report.best_state);
  }
  return report;
}

}  // namespace detail

// Largest achievable increase in Alice-Bob entanglement entropy from one use
// of the gate, optimized over pure states of the gate qubits plus ancillas.
inline CapacityReport entangling_capability(
    const Gate& gate, const CapacitySearchConfig& config = {}) {
  return detail::optimize_capacity(gate, config, +1.0);
}

// Largest achievable decrease, optimized independently of the increase.
inline CapacityReport disentangling_capability(
    const Gate& gate, const CapacitySearchConfig& config = {}) {
  return detail::optimize_capacity(gate, config, -1.0);
}

// For a symmetric gate (U^T = U, as every exp(-i sum alpha sigma sigma) is),
// conjugating a state that the gate entangles by amount dE yields a state the
// gate disentangles by exactly dE.
inline PartitionedState conjugate_witness(const Gate& symmetric_gate,
                                          const PartitionedState& psi) {
  const double symmetry_err =
      (symmetric_gate.matrix - symmetric_gate.matrix.transpose())
          .cwiseAbs()
          .maxCoeff();
  if (symmetry_err > 1e-9) {
    throw std::invalid_argument("conjugate_witness: gate must be symmetric");
  }
  const auto gate_pos = psi.layout.role_indices(Role::gate_qubit);
  return apply_operator(conjugate(psi),
                        symmetric_gate.matrix.conjugate(), gate_pos);
}

}  // namespace gatecap
