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

#include <cstddef>
#include <vector>

#include "gatecap/canonical.hpp"
#include "gatecap/qmath.hpp"

namespace gatecap {

// Direction of classical communication: forward is Alice to Bob.
enum class Direction { forward, backward };

inline Party sender(Direction d) {
  return d == Direction::forward ? Party::alice : Party::bob;
}

inline Party receiver(Direction d) {
  return d == Direction::forward ? Party::bob : Party::alice;
}

struct EnsembleMember {
  double probability;
  DensityOperator state;
};

struct Ensemble {
  std::vector<EnsembleMember> members;
};

inline void validate(const Ensemble& e, double prob_tol = 1e-9) {
  if (e.members.empty()) {
    throw std::invalid_argument("Ensemble: no members");
  }
  double total = 0.0;
  for (const auto& m : e.members) {
    if (m.probability < 0.0) {
      throw std::invalid_argument("Ensemble: negative probability");
    }
    if (!(m.state.layout == e.members.front().state.layout)) {
      throw std::invalid_argument("Ensemble: members on different layouts");
    }
    total += m.probability;
  }
  if (std::abs(total - 1.0) > prob_tol) {
    throw std::invalid_argument("Ensemble: probabilities do not sum to 1");
  }
}

// S(sum_i p_i rho_i) - sum_i p_i S(rho_i).
inline double holevo_chi(const Ensemble& e) {
  validate(e);
  Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(
      e.members.front().state.matrix.rows(),
      e.members.front().state.matrix.cols());
  double member_entropy = 0.0;
  for (const auto& m : e.members) {
    avg += m.probability * m.state.matrix;
    member_entropy += m.probability * von_neumann_entropy(m.state.matrix);
  }
  return von_neumann_entropy(avg) - member_entropy;
}

inline DensityOperator ensemble_average(const Ensemble& e) {
  validate(e);
  Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(
      e.members.front().state.matrix.rows(),
      e.members.front().state.matrix.cols());
  for (const auto& m : e.members) avg += m.probability * m.state.matrix;
  return DensityOperator(std::move(avg), e.members.front().state.layout);
}

// sigma_i applied to both gate qubits. These four encodings commute with any
// gate of the form exp(-i sum_k alpha_k sigma_k (x) sigma_k), so they change
// neither the entanglement drop the gate produces nor the receiver's average.
inline PartitionedState pauli_pair_encode(const PartitionedState& psi, int i) {
  const auto gate_pos = psi.layout.role_indices(Role::gate_qubit);
  if (gate_pos.size() != 2) {
    throw std::invalid_argument("pauli_pair_encode: need two gate qubits");
  }
  return apply_operator(psi, detail::kron2(pauli(i), pauli(i)), gate_pos);
}

// Receiver-side coding ensemble {1/4, Tr_sender[(sigma_i sigma_i) phi]}.
inline Ensemble one_way_ensemble(const PartitionedState& phi, Direction dir) {
  const auto keep = phi.layout.party_indices(receiver(dir));
  Ensemble out;
  for (int i = 0; i < 4; ++i) {
    out.members.push_back(
        EnsembleMember{0.25, partial_trace(pauli_pair_encode(phi, i), keep)});
  }
  return out;
}

// Increase in the receiver's Holevo information when the gate acts on the
// coding ensemble built from the source state. For gates commuting with the
// encodings this equals the entanglement drop E(source) - E(gate source).
inline double delta_chi_one_way(const Gate& gate,
                                const PartitionedState& source,
                                Direction dir) {
  const auto gate_pos = source.layout.role_indices(Role::gate_qubit);
  const PartitionedState after =
      apply_operator(source, gate.matrix, gate_pos);
  return holevo_chi(one_way_ensemble(after, dir)) -
         holevo_chi(one_way_ensemble(source, dir));
}

// Largest entrywise deviation of the ensemble average from a fully
// depolarized receiver gate qubit uncorrelated with the receiver's other
// subsystems. Exactly zero up to rounding for the four-code ensemble.
inline double depolarization_deviation(const PartitionedState& phi,
                                       Direction dir) {
  const DensityOperator avg = ensemble_average(one_way_ensemble(phi, dir));
  const SubsystemLayout& layout = avg.layout;
  const auto gq = layout.indices(receiver(dir), Role::gate_qubit);
  if (gq.size() != 1 || layout[gq.front()].dim != 2) {
    throw std::invalid_argument(
        "depolarization_deviation: receiver needs exactly one gate qubit");
  }
  const Eigen::Index sg = layout.stride(gq.front());
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (k != gq.front()) rest.push_back(k);
  }
  Eigen::MatrixXcd expected =
      Eigen::MatrixXcd::Zero(layout.total_dim(), layout.total_dim());
  if (rest.empty()) {
    expected = 0.5 * Eigen::MatrixXcd::Identity(2, 2);
  } else {
    const Eigen::MatrixXcd remainder = partial_trace(avg, rest).matrix;
    const auto off = detail::subset_offsets(layout, rest);
    const auto n = static_cast<Eigen::Index>(off.size());
    for (Eigen::Index a = 0; a < 2; ++a) {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          expected(a * sg + off[static_cast<std::size_t>(i)],
                   a * sg + off[static_cast<std::size_t>(j)]) =
              0.5 * remainder(i, j);
        }
      }
    }
  }
  return (avg.matrix - expected).cwiseAbs().maxCoeff();
}

// Pure-state ensemble with independent sender codes: Alice picks i, Bob picks
// j, member(i, j) carries both encodings.
struct BidirectionalEnsemble {
  std::vector<double> alice_probs;
  std::vector<double> bob_probs;
  std::vector<PartitionedState> members;  // row-major in (i, j)

  const PartitionedState& member(std::size_t i, std::size_t j) const {
    return members.at(i * bob_probs.size() + j);
  }
};

// The 16-member grid sigma_i sigma_i sigma_j sigma_j |phi>, p_i = q_j = 1/4.
inline BidirectionalEnsemble bidirectional_pauli_ensemble(
    const PartitionedState& phi) {
  BidirectionalEnsemble out;
  out.alice_probs.assign(4, 0.25);
  out.bob_probs.assign(4, 0.25);
  for (int i = 0; i < 4; ++i) {
    const PartitionedState encoded_i = pauli_pair_encode(phi, i);
    for (int j = 0; j < 4; ++j) {
      out.members.push_back(pauli_pair_encode(encoded_i, j));
    }
  }
  return out;
}

// Upper bound on one direction of communication with a bidirectional
// ensemble: the receiver marginal Holevo information, averaged over the
// receiving party's own code, as if senders block-coded per opposing message.
inline double chi_upper(const BidirectionalEnsemble& e, Direction dir) {
  const auto keep = e.members.front().layout.party_indices(receiver(dir));
  const std::size_t n_send =
      dir == Direction::forward ? e.alice_probs.size() : e.bob_probs.size();
  const std::size_t n_recv =
      dir == Direction::forward ? e.bob_probs.size() : e.alice_probs.size();
  const auto& send_probs =
      dir == Direction::forward ? e.alice_probs : e.bob_probs;
  const auto& recv_probs =
      dir == Direction::forward ? e.bob_probs : e.alice_probs;

  double total = 0.0;
  for (std::size_t r = 0; r < n_recv; ++r) {
    Ensemble slice;
    for (std::size_t s = 0; s < n_send; ++s) {
      const auto& psi =
          dir == Direction::forward ? e.member(s, r) : e.member(r, s);
      slice.members.push_back(
          EnsembleMember{send_probs[s], partial_trace(psi, keep)});
    }
    total += recv_probs[r] * holevo_chi(slice);
  }
  return total;
}

// Lower bound achieved with the specific correction maps
// T_j(rho) = sigma_j rho sigma_j on the receiver's gate qubit: the receiver
// strips their own encoding before averaging over their code.
inline double chi_lower_pauli_corrected(const BidirectionalEnsemble& e,
                                        Direction dir) {
  if (e.alice_probs.size() != 4 || e.bob_probs.size() != 4) {
    throw std::invalid_argument(
        "chi_lower_pauli_corrected: needs the 4x4 Pauli coding grid");
  }
  const auto keep = e.members.front().layout.party_indices(receiver(dir));
  const SubsystemLayout reduced = e.members.front().layout.select(keep);
  const auto gate_pos = reduced.role_indices(Role::gate_qubit);
  if (gate_pos.size() != 1) {
    throw std::invalid_argument(
        "chi_lower_pauli_corrected: receiver needs one gate qubit");
  }

  Ensemble corrected;
  for (std::size_t s = 0; s < 4; ++s) {
    Eigen::MatrixXcd avg =
        Eigen::MatrixXcd::Zero(reduced.total_dim(), reduced.total_dim());
    for (std::size_t r = 0; r < 4; ++r) {
      const auto& psi =
          dir == Direction::forward ? e.member(s, r) : e.member(r, s);
      const DensityOperator marginal = partial_trace(psi, keep);
      const DensityOperator stripped = apply_operator(
          marginal, pauli(static_cast<int>(r)), gate_pos);
      const double q =
          dir == Direction::forward ? e.bob_probs[r] : e.alice_probs[r];
      avg += q * stripped.matrix;
    }
    const double p =
        dir == Direction::forward ? e.alice_probs[s] : e.bob_probs[s];
    corrected.members.push_back(
        EnsembleMember{p, DensityOperator(std::move(avg), reduced)});
  }
  return holevo_chi(corrected);
}

struct DeltaChiBidirectional {
  // chi(after) - chi(before) summed over both directions, evaluated with the
  // coinciding upper and lower bounds.
  double value = 0.0;
  // Largest observed gap between the upper bound and the Pauli-corrected
  // lower bound across both directions and both ensembles.
  double max_bound_gap = 0.0;
  bool bounds_coincide = false;
  double forward_before = 0.0, forward_after = 0.0;
  double backward_before = 0.0, backward_after = 0.0;
};

inline DeltaChiBidirectional delta_chi_bidirectional(
    const Gate& gate, const PartitionedState& source,
    double coincide_tol = 1e-10) {
  const auto gate_pos = source.layout.role_indices(Role::gate_qubit);
  const PartitionedState after =
      apply_operator(source, gate.matrix, gate_pos);
  const BidirectionalEnsemble before_e = bidirectional_pauli_ensemble(source);
  const BidirectionalEnsemble after_e = bidirectional_pauli_ensemble(after);

  DeltaChiBidirectional out;
  const auto bound_pair = [&out](const BidirectionalEnsemble& e,
                                 Direction dir) {
    const double up = chi_upper(e, dir);
    const double lo = chi_lower_pauli_corrected(e, dir);
    out.max_bound_gap = std::max(out.max_bound_gap, std::abs(up - lo));
    return up;
  };
  out.forward_before = bound_pair(before_e, Direction::forward);
  out.backward_before = bound_pair(before_e, Direction::backward);
  out.forward_after = bound_pair(after_e, Direction::forward);
  out.backward_after = bound_pair(after_e, Direction::backward);
  out.value = (out.forward_after + out.backward_after) -
              (out.forward_before + out.backward_before);
  out.bounds_coincide = out.max_bound_gap <= coincide_tol;
  return out;
}

// Product-density ensemble whose per-party marginals match the pure Pauli
// grid member for member; it is preparable from two one-way ensembles by
// local Pauli operations alone.
inline Ensemble product_marginal_ensemble(const PartitionedState& phi) {
  const auto alice_pos = phi.layout.party_indices(Party::alice);
  const auto bob_pos = phi.layout.party_indices(Party::bob);
  Ensemble out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const PartitionedState encoded =
          pauli_pair_encode(pauli_pair_encode(phi, i), j);
      out.members.push_back(EnsembleMember{
          1.0 / 16.0, tensor(partial_trace(encoded, alice_pos),
                             partial_trace(encoded, bob_pos))});
    }
  }
  return out;
}

// Ensemble that transmits one bit in total yet costs two bits to prepare:
// members |00>, |00>, |00>, |11> with each party's bit uniform.
inline BidirectionalEnsemble counterexample_ensemble() {
  const SubsystemLayout layout({
      Subsystem{2, Party::alice, Role::gate_qubit},
      Subsystem{2, Party::bob, Role::gate_qubit},
  });
  BidirectionalEnsemble out;
  out.alice_probs.assign(2, 0.5);
  out.bob_probs.assign(2, 0.5);
  out.members.push_back(basis_state(layout, {0, 0}));
  out.members.push_back(basis_state(layout, {0, 0}));
  out.members.push_back(basis_state(layout, {0, 0}));
  out.members.push_back(basis_state(layout, {1, 1}));
  return out;
}

}  // namespace gatecap
