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

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gatecap {

using Complex = std::complex<double>;

namespace tol {
inline constexpr double norm = 1e-12;
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd = 1e-10;
inline constexpr double eig_clamp = 1e-12;
inline constexpr double unitary = 1e-10;
}  // namespace tol

enum class Party { alice, bob };
enum class Role { message, gate_qubit, ancilla, copy_register };

struct Subsystem {
  Eigen::Index dim = 1;
  Party party = Party::alice;
  Role role = Role::ancilla;

  bool operator==(const Subsystem&) const = default;
};

// Ordered list of subsystems with party and role tags. Basis indexing is
// mixed-radix in list order with the FIRST subsystem as the most significant
// digit:
//
//   index = sum_k digit_k * stride_k,  stride_k = prod_{j > k} dim_j
//
// so tensor(a, b) is the plain Kronecker product of the amplitude vectors and
// |0> (x) |1> has index 1 in a two-qubit layout.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;

  explicit SubsystemLayout(std::vector<Subsystem> subsystems)
      : subs_(std::move(subsystems)) {
    strides_.resize(subs_.size());
    total_ = 1;
    for (std::size_t k = subs_.size(); k-- > 0;) {
      if (subs_[k].dim < 1) {
        throw std::invalid_argument("SubsystemLayout: dimensions must be >= 1");
      }
      strides_[k] = total_;
      total_ *= subs_[k].dim;
    }
  }

  std::size_t size() const { return subs_.size(); }
  const Subsystem& operator[](std::size_t i) const { return subs_.at(i); }
  Eigen::Index total_dim() const { return total_; }
  Eigen::Index stride(std::size_t i) const { return strides_.at(i); }

  Eigen::Index digit(Eigen::Index index, std::size_t i) const {
    return (index / strides_.at(i)) % subs_[i].dim;
  }

  Eigen::Index compose(const std::vector<Eigen::Index>& digits) const {
    if (digits.size() != subs_.size()) {
      throw std::invalid_argument("compose: one digit per subsystem required");
    }
    Eigen::Index index = 0;
    for (std::size_t k = 0; k < subs_.size(); ++k) {
      if (digits[k] < 0 || digits[k] >= subs_[k].dim) {
        throw std::invalid_argument("compose: digit out of range");
      }
      index += digits[k] * strides_[k];
    }
    return index;
  }

  std::vector<std::size_t> party_indices(Party p) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < subs_.size(); ++k) {
      if (subs_[k].party == p) out.push_back(k);
    }
    return out;
  }

  std::vector<std::size_t> role_indices(Role r) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < subs_.size(); ++k) {
      if (subs_[k].role == r) out.push_back(k);
    }
    return out;
  }

  std::vector<std::size_t> indices(Party p, Role r) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < subs_.size(); ++k) {
      if (subs_[k].party == p && subs_[k].role == r) out.push_back(k);
    }
    return out;
  }

  // Sub-layout of the listed positions, preserving their relative order.
  SubsystemLayout select(const std::vector<std::size_t>& keep) const {
    std::vector<Subsystem> picked;
    picked.reserve(keep.size());
    for (std::size_t k : keep) picked.push_back(subs_.at(k));
    return SubsystemLayout(std::move(picked));
  }

  SubsystemLayout concatenated(const SubsystemLayout& other) const {
    std::vector<Subsystem> joined = subs_;
    joined.insert(joined.end(), other.subs_.begin(), other.subs_.end());
    return SubsystemLayout(std::move(joined));
  }

  bool operator==(const SubsystemLayout& other) const {
    return subs_ == other.subs_;
  }

 private:
  std::vector<Subsystem> subs_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index total_ = 1;
};

namespace detail {

// Offsets of every basis assignment of the listed positions, all other digits
// zero. The positions list order sets digit significance (first position is
// the most significant digit of the subset index).
inline std::vector<Eigen::Index> subset_offsets(
    const SubsystemLayout& layout, const std::vector<std::size_t>& positions) {
  Eigen::Index dim = 1;
  for (std::size_t p : positions) dim *= layout[p].dim;
  std::vector<Eigen::Index> offsets(static_cast<std::size_t>(dim), 0);
  Eigen::Index block = 1;
  // Walk positions from least significant (last) to most significant (first),
  // replicating the already-built block for each digit value.
  for (std::size_t k = positions.size(); k-- > 0;) {
    const std::size_t p = positions[k];
    const Eigen::Index d = layout[p].dim;
    const Eigen::Index stride = layout.stride(p);
    for (Eigen::Index digit = d - 1; digit >= 0; --digit) {
      for (Eigen::Index i = 0; i < block; ++i) {
        offsets[static_cast<std::size_t>(digit * block + i)] =
            offsets[static_cast<std::size_t>(i)] + digit * stride;
      }
    }
    block *= d;
  }
  offsets.resize(static_cast<std::size_t>(dim));
  return offsets;
}

inline std::vector<std::size_t> complement_positions(
    const SubsystemLayout& layout, const std::vector<std::size_t>& positions) {
  std::vector<bool> taken(layout.size(), false);
  for (std::size_t p : positions) {
    if (p >= layout.size()) {
      throw std::invalid_argument("subsystem position out of range");
    }
    if (taken[p]) throw std::invalid_argument("duplicate subsystem position");
    taken[p] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (!taken[k]) rest.push_back(k);
  }
  return rest;
}

inline void require_strictly_increasing(const std::vector<std::size_t>& v,
                                        const char* what) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] <= v[k - 1]) {
      throw std::invalid_argument(std::string(what) +
                                  ": positions must be strictly increasing");
    }
  }
}

}  // namespace detail

// Applies op to the listed subsystems of an amplitude vector. The operator's
// digit order follows the targets list (first target = most significant
// operator digit), so a 4x4 controlled gate's control is targets[0]. op need
// not be unitary; this is also the workhorse for gradient computations.
inline Eigen::VectorXcd vector_apply(const SubsystemLayout& layout,
                                     const Eigen::VectorXcd& amps,
                                     const Eigen::MatrixXcd& op,
                                     const std::vector<std::size_t>& targets) {
  if (amps.size() != layout.total_dim()) {
    throw std::invalid_argument("vector_apply: amplitude size mismatch");
  }
  const auto rest = detail::complement_positions(layout, targets);
  const auto off_t = detail::subset_offsets(layout, targets);
  const auto off_r = detail::subset_offsets(layout, rest);
  const auto dim_t = static_cast<Eigen::Index>(off_t.size());
  if (op.rows() != dim_t || op.cols() != dim_t) {
    throw std::invalid_argument("vector_apply: operator dimension mismatch");
  }
  Eigen::VectorXcd out(amps.size());
  Eigen::VectorXcd slot(dim_t);
  for (Eigen::Index r_off : off_r) {
    for (Eigen::Index s = 0; s < dim_t; ++s) slot(s) = amps(r_off + off_t[s]);
    slot = (op * slot).eval();
    for (Eigen::Index s = 0; s < dim_t; ++s) out(r_off + off_t[s]) = slot(s);
  }
  return out;
}

// Reduced density matrix over the kept positions (strictly increasing, so the
// result keeps the original relative order).
inline Eigen::MatrixXcd vector_partial_trace(
    const SubsystemLayout& layout, const Eigen::VectorXcd& amps,
    const std::vector<std::size_t>& keep) {
  detail::require_strictly_increasing(keep, "partial_trace");
  if (amps.size() != layout.total_dim()) {
    throw std::invalid_argument("partial_trace: amplitude size mismatch");
  }
  const auto traced = detail::complement_positions(layout, keep);
  const auto off_k = detail::subset_offsets(layout, keep);
  const auto off_e = detail::subset_offsets(layout, traced);
  const auto dim_k = static_cast<Eigen::Index>(off_k.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_k, dim_k);
  for (Eigen::Index e_off : off_e) {
    for (Eigen::Index i = 0; i < dim_k; ++i) {
      const Complex ai = amps(off_k[i] + e_off);
      if (ai == Complex(0.0, 0.0)) continue;
      for (Eigen::Index j = 0; j < dim_k; ++j) {
        rho(i, j) += ai * std::conj(amps(off_k[j] + e_off));
      }
    }
  }
  return rho;
}

// Pure state with subsystem bookkeeping. Amplitudes are unit norm.
struct PartitionedState {
  Eigen::VectorXcd amplitudes;
  SubsystemLayout layout;

  PartitionedState(Eigen::VectorXcd amps, SubsystemLayout lay,
                   double norm_tol = tol::norm)
      : amplitudes(std::move(amps)), layout(std::move(lay)) {
    if (amplitudes.size() != layout.total_dim()) {
      throw std::invalid_argument(
          "PartitionedState: amplitude count does not match layout dimension");
    }
    if (std::abs(amplitudes.norm() - 1.0) > norm_tol) {
      throw std::invalid_argument("PartitionedState: state is not normalized");
    }
  }

  static PartitionedState normalized(Eigen::VectorXcd amps,
                                     SubsystemLayout lay) {
    const double n = amps.norm();
    if (n == 0.0) {
      throw std::invalid_argument("PartitionedState: zero vector");
    }
    return PartitionedState(amps / n, std::move(lay));
  }
};

// Mixed state with subsystem bookkeeping. Hermitian, unit trace.
struct DensityOperator {
  Eigen::MatrixXcd matrix;
  SubsystemLayout layout;

  DensityOperator(Eigen::MatrixXcd m, SubsystemLayout lay,
                  double herm_tol = tol::hermitian,
                  double trace_tol = tol::trace)
      : matrix(std::move(m)), layout(std::move(lay)) {
    if (matrix.rows() != matrix.cols() ||
        matrix.rows() != layout.total_dim()) {
      throw std::invalid_argument(
          "DensityOperator: matrix shape does not match layout dimension");
    }
    const double herm_err =
        (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > herm_tol) {
      throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
    }
    if (std::abs(matrix.trace() - Complex(1.0, 0.0)) > trace_tol) {
      throw std::invalid_argument("DensityOperator: trace is not 1");
    }
  }

  // Smallest eigenvalue; callers assert >= -tol::psd when they need strict
  // positivity (kept out of the constructor to keep plumbing cheap).
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

inline DensityOperator to_density(const PartitionedState& psi) {
  return DensityOperator(psi.amplitudes * psi.amplitudes.adjoint(),
                         psi.layout);
}

inline PartitionedState basis_state(const SubsystemLayout& layout,
                                    const std::vector<Eigen::Index>& digits) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(layout.total_dim());
  amps(layout.compose(digits)) = 1.0;
  return PartitionedState(std::move(amps), layout);
}

inline PartitionedState tensor(const PartitionedState& a,
                               const PartitionedState& b) {
  Eigen::VectorXcd out(a.amplitudes.size() * b.amplitudes.size());
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i) {
    out.segment(i * b.amplitudes.size(), b.amplitudes.size()) =
        a.amplitudes(i) * b.amplitudes;
  }
  return PartitionedState(std::move(out), a.layout.concatenated(b.layout));
}

inline DensityOperator tensor(const DensityOperator& a,
                              const DensityOperator& b) {
  const Eigen::Index da = a.matrix.rows(), db = b.matrix.rows();
  Eigen::MatrixXcd out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a.matrix(i, j) * b.matrix;
    }
  }
  return DensityOperator(std::move(out), a.layout.concatenated(b.layout));
}

inline DensityOperator partial_trace(const PartitionedState& psi,
                                     const std::vector<std::size_t>& keep) {
  return DensityOperator(vector_partial_trace(psi.layout, psi.amplitudes, keep),
                         psi.layout.select(keep));
}

inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<std::size_t>& keep) {
  detail::require_strictly_increasing(keep, "partial_trace");
  const auto traced = detail::complement_positions(rho.layout, keep);
  const auto off_k = detail::subset_offsets(rho.layout, keep);
  const auto off_e = detail::subset_offsets(rho.layout, traced);
  const auto dim_k = static_cast<Eigen::Index>(off_k.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_k, dim_k);
  for (Eigen::Index e_off : off_e) {
    for (Eigen::Index i = 0; i < dim_k; ++i) {
      for (Eigen::Index j = 0; j < dim_k; ++j) {
        out(i, j) += rho.matrix(off_k[i] + e_off, off_k[j] + e_off);
      }
    }
  }
  return DensityOperator(std::move(out), rho.layout.select(keep));
}

inline PartitionedState apply_operator(const PartitionedState& psi,
                                       const Eigen::MatrixXcd& op,
                                       const std::vector<std::size_t>& targets) {
  return PartitionedState(
      vector_apply(psi.layout, psi.amplitudes, op, targets), psi.layout);
}

// op rho op^dagger for a unitary op on the targeted subsystems.
inline DensityOperator apply_operator(const DensityOperator& rho,
                                      const Eigen::MatrixXcd& op,
                                      const std::vector<std::size_t>& targets) {
  const Eigen::Index n = rho.matrix.rows();
  Eigen::MatrixXcd left(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    left.col(j) = vector_apply(rho.layout, rho.matrix.col(j), op, targets);
  }
  const Eigen::MatrixXcd left_adj = left.adjoint();
  Eigen::MatrixXcd out_adj(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out_adj.col(j) = vector_apply(rho.layout, left_adj.col(j), op, targets);
  }
  return DensityOperator(out_adj.adjoint(), rho.layout);
}

// Base-2 von Neumann entropy. Eigenvalues at or below the clamp contribute
// zero, which regularizes 0 log 0 and shields the log against tiny negative
// eigenvalues produced by finite-precision partial traces.
inline double von_neumann_entropy(const Eigen::MatrixXcd& rho,
                                  double clamp = tol::eig_clamp) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                     Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > clamp) s -= lam * std::log2(lam);
  }
  return s;
}

inline double von_neumann_entropy(const DensityOperator& rho,
                                  double clamp = tol::eig_clamp) {
  return von_neumann_entropy(rho.matrix, clamp);
}

// Entropy of either party's marginal (they agree for pure states).
inline double entanglement_entropy(const PartitionedState& psi,
                                   double clamp = tol::eig_clamp) {
  const auto alice = psi.layout.party_indices(Party::alice);
  if (alice.empty() || alice.size() == psi.layout.size()) {
    return 0.0;
  }
  return von_neumann_entropy(
      vector_partial_trace(psi.layout, psi.amplitudes, alice), clamp);
}

inline double fidelity_pure_mixed(const PartitionedState& psi,
                                  const DensityOperator& rho) {
  if (psi.amplitudes.size() != rho.matrix.rows()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  const Complex val = psi.amplitudes.adjoint() * rho.matrix * psi.amplitudes;
  return std::max(0.0, val.real());
}

// Trace distance without the 1/2 factor: T(rho, sigma) = Tr |rho - sigma|,
// so orthogonal pure states are at distance 2.
inline double trace_distance(const DensityOperator& rho,
                             const DensityOperator& sigma) {
  if (rho.matrix.rows() != sigma.matrix.rows()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      rho.matrix - sigma.matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// Pure-state special case via the overlap, avoiding the eigensolve:
// T = 2 sqrt(1 - |<a|b>|^2).
inline double trace_distance(const PartitionedState& a,
                             const PartitionedState& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  const double overlap_sq =
      std::norm(Complex(a.amplitudes.adjoint() * b.amplitudes));
  return 2.0 * std::sqrt(std::max(0.0, 1.0 - overlap_sq));
}

// Entropy-difference bound T log2(D) + eta(T) with eta(x) = -x log2(x).
// Valid only on 0 <= T <= 1/e where eta is monotone.
inline double fannes_bound(double t_dist, Eigen::Index dim) {
  if (dim < 2) throw std::invalid_argument("fannes_bound: dimension must be >= 2");
  if (t_dist < 0.0 || t_dist > 1.0 / std::exp(1.0)) {
    throw std::domain_error("fannes_bound: requires 0 <= T <= 1/e");
  }
  const double eta = t_dist > 0.0 ? -t_dist * std::log2(t_dist) : 0.0;
  return t_dist * std::log2(static_cast<double>(dim)) + eta;
}

struct SchmidtDecomposition {
  // Squared singular values, descending; length min(dim_A, dim_B); sums to 1.
  Eigen::VectorXd values;
  // Full orthonormal bases (dim_A x dim_A, dim_B x dim_B). The state equals
  // sum_i sqrt(values[i]) alice_basis.col(i) (x) bob_basis.col(i) over the
  // party subsystems in their original relative order; extra columns complete
  // the bases, which conditional-conjugation constructions rely on.
  Eigen::MatrixXcd alice_basis;
  Eigen::MatrixXcd bob_basis;
  std::vector<std::size_t> alice_positions;
  std::vector<std::size_t> bob_positions;
};

inline SchmidtDecomposition schmidt_decompose(const PartitionedState& psi) {
  const auto a_pos = psi.layout.party_indices(Party::alice);
  const auto b_pos = psi.layout.party_indices(Party::bob);
  const auto off_a = detail::subset_offsets(psi.layout, a_pos);
  const auto off_b = detail::subset_offsets(psi.layout, b_pos);
  const auto dim_a = static_cast<Eigen::Index>(off_a.size());
  const auto dim_b = static_cast<Eigen::Index>(off_b.size());
  Eigen::MatrixXcd mat(dim_a, dim_b);
  for (Eigen::Index i = 0; i < dim_a; ++i) {
    for (Eigen::Index j = 0; j < dim_b; ++j) {
      mat(i, j) = psi.amplitudes(off_a[i] + off_b[j]);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SchmidtDecomposition out;
  out.values = svd.singularValues().array().square();
  out.alice_basis = svd.matrixU();
  out.bob_basis = svd.matrixV().conjugate();
  out.alice_positions = a_pos;
  out.bob_positions = b_pos;
  return out;
}

inline PartitionedState conjugate(const PartitionedState& psi) {
  return PartitionedState(psi.amplitudes.conjugate(), psi.layout);
}

inline DensityOperator conjugate(const DensityOperator& rho) {
  return DensityOperator(rho.matrix.conjugate(), rho.layout);
}

// Pauli matrices, sigma_0 = identity.
inline const Eigen::Matrix2cd& pauli(int k) {
  static const std::array<Eigen::Matrix2cd, 4> sigma = [] {
    std::array<Eigen::Matrix2cd, 4> s;
    const Complex i(0.0, 1.0);
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -i, i, 0;
    s[3] << 1, 0, 0, -1;
    return s;
  }();
  if (k < 0 || k > 3) throw std::invalid_argument("pauli: index out of range");
  return sigma[static_cast<std::size_t>(k)];
}

}  // namespace gatecap
