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

#include <array>
#include <cmath>
#include <random>

#include "gatecap/qmath.hpp"

namespace gatecap {

// Two-qubit unitary on (Alice qubit, Bob qubit); the Alice qubit is the most
// significant index, so a controlled gate's control is Alice's side.
struct Gate {
  Eigen::Matrix4cd matrix;

  explicit Gate(Eigen::Matrix4cd m, double unitary_tol = tol::unitary)
      : matrix(std::move(m)) {
    const double err =
        (matrix.adjoint() * matrix - Eigen::Matrix4cd::Identity())
            .cwiseAbs()
            .maxCoeff();
    if (err > unitary_tol) {
      throw std::invalid_argument("Gate: matrix is not unitary");
    }
  }
};

inline Gate conjugate(const Gate& g) { return Gate(g.matrix.conjugate()); }

inline PartitionedState apply_gate(const PartitionedState& psi, const Gate& g,
                                   std::size_t alice_qubit,
                                   std::size_t bob_qubit) {
  return apply_operator(psi, g.matrix, {alice_qubit, bob_qubit});
}

namespace detail {

inline Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a,
                              const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
  }
  return out;
}

// Bell-like basis in which every sigma_k (x) sigma_k is diagonal. Columns in
// the computational basis |00>, |01>, |10>, |11>:
//   m0 = (|00> + |11>)/sqrt2        m1 = -i(|00> - |11>)/sqrt2
//   m2 = (|01> - |10>)/sqrt2        m3 = -i(|01> + |10>)/sqrt2
inline const Eigen::Matrix4cd& magic_basis() {
  static const Eigen::Matrix4cd m = [] {
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    Eigen::Matrix4cd out;
    out << s, -i * s, 0, 0,
           0, 0, s, -i * s,
           0, 0, -s, -i * s,
           s, i * s, 0, 0;
    return out;
  }();
  return m;
}

// Eigenvalue of sigma_k (x) sigma_k on magic column c: kMagicSign[k][c].
inline constexpr int kMagicSign[3][4] = {
    {1, -1, -1, 1},
    {-1, 1, -1, 1},
    {1, 1, -1, -1},
};

// Orthogonal basis diagonalizing two commuting real symmetric matrices.
// Three refinement passes keep the result accurate when either spectrum has
// close eigenvalues: eigensolve A, re-diagonalize B inside each cluster of
// near-equal A eigenvalues, then re-diagonalize A inside each nested cluster
// of near-equal B eigenvalues. Only genuinely joint-degenerate subspaces are
// left to the solver's deterministic internal choice.
inline Eigen::Matrix4d simultaneous_diagonalize(const Eigen::Matrix4d& a,
                                                const Eigen::Matrix4d& b) {
  constexpr double cluster_tol = 1e-5;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(a);
  Eigen::Matrix4d basis = es.eigenvectors();

  const auto rotate_block = [&basis](int start, int width,
                                     const Eigen::Matrix4d& target) {
    const Eigen::MatrixXd block = basis.middleCols(start, width);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sub(
        (block.transpose() * target * block).eval());
    basis.middleCols(start, width) = block * sub.eigenvectors();
  };

  const Eigen::Vector4d a_keys = es.eigenvalues();
  int start = 0;
  while (start < 4) {
    int stop = start + 1;
    while (stop < 4 && std::abs(a_keys(stop) - a_keys(stop - 1)) <= cluster_tol) {
      ++stop;
    }
    const int width = stop - start;
    if (width > 1) {
      rotate_block(start, width, b);
      // Inside the A cluster the B eigenvalues are now sorted; repair any A
      // mixing that a degenerate B block may have introduced.
      const Eigen::VectorXd b_keys =
          (basis.middleCols(start, width).transpose() * b *
           basis.middleCols(start, width))
              .diagonal();
      int sub_start = 0;
      while (sub_start < width) {
        int sub_stop = sub_start + 1;
        while (sub_stop < width && std::abs(b_keys(sub_stop) -
                                            b_keys(sub_stop - 1)) <=
                                       cluster_tol) {
          ++sub_stop;
        }
        if (sub_stop - sub_start > 1) {
          rotate_block(start + sub_start, sub_stop - sub_start, a);
        }
        sub_start = sub_stop;
      }
    }
    start = stop;
  }
  return basis;
}

struct KronSplit {
  Eigen::Matrix2cd first;
  Eigen::Matrix2cd second;
  double residual;
};

// Factor a 4x4 matrix into a Kronecker product of 2x2 factors. Exact (up to
// rounding) whenever the input is a product; residual reports the rank-1
// defect of the rearranged matrix. The first factor's largest entry is made
// real positive to pin the balanced phase split.
inline KronSplit kron_factor(const Eigen::Matrix4cd& m) {
  Eigen::Matrix4cd r;
  for (int a = 0; a < 2; ++a) {
    for (int c = 0; c < 2; ++c) {
      for (int b = 0; b < 2; ++b) {
        for (int d = 0; d < 2; ++d) {
          r(2 * a + c, 2 * b + d) = m(2 * a + b, 2 * c + d);
        }
      }
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(
      r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double s0 = svd.singularValues()(0);
  Eigen::Vector4cd va = svd.matrixU().col(0) * std::sqrt(s0);
  Eigen::Vector4cd vb = svd.matrixV().col(0).conjugate() * std::sqrt(s0);

  int lead = 0;
  for (int k = 1; k < 4; ++k) {
    if (std::abs(va(k)) > std::abs(va(lead))) lead = k;
  }
  const Complex u = va(lead) / std::abs(va(lead));
  va /= u;
  vb *= u;

  KronSplit out;
  out.first << va(0), va(1), va(2), va(3);
  out.second << vb(0), vb(1), vb(2), vb(3);
  out.residual = svd.singularValues().tail<3>().norm();
  return out;
}

}  // namespace detail

// exp(-i sum_k alpha_k sigma_k (x) sigma_k), evaluated in closed form through
// the magic basis where each sigma_k (x) sigma_k is diagonal.
inline Gate make_ud(double a1, double a2, double a3) {
  const Eigen::Matrix4cd& m = detail::magic_basis();
  Eigen::Vector4cd phases;
  const std::array<double, 3> alphas{a1, a2, a3};
  for (int c = 0; c < 4; ++c) {
    double phi = 0.0;
    for (int k = 0; k < 3; ++k) phi += alphas[k] * detail::kMagicSign[k][c];
    phases(c) = std::exp(Complex(0.0, -phi));
  }
  return Gate(m * phases.asDiagonal() * m.adjoint());
}

inline Gate make_ud(const std::array<double, 3>& a) {
  return make_ud(a[0], a[1], a[2]);
}

// U = phase * (post_alice (x) post_bob) * U_d(alphas) * (pre_alice (x) pre_bob)
// with pi/4 >= alphas[0] >= alphas[1] >= |alphas[2]| (alphas[2] may be
// negative; it is flipped nonnegative on the alphas[0] = pi/4 boundary where
// both signs are equivalent).
struct CanonicalForm {
  std::array<double, 3> alphas{};
  Eigen::Matrix2cd pre_alice, pre_bob, post_alice, post_bob;
  Complex phase{1.0, 0.0};

  Eigen::Matrix4cd reconstruct() const {
    return phase * detail::kron2(post_alice, post_bob) *
           make_ud(alphas).matrix * detail::kron2(pre_alice, pre_bob);
  }
};

// Local-equivalence fingerprint: invariant under single-qubit rotations on
// either side. First component is complex, second real.
struct LocalInvariants {
  Complex g1;
  double g2;
};

inline LocalInvariants local_invariants(const Gate& gate) {
  const Eigen::Matrix4cd& mb = detail::magic_basis();
  const Eigen::Matrix4cd v = mb.adjoint() * gate.matrix * mb;
  const Eigen::Matrix4cd m = v.transpose() * v;
  const Complex det = gate.matrix.determinant();
  const Complex tr = m.trace();
  const Complex g1 = tr * tr / (16.0 * det);
  const Complex g2 = (tr * tr - (m * m).trace()) / (4.0 * det);
  return LocalInvariants{g1, g2.real()};
}

namespace detail {

// State threaded through the Weyl-chamber normalization moves. Every move
// rewrites post * U_d(alphas) * pre (and phase) without changing the product.
struct Canonicalizer {
  std::array<double, 3> alphas;
  Eigen::Matrix4cd pre, post;
  Complex phase;

  // alpha_k -> alpha_k -+ pi/2; exp(-i (pi/2) sigma sigma) is the local
  // sigma_k (x) sigma_k up to the tracked -+i.
  void shift(int k, int direction) {
    const Eigen::Matrix4cd ss = kron2(pauli(k + 1), pauli(k + 1));
    alphas[static_cast<std::size_t>(k)] +=
        direction * (std::acos(-1.0) / 2.0);
    post = post * ss;
    phase *= Complex(0.0, direction > 0 ? 1.0 : -1.0);
  }

  // Swap alphas[k] and alphas[l] by conjugating with a quarter rotation about
  // the remaining axis on both qubits (no sign change on any alpha).
  void swap_axes(int k, int l) {
    const int m = 3 - k - l;  // remaining 0-based axis
    const Eigen::Matrix2cd rot =
        (Eigen::Matrix2cd::Identity() - Complex(0.0, 1.0) * pauli(m + 1)) /
        std::sqrt(2.0);
    const Eigen::Matrix4cd rr = kron2(rot, rot);
    post = post * rr.adjoint();
    pre = rr * pre;
    std::swap(alphas[static_cast<std::size_t>(k)],
              alphas[static_cast<std::size_t>(l)]);
  }

  // Negate alphas[k] and alphas[l] by conjugating with sigma_m on Alice only.
  void flip_pair(int k, int l) {
    const int m = 3 - k - l;
    const Eigen::Matrix4cd s =
        kron2(pauli(m + 1), Eigen::Matrix2cd::Identity());
    post = post * s;
    pre = s * pre;
    alphas[static_cast<std::size_t>(k)] *= -1.0;
    alphas[static_cast<std::size_t>(l)] *= -1.0;
  }

  void run() {
    const double quarter = std::acos(-1.0) / 4.0;
    for (int k = 0; k < 3; ++k) {
      while (alphas[static_cast<std::size_t>(k)] > quarter) shift(k, -1);
      while (alphas[static_cast<std::size_t>(k)] <= -quarter) shift(k, +1);
    }
    const auto abs_at = [&](int k) {
      return std::abs(alphas[static_cast<std::size_t>(k)]);
    };
    int lead = 0;
    for (int k = 1; k < 3; ++k) {
      if (abs_at(k) > abs_at(lead)) lead = k;
    }
    if (lead != 0) swap_axes(0, lead);
    if (abs_at(2) > abs_at(1)) swap_axes(1, 2);

    if (alphas[0] < 0.0 && alphas[1] < 0.0) {
      flip_pair(0, 1);
    } else if (alphas[0] < 0.0) {
      flip_pair(0, 2);
    } else if (alphas[1] < 0.0) {
      flip_pair(1, 2);
    }

    // On the alphas[0] = pi/4 boundary the sign of alphas[2] is a gauge
    // choice; fix it nonnegative there.
    if (alphas[0] > quarter - 1e-12 && alphas[2] < 0.0) {
      shift(0, -1);
      flip_pair(0, 2);
    }
  }
};

}  // namespace detail

// Canonical (Weyl-chamber) decomposition. Deterministic for identical input;
// the reconstruction identity is verified to 1e-9 in Frobenius norm before
// returning.
inline CanonicalForm decompose(const Gate& gate) {
  const Eigen::Matrix4cd& mb = detail::magic_basis();

  // Remove the global phase so det V = 1, then express U in the magic basis
  // where local unitaries are real orthogonal.
  const Complex det_u = gate.matrix.determinant();
  const double phi0 = std::arg(det_u) / 4.0;
  const Complex global = std::exp(Complex(0.0, phi0));
  const Eigen::Matrix4cd v =
      mb.adjoint() * (gate.matrix / global) * mb;

  // gamma = V^T V is unitary symmetric; its real and imaginary parts commute,
  // so a real orthogonal basis diagonalizes both.
  const Eigen::Matrix4cd gamma = v.transpose() * v;
  Eigen::Matrix4d re = gamma.real();
  Eigen::Matrix4d im = gamma.imag();
  re = ((re + re.transpose()) / 2.0).eval();
  im = ((im + im.transpose()) / 2.0).eval();
  Eigen::Matrix4d basis = detail::simultaneous_diagonalize(re, im);
  if (basis.determinant() < 0.0) basis.col(3) *= -1.0;

  const Eigen::Matrix4cd diag = basis.transpose() * gamma * basis;
  double offdiag = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) offdiag = std::max(offdiag, std::abs(diag(i, j)));
    }
  }
  if (offdiag > 1e-8) {
    throw std::runtime_error(
        "decompose: failed to diagonalize the magic-basis Gram matrix");
  }

  // Half the eigenvalue arguments, with the sum steered to zero so that the
  // orthogonal factors both land in SO(4) and split into local unitaries.
  std::array<double, 4> theta{};
  for (int k = 0; k < 4; ++k) {
    theta[static_cast<std::size_t>(k)] = std::arg(diag(k, k)) / 2.0;
  }
  const double pi = std::acos(-1.0);
  const double sum = theta[0] + theta[1] + theta[2] + theta[3];
  theta[0] -= pi * std::round(sum / pi);

  Eigen::Vector4cd f_diag;
  for (int k = 0; k < 4; ++k) {
    f_diag(k) = std::exp(Complex(0.0, theta[static_cast<std::size_t>(k)]));
  }
  const Eigen::Matrix4cd p =
      v * basis * f_diag.cwiseInverse().asDiagonal();

  detail::Canonicalizer canon;
  canon.alphas = {(theta[1] + theta[2]) / 2.0, (theta[0] + theta[2]) / 2.0,
                  (theta[2] + theta[3]) / 2.0};
  canon.post = mb * p * mb.adjoint();
  canon.pre = mb * basis.transpose() * mb.adjoint();
  canon.phase = global;
  canon.run();

  const auto post_split = detail::kron_factor(canon.post);
  const auto pre_split = detail::kron_factor(canon.pre);

  CanonicalForm out;
  out.alphas = canon.alphas;
  out.post_alice = post_split.first;
  out.post_bob = post_split.second;
  out.pre_alice = pre_split.first;
  out.pre_bob = pre_split.second;
  out.phase = canon.phase;

  const double residual =
      (out.reconstruct() - gate.matrix).norm();
  if (residual > 1e-9) {
    throw std::runtime_error("decompose: reconstruction residual " +
                             std::to_string(residual) + " exceeds 1e-9");
  }
  return out;
}

namespace gates {

inline Gate identity() { return Gate(Eigen::Matrix4cd::Identity()); }

inline Gate cnot() {
  Eigen::Matrix4cd m;
  m << 1, 0, 0, 0,
       0, 1, 0, 0,
       0, 0, 0, 1,
       0, 0, 1, 0;
  return Gate(m);
}

inline Gate swap() {
  Eigen::Matrix4cd m;
  m << 1, 0, 0, 0,
       0, 0, 1, 0,
       0, 1, 0, 0,
       0, 0, 0, 1;
  return Gate(m);
}

// Haar-distributed gate: QR of a complex Gaussian matrix with the diagonal of
// R phase-fixed, seeded and reproducible.
inline Gate haar_random(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix4cd g;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      g(i, j) = Complex(normal(rng), normal(rng));
    }
  }
  const Eigen::HouseholderQR<Eigen::Matrix4cd> qr(g);
  Eigen::Matrix4cd q = qr.householderQ();
  const Eigen::Matrix4cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < 4; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0, 0.0);
  }
  return Gate(q);
}

}  // namespace gates

}  // namespace gatecap
