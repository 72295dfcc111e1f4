// Copyright 2026 The luq authors
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
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "luq/tolerance.hpp"

namespace luq {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;
using MatrixX = Eigen::MatrixXcd;

constexpr int kMaxQubits = 12;

/// Bit of qubit `q` (1-based, qubit 1 = most significant) in basis index `x`.
inline int bit_of(std::uint32_t x, int q, int n) { return (x >> (n - q)) & 1u; }

/// Basis index with the bit of qubit `q` forced to `b`.
inline std::uint32_t with_bit(std::uint32_t x, int q, int n, int b) {
  std::uint32_t m = 1u << (n - q);
  return b ? (x | m) : (x & ~m);
}

/// Insert bit `b` for qubit `q` into an (n-1)-qubit index `e`, producing an
/// n-qubit index. The remaining qubits keep their relative order.
inline std::uint32_t insert_bit(std::uint32_t e, int q, int n, int b) {
  std::uint32_t low_mask = (n - q) ? ((1u << (n - q)) - 1u) : 0u;
  std::uint32_t high = e >> (n - q);
  std::uint32_t low = e & low_mask;
  return (((high << 1) | std::uint32_t(b)) << (n - q)) | low;
}

/// Render a basis index as a bitstring, qubit 1 first.
inline std::string bitstring(std::uint32_t x, int n) {
  std::string s(n, '0');
  for (int q = 1; q <= n; ++q) s[q - 1] = char('0' + bit_of(x, q, n));
  return s;
}

/// An n-qubit pure state. Amplitudes are stored in computational-basis order
/// with qubit 1 as the most significant bit, so lexicographic order on
/// bitstrings equals numeric order of indices.
struct PureState {
  int n = 0;
  Vector amp;
  ToleranceContext tol;

  PureState() = default;

  PureState(int n_, Vector amp_, ToleranceContext tol_ = {})
      : n(n_), amp(std::move(amp_)), tol(tol_) {
    tol.validate();
    if (n < 1 || n > kMaxQubits) {
      throw std::invalid_argument("PureState: qubit count out of range [1," +
                                  std::to_string(kMaxQubits) + "]");
    }
    if (amp.size() != (Eigen::Index(1) << n)) {
      throw std::invalid_argument("PureState: amplitude vector length must be 2^n");
    }
    double r = std::abs(amp.norm() - 1.0);
    if (r > tol.norm) {
      throw std::invalid_argument("PureState: vector not normalized (residual " +
                                  std::to_string(r) + ")");
    }
  }

  Eigen::Index dim() const { return amp.size(); }

  /// Normalize an arbitrary nonzero vector into a state.
  static PureState normalized(int n, Vector v, ToleranceContext tol = {}) {
    double nr = v.norm();
    if (nr <= tol.norm) throw std::invalid_argument("PureState: cannot normalize near-zero vector");
    return PureState(n, v / nr, tol);
  }

  /// Computational basis state |x>.
  static PureState basis(int n, std::uint32_t x, ToleranceContext tol = {}) {
    Vector v = Vector::Zero(Eigen::Index(1) << n);
    v[x] = 1.0;
    return PureState(n, std::move(v), tol);
  }
};

/// Global phase plus one 2x2 unitary per qubit; the certificate currency.
struct LocalUnitaryLayer {
  double global_phase = 0.0;  // in [0, 2*pi)
  std::vector<Matrix2> factors;

  LocalUnitaryLayer() = default;
  explicit LocalUnitaryLayer(int n)
      : global_phase(0.0), factors(size_t(n), Matrix2::Identity()) {}

  int n() const { return int(factors.size()); }

  static LocalUnitaryLayer identity(int n) { return LocalUnitaryLayer(n); }

  void validate(const ToleranceContext& tol = {}) const {
    for (const auto& u : factors) {
      if ((u * u.adjoint() - Matrix2::Identity()).cwiseAbs().maxCoeff() > tol.unitary) {
        throw std::invalid_argument("LocalUnitaryLayer: factor is not unitary");
      }
    }
  }
};

/// Layer applying `a` after `b`.
inline LocalUnitaryLayer compose(const LocalUnitaryLayer& a, const LocalUnitaryLayer& b) {
  if (a.n() != b.n()) throw std::invalid_argument("compose: layer size mismatch");
  LocalUnitaryLayer r(a.n());
  r.global_phase = wrap_angle(a.global_phase + b.global_phase);
  for (int i = 0; i < a.n(); ++i) r.factors[size_t(i)] = a.factors[size_t(i)] * b.factors[size_t(i)];
  return r;
}

inline LocalUnitaryLayer adjoint(const LocalUnitaryLayer& a) {
  LocalUnitaryLayer r(a.n());
  r.global_phase = wrap_angle(-a.global_phase);
  for (int i = 0; i < a.n(); ++i) r.factors[size_t(i)] = a.factors[size_t(i)].adjoint();
  return r;
}

/// Reduced density matrix of an ordered subsystem. `labels[0]` is the most
/// significant bit of the row index.
struct HermitianReduced {
  std::vector<int> labels;
  MatrixX mat;

  Eigen::Index dim() const { return mat.rows(); }
};

namespace detail {

/// Apply a 2x2 matrix to qubit q of a raw amplitude vector.
inline void apply_single(const Matrix2& u, int q, int n, Vector& v) {
  const std::uint32_t m = 1u << (n - q);
  const std::uint32_t dim = std::uint32_t(v.size());
  for (std::uint32_t x = 0; x < dim; ++x) {
    if (x & m) continue;
    Complex a0 = v[x];
    Complex a1 = v[x | m];
    v[x] = u(0, 0) * a0 + u(0, 1) * a1;
    v[x | m] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

inline void check_qubit_index(int q, int n, const char* who) {
  if (q < 1 || q > n) throw std::invalid_argument(std::string(who) + ": qubit index out of range");
}

}  // namespace detail

/// Apply e^{i phase} (x) U_1 (x) ... (x) U_n to a state.
inline PureState apply_layer(const LocalUnitaryLayer& layer, const PureState& state) {
  if (layer.n() != state.n) throw std::invalid_argument("apply_layer: layer size mismatch");
  Vector v = state.amp;
  for (int q = 1; q <= state.n; ++q) detail::apply_single(layer.factors[size_t(q - 1)], q, state.n, v);
  v *= std::polar(1.0, layer.global_phase);
  double r = std::abs(v.norm() - 1.0);
  if (r > state.tol.norm) {
    throw std::invalid_argument("apply_layer: norm not preserved; layer factors not unitary?");
  }
  PureState out;
  out.n = state.n;
  out.amp = std::move(v);
  out.tol = state.tol;
  return out;
}

/// Conjugate a density matrix by a layer: L rho L^dag (global phase cancels).
inline MatrixX apply_layer_density(const LocalUnitaryLayer& layer, const MatrixX& rho, int n) {
  if (layer.n() != n || rho.rows() != (Eigen::Index(1) << n) || rho.rows() != rho.cols()) {
    throw std::invalid_argument("apply_layer_density: size mismatch");
  }
  MatrixX out = rho;
  for (int q = 1; q <= n; ++q) {
    const Matrix2& u = layer.factors[size_t(q - 1)];
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      Vector col = out.col(c);
      detail::apply_single(u, q, n, col);
      out.col(c) = col;
    }
    Matrix2 uc = u.conjugate();
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      Vector row = out.row(r).transpose();
      detail::apply_single(uc, q, n, row);
      out.row(r) = row.transpose();
    }
  }
  return out;
}

/// <a|b>.
inline Complex overlap(const PureState& a, const PureState& b) {
  if (a.n != b.n) throw std::invalid_argument("overlap: size mismatch");
  return a.amp.dot(b.amp);
}

/// Partial trace over the complement of `keep`. Direct double summation:
/// rho[r][s] = sum_e amp[(r,e)] * conj(amp[(s,e)]), with the kept qubits laid
/// out in the order given (keep[0] = most significant).
inline HermitianReduced partial_trace(const PureState& state, const std::vector<int>& keep) {
  const int n = state.n;
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<char> seen(size_t(n) + 1, 0);
  for (int q : keep) {
    detail::check_qubit_index(q, n, "partial_trace");
    if (seen[size_t(q)]++) throw std::invalid_argument("partial_trace: duplicate qubit index");
  }
  const int k = int(keep.size());
  std::vector<int> rest;
  for (int q = 1; q <= n; ++q) {
    if (!seen[size_t(q)]) rest.push_back(q);
  }
  const std::uint32_t kd = 1u << k;
  const std::uint32_t rd = 1u << (n - k);
  MatrixX rho = MatrixX::Zero(kd, kd);
  Vector block(kd);
  for (std::uint32_t e = 0; e < rd; ++e) {
    std::uint32_t base = 0;
    for (int j = 0; j < n - k; ++j) {
      if ((e >> (n - k - 1 - j)) & 1u) base |= 1u << (n - rest[size_t(j)]);
    }
    for (std::uint32_t r = 0; r < kd; ++r) {
      std::uint32_t idx = base;
      for (int j = 0; j < k; ++j) {
        if ((r >> (k - 1 - j)) & 1u) idx |= 1u << (n - keep[size_t(j)]);
      }
      block[r] = state.amp[idx];
    }
    rho.noalias() += block * block.adjoint();
  }
  return HermitianReduced{keep, std::move(rho)};
}

/// Result of projecting qubit `i` onto |l>: the normalized remaining state
/// (absent when the branch has no weight) and the branch probability.
struct ConditionalBranch {
  bool empty = true;
  PureState state;   // valid only when !empty
  double weight = 0.0;
};

/// Normalized <l|_i Psi> together with its squared norm.
inline ConditionalBranch conditional_state(const PureState& state, int qubit, int outcome) {
  const int n = state.n;
  if (n < 2) throw std::invalid_argument("conditional_state: requires n >= 2");
  detail::check_qubit_index(qubit, n, "conditional_state");
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("conditional_state: outcome must be 0 or 1");
  const std::uint32_t rd = 1u << (n - 1);
  Vector sub(rd);
  for (std::uint32_t e = 0; e < rd; ++e) sub[e] = state.amp[insert_bit(e, qubit, n, outcome)];
  ConditionalBranch br;
  br.weight = sub.squaredNorm();
  if (br.weight <= state.tol.norm) {
    br.weight = 0.0;
    return br;
  }
  br.empty = false;
  br.state = PureState(n - 1, sub / std::sqrt(br.weight), state.tol);
  return br;
}

/// Unnormalized block <bits|_systems Psi> over the remaining qubits.
/// `systems` must be distinct; bit j of `bits` (msb-first) belongs to
/// systems[j]. Remaining qubits keep ascending order.
inline Vector project_systems(const PureState& state, const std::vector<int>& systems,
                              std::uint32_t bits) {
  const int n = state.n;
  const int l = int(systems.size());
  std::vector<char> in_sys(size_t(n) + 1, 0);
  for (int q : systems) {
    detail::check_qubit_index(q, n, "project_systems");
    if (in_sys[size_t(q)]++) throw std::invalid_argument("project_systems: duplicate qubit index");
  }
  if (l >= n) throw std::invalid_argument("project_systems: must leave at least one qubit");
  std::uint32_t base = 0;
  for (int j = 0; j < l; ++j) {
    if ((bits >> (l - 1 - j)) & 1u) base |= 1u << (n - systems[size_t(j)]);
  }
  std::vector<int> rest;
  for (int q = 1; q <= n; ++q) {
    if (!in_sys[size_t(q)]) rest.push_back(q);
  }
  const std::uint32_t rd = 1u << (n - l);
  Vector out(rd);
  for (std::uint32_t e = 0; e < rd; ++e) {
    std::uint32_t idx = base;
    for (int j = 0; j < n - l; ++j) {
      if ((e >> (n - l - 1 - j)) & 1u) idx |= 1u << (n - rest[size_t(j)]);
    }
    out[e] = state.amp[idx];
  }
  return out;
}

/// tr over all but one qubit of |u><v| for raw (n_rem)-qubit vectors u, v.
/// `pos` is the 1-based position of the kept qubit within those vectors.
inline Matrix2 cross_trace_single(const Vector& u, const Vector& v, int pos, int n_rem) {
  Matrix2 x = Matrix2::Zero();
  const std::uint32_t ed = 1u << (n_rem - 1);
  for (std::uint32_t e = 0; e < ed; ++e) {
    std::uint32_t i0 = insert_bit(e, pos, n_rem, 0);
    std::uint32_t i1 = insert_bit(e, pos, n_rem, 1);
    x(0, 0) += u[i0] * std::conj(v[i0]);
    x(0, 1) += u[i0] * std::conj(v[i1]);
    x(1, 0) += u[i1] * std::conj(v[i0]);
    x(1, 1) += u[i1] * std::conj(v[i1]);
  }
  return x;
}

// Common 2x2 blocks.
inline Matrix2 pauli_x() {
  Matrix2 m;
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix2 pauli_z() {
  Matrix2 m;
  m << 1, 0, 0, -1;
  return m;
}
inline Matrix2 phase_gate(double alpha) {
  Matrix2 m = Matrix2::Identity();
  m(1, 1) = std::polar(1.0, alpha);
  return m;
}

}  // namespace luq
