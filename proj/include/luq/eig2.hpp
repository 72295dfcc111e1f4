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

#include <cmath>

#include "luq/state.hpp"

namespace luq {

/// Spectral data of a 2x2 Hermitian matrix with a fixed, deterministic
/// eigenvector phase convention. `diagonalizer` W satisfies
/// W * H * W^dag = diag(lambda1, lambda2) with lambda1 >= lambda2.
struct Spectrum2 {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Matrix2 diagonalizer = Matrix2::Identity();
  bool degenerate = false;

  double gap() const { return lambda1 - lambda2; }
};

namespace detail {

/// Phase convention: scale the unit vector so its largest-magnitude component
/// is real and positive; on a magnitude tie (within 1e-12) use the first
/// component.
inline void fix_eigvec_phase(Eigen::Vector2cd& v) {
  int idx = (std::abs(v[1]) - std::abs(v[0]) > 1e-12) ? 1 : 0;
  double m = std::abs(v[idx]);
  if (m > 0) v *= std::conj(v[idx]) / m;
}

}  // namespace detail

/// Closed-form eigendecomposition of a 2x2 Hermitian matrix.
///
/// Eigenvalues come from the quadratic formula in its cancellation-free
/// arrangement; the eigenvector for lambda1 is taken from the better
/// conditioned of the two analytic expressions and the second is its exact
/// orthogonal complement. The result is bitwise deterministic.
inline Spectrum2 eig_hermitian2(const Matrix2& h, const ToleranceContext& tol = {}) {
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol.hermitian) {
    throw std::invalid_argument("eig_hermitian2: matrix is not Hermitian within tolerance");
  }
  const double a = h(0, 0).real();
  const double c = h(1, 1).real();
  const Complex b = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
  const double mean = 0.5 * (a + c);
  const double half = std::hypot(0.5 * (a - c), std::abs(b));

  Spectrum2 s;
  s.lambda1 = mean + half;
  s.lambda2 = mean - half;
  s.degenerate = (s.lambda1 - s.lambda2) <= tol.degeneracy;

  const double scale = 1.0 + std::abs(a) + std::abs(c);
  if (std::abs(b) < 1e-18 * scale) {
    // Diagonal input: eigenvectors are basis vectors, ordered by eigenvalue.
    if (a >= c) {
      s.diagonalizer = Matrix2::Identity();
    } else {
      s.diagonalizer = pauli_x();
    }
    return s;
  }

  Eigen::Vector2cd v1;
  if (a >= c) {
    v1 << Complex(s.lambda1 - c, 0.0), std::conj(b);
  } else {
    v1 << b, Complex(s.lambda1 - a, 0.0);
  }
  v1.normalize();
  detail::fix_eigvec_phase(v1);
  Eigen::Vector2cd v2;
  v2 << -std::conj(v1[1]), std::conj(v1[0]);
  detail::fix_eigvec_phase(v2);

  // Rows of W are the conjugated eigenvectors (bras), descending eigenvalue.
  s.diagonalizer.row(0) = v1.conjugate().transpose();
  s.diagonalizer.row(1) = v2.conjugate().transpose();
  return s;
}

/// Convenience overload for single-qubit reduced states.
inline Spectrum2 eig_hermitian2(const HermitianReduced& h, const ToleranceContext& tol = {}) {
  if (h.dim() != 2) throw std::invalid_argument("eig_hermitian2: expected a 2x2 reduced state");
  Matrix2 m = h.mat;
  return eig_hermitian2(m, tol);
}

}  // namespace luq
