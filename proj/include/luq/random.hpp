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

#include <cstdint>
#include <string>

#include "luq/state.hpp"

namespace luq {

/// PCG32 (XSH-RR variant, fixed increment). The generator algorithm is part
/// of the reproducibility contract: a given seed must yield the same stream
/// on every platform, so no std:: engine or distribution is used anywhere.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed) : state_(0u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + 1442695040888963407ULL;
    std::uint32_t xorshifted = std::uint32_t(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = std::uint32_t(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no rejection, fully deterministic).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // Guard the log; uniform() can return exactly 0.
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Complex complex_gaussian() {
    double re = gaussian();
    double im = gaussian();
    return Complex(re, im);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-random state: normalized vector of i.i.d. complex normals.
inline PureState random_state(int n, Pcg32& rng, ToleranceContext tol = {}) {
  Vector v(Eigen::Index(1) << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.complex_gaussian();
  return PureState::normalized(n, std::move(v), tol);
}

/// Haar-random 2x2 unitary: Gram-Schmidt on a complex Ginibre sample with the
/// R diagonal kept real positive.
inline Matrix2 random_unitary2(Pcg32& rng) {
  Eigen::Vector2cd g1(rng.complex_gaussian(), rng.complex_gaussian());
  Eigen::Vector2cd g2(rng.complex_gaussian(), rng.complex_gaussian());
  g1.normalize();
  Eigen::Vector2cd q2 = g2 - g1 * (g1.dot(g2));
  q2.normalize();
  Matrix2 u;
  u.col(0) = g1;
  u.col(1) = q2;
  return u;
}

/// Layer of independent Haar factors, zero global phase.
inline LocalUnitaryLayer random_layer(int n, Pcg32& rng) {
  LocalUnitaryLayer l(n);
  for (int i = 0; i < n; ++i) l.factors[size_t(i)] = random_unitary2(rng);
  return l;
}

/// Layer of phase gates diag(1, e^{i a_k}) with a random global phase.
inline LocalUnitaryLayer random_phase_layer(int n, Pcg32& rng) {
  LocalUnitaryLayer l(n);
  l.global_phase = rng.uniform(0.0, kTwoPi);
  for (int i = 0; i < n; ++i) l.factors[size_t(i)] = phase_gate(rng.uniform(0.0, kTwoPi));
  return l;
}

inline PureState ghz_state(int n, ToleranceContext tol = {}) {
  Vector v = Vector::Zero(Eigen::Index(1) << n);
  const double s = 1.0 / std::sqrt(2.0);
  v[0] = s;
  v[v.size() - 1] = s;
  return PureState(n, std::move(v), tol);
}

inline PureState w_state(int n, ToleranceContext tol = {}) {
  Vector v = Vector::Zero(Eigen::Index(1) << n);
  const double s = 1.0 / std::sqrt(double(n));
  for (int q = 1; q <= n; ++q) v[Eigen::Index(1) << (n - q)] = s;
  return PureState(n, std::move(v), tol);
}

/// Linear cluster state: CZ between neighbours applied to |+>^n.
inline PureState cluster_state(int n, ToleranceContext tol = {}) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  Vector v = Vector::Constant(dim, 1.0 / std::sqrt(double(dim)));
  for (std::uint32_t x = 0; x < std::uint32_t(dim); ++x) {
    int sign = 0;
    for (int q = 1; q < n; ++q) sign += bit_of(x, q, n) & bit_of(x, q + 1, n);
    if (sign & 1) v[x] = -v[x];
  }
  return PureState(n, std::move(v), tol);
}

inline PureState product_state(int n, ToleranceContext tol = {}) {
  return PureState::basis(n, 0, tol);
}

}  // namespace luq
