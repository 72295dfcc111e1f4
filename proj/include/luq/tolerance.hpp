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
#include <stdexcept>

namespace luq {

/// Numerical thresholds shared by every operation in the library.
///
/// All comparisons against these values are absolute: amplitudes,
/// eigenvalues of reduced states and phase residuals all live on an O(1)
/// scale, so no relative scaling is needed.
struct ToleranceContext {
  double norm = 1e-10;             ///< state normalization / support cutoff
  double hermitian = 1e-10;        ///< allowed anti-Hermitian part
  double unitary = 1e-9;           ///< allowed deviation of U U^dag from 1
  double degeneracy = 1e-8;        ///< eigenvalue-gap threshold
  double phase = 1e-8;             ///< mod-2pi residual threshold
  double fidelity_accept = 1e-8;   ///< accept when 1 - |<Psi|L|Phi>| <= this

  void validate() const {
    if (norm <= 0 || hermitian <= 0 || unitary <= 0 || degeneracy <= 0 ||
        phase <= 0 || fidelity_accept <= 0) {
      throw std::invalid_argument("ToleranceContext: all tolerances must be positive");
    }
  }
};

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Canonicalize an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod rounding at the seam
  return r;
}

/// Signed distance of an angle from 0 mod 2*pi, in (-pi, pi].
inline double wrap_residual(double a) {
  double r = std::remainder(a, kTwoPi);
  return r;
}

}  // namespace luq
