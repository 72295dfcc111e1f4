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
#include <vector>

#include "luq/phase_fit.hpp"
#include "luq/state.hpp"
#include "luq/verdict.hpp"

namespace luq {

/// Bitstrings with (numerically) zero amplitude, in lexicographic order.
inline std::vector<std::uint32_t> support_complement(const PureState& state) {
  std::vector<std::uint32_t> k;
  for (std::uint32_t i = 0; i < std::uint32_t(state.dim()); ++i) {
    if (std::abs(state.amp[i]) <= state.tol.norm) k.push_back(i);
  }
  return k;
}

/// A state padded to full support: unit amplitude e^{-i(a0 + sum a_k k_k)}
/// on every zero entry, then renormalized. With all-zero phases this is the
/// plain completion used on the left side of the four-copy test.
struct PhaseCompletion {
  PureState base;
  std::vector<std::uint32_t> K;
  std::vector<double> alphas;  // size n + 1, index 0 = global phase
  PureState completed;
};

inline PhaseCompletion complete_with_phases(const PureState& state,
                                            const std::vector<double>& alphas) {
  if (alphas.size() != size_t(state.n) + 1) {
    throw std::invalid_argument("complete_with_phases: need n + 1 phases");
  }
  PhaseCompletion out;
  out.base = state;
  out.alphas = alphas;
  out.K = support_complement(state);
  Vector v = state.amp;
  for (std::uint32_t k : out.K) {
    double phase = alphas[0];
    for (int q = 1; q <= state.n; ++q) {
      if (bit_of(k, q, state.n)) phase += alphas[size_t(q)];
    }
    v[k] = std::polar(1.0, -phase);
  }
  out.completed = PureState::normalized(state.n, std::move(v), state.tol);
  return out;
}

inline PhaseCompletion complete_zero(const PureState& state) {
  return complete_with_phases(state, std::vector<double>(size_t(state.n) + 1, 0.0));
}

/// Decide whether psi = e^{i a0} (x)U(a_k) phi for local phase gates, and
/// recover the phases when so. The check is exact on the support: supports
/// must coincide, moduli must match, and the phase differences must admit an
/// affine fit a0 + sum_k a_k i_k solved on a maximal independent row set and
/// verified on every remaining support row mod 2pi.
inline Verdict solve_phase_gates(const PureState& psi, const PureState& phi) {
  if (psi.n != phi.n) throw std::invalid_argument("solve_phase_gates: size mismatch");
  const ToleranceContext& tol = psi.tol;
  const std::uint32_t dim = std::uint32_t(psi.dim());

  // (a) supports coincide.
  for (std::uint32_t i = 0; i < dim; ++i) {
    double mp = std::abs(psi.amp[i]);
    double mf = std::abs(phi.amp[i]);
    bool in_p = mp > tol.norm;
    bool in_f = mf > tol.norm;
    if (in_p != in_f) {
      double present = in_p ? mp : mf;
      if (present > 10.0 * tol.norm) {
        return Verdict::make_not_equivalent(
            "support mismatch at bitstring " + bitstring(i, psi.n), present);
      }
      return Verdict::make_undetermined(
          "borderline support amplitude at bitstring " + bitstring(i, psi.n), 1.0);
    }
  }

  // (b) moduli coincide on the support.
  double worst_mod = 0.0;
  std::uint32_t worst_mod_at = 0;
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (std::abs(psi.amp[i]) <= tol.norm) continue;
    double d = std::abs(std::abs(psi.amp[i]) - std::abs(phi.amp[i]));
    if (d > worst_mod) {
      worst_mod = d;
      worst_mod_at = i;
    }
  }
  if (worst_mod > tol.phase) {
    if (worst_mod > 10.0 * tol.phase) {
      return Verdict::make_not_equivalent(
          "amplitude moduli differ at bitstring " + bitstring(worst_mod_at, psi.n) +
          " by " + std::to_string(worst_mod),
          worst_mod);
    }
    return Verdict::make_undetermined(
        "amplitude moduli differ at bitstring " + bitstring(worst_mod_at, psi.n) +
        " inside the 10x rejection margin",
        worst_mod);
  }

  // (c) affine phase fit over the support.
  std::vector<PhaseRow> rows;
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (std::abs(psi.amp[i]) <= tol.norm) continue;
    rows.push_back({i, std::arg(psi.amp[i] / phi.amp[i])});
  }
  AffineFitResult fit = solve_affine_phases(rows, psi.n, tol);
  if (!fit.consistent) {
    if (fit.max_residual > 10.0 * tol.phase) {
      return Verdict::make_not_equivalent(
          "phase differences are not affine in the bits; residual " +
              std::to_string(fit.max_residual) + " at bitstring " +
              bitstring(fit.worst_row, psi.n),
          fit.max_residual);
    }
    return Verdict::make_undetermined(
        "phase fit residual " + std::to_string(fit.max_residual) +
        " inside the 10x rejection margin",
        fit.max_residual);
  }

  // Re-application check before claiming success.
  PureState mapped = apply_layer(fit.phases.as_layer(), phi);
  double residual = 1.0 - std::abs(overlap(psi, mapped));
  if (residual > tol.fidelity_accept) {
    return Verdict::make_undetermined(
        "phase fit verified per row but fidelity residual " + std::to_string(residual) +
        " exceeds acceptance",
        residual);
  }
  Verdict v = Verdict::make_equivalent(fit.phases.as_layer(), residual);
  v.phases = fit.phases;
  return v;
}

/// Pairwise form of the phase-gate compatibility condition at qubit i:
///   <0k|psi><1l|psi><1k|phi><0l|phi> == <1k|psi><0l|psi><0k|phi><1l|phi>
/// for all (n-1)-bit strings k, l. Index pairs where any of the four moduli
/// vanishes are vacuous and skipped.
inline bool condition_ii_pairwise(const PureState& psi, const PureState& phi, int qubit) {
  if (psi.n != phi.n) throw std::invalid_argument("condition_ii_pairwise: size mismatch");
  if (psi.n < 2) throw std::invalid_argument("condition_ii_pairwise: requires n >= 2");
  detail::check_qubit_index(qubit, psi.n, "condition_ii_pairwise");
  const ToleranceContext& tol = psi.tol;
  const int n = psi.n;
  const std::uint32_t rd = 1u << (n - 1);

  // a_k = <0k|psi><1k|phi>, b_k = <1k|psi><0k|phi>.
  std::vector<Complex> a(rd), b(rd);
  for (std::uint32_t k = 0; k < rd; ++k) {
    std::uint32_t k0 = insert_bit(k, qubit, n, 0);
    std::uint32_t k1 = insert_bit(k, qubit, n, 1);
    a[k] = psi.amp[k0] * phi.amp[k1];
    b[k] = psi.amp[k1] * phi.amp[k0];
  }
  for (std::uint32_t k = 0; k < rd; ++k) {
    for (std::uint32_t l = 0; l < rd; ++l) {
      std::uint32_t k0 = insert_bit(k, qubit, n, 0);
      std::uint32_t k1 = insert_bit(k, qubit, n, 1);
      std::uint32_t l0 = insert_bit(l, qubit, n, 0);
      std::uint32_t l1 = insert_bit(l, qubit, n, 1);
      double m1 = std::abs(psi.amp[k0]), m2 = std::abs(psi.amp[l1]);
      double m3 = std::abs(phi.amp[k1]), m4 = std::abs(phi.amp[l0]);
      double m5 = std::abs(psi.amp[k1]), m6 = std::abs(psi.amp[l0]);
      double m7 = std::abs(phi.amp[k0]), m8 = std::abs(phi.amp[l1]);
      if (std::min({m1, m2, m3, m4}) <= tol.norm && std::min({m5, m6, m7, m8}) <= tol.norm) {
        continue;  // both sides vacuous
      }
      Complex lhs = a[k] * b[l];
      Complex rhs = b[k] * a[l];
      double scale = std::abs(lhs) + std::abs(rhs);
      if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, scale)) return false;
    }
  }
  return true;
}

/// Literal four-copy form of the same condition: build
/// |psi0>_A |psi0>_B |phi_a>_C |phi_a>_D, apply the matched-index projectors
/// P^i_AC, P^i_BD and contract the four copies of qubit i against
/// <0110| - <1001|. True iff every component of the residual vector over the
/// (k, l) registers vanishes.
inline bool condition_ii_fourcopy(const PureState& psi0, const PureState& phi_abar, int qubit) {
  if (psi0.n != phi_abar.n) throw std::invalid_argument("condition_ii_fourcopy: size mismatch");
  const int n = psi0.n;
  if (n < 2) throw std::invalid_argument("condition_ii_fourcopy: requires n >= 2");
  if (n > 3) {
    throw std::invalid_argument(
        "condition_ii_fourcopy: unsupported size (four-copy vector needs 2^(4n) entries)");
  }
  detail::check_qubit_index(qubit, n, "condition_ii_fourcopy");

  const std::uint32_t dim = 1u << n;
  const std::uint64_t big = std::uint64_t(dim) * dim * dim * dim;
  std::vector<Complex> v(big);
  for (std::uint32_t ia = 0; ia < dim; ++ia) {
    for (std::uint32_t ib = 0; ib < dim; ++ib) {
      for (std::uint32_t ic = 0; ic < dim; ++ic) {
        for (std::uint32_t id = 0; id < dim; ++id) {
          std::uint64_t idx = ((std::uint64_t(ia) * dim + ib) * dim + ic) * dim + id;
          v[idx] = psi0.amp[ia] * psi0.amp[ib] * phi_abar.amp[ic] * phi_abar.amp[id];
        }
      }
    }
  }

  const std::uint32_t rd = 1u << (n - 1);
  std::vector<Complex> residual(std::uint64_t(rd) * rd, Complex(0, 0));
  for (std::uint32_t ia = 0; ia < dim; ++ia) {
    for (std::uint32_t ib = 0; ib < dim; ++ib) {
      for (std::uint32_t ic = 0; ic < dim; ++ic) {
        for (std::uint32_t id = 0; id < dim; ++id) {
          // P^i_AC keeps entries whose non-i bits agree between A and C;
          // P^i_BD likewise for B and D.
          std::uint32_t ka = with_bit(ia, qubit, n, 0);
          std::uint32_t kc = with_bit(ic, qubit, n, 0);
          std::uint32_t lb = with_bit(ib, qubit, n, 0);
          std::uint32_t ld = with_bit(id, qubit, n, 0);
          if (ka != kc || lb != ld) continue;
          int x = bit_of(ia, qubit, n), y = bit_of(ib, qubit, n);
          int z = bit_of(ic, qubit, n), w = bit_of(id, qubit, n);
          double chi;
          if (x == 0 && y == 1 && z == 1 && w == 0) {
            chi = 1.0;
          } else if (x == 1 && y == 0 && z == 0 && w == 1) {
            chi = -1.0;
          } else {
            continue;
          }
          // Collapse the matched registers to (k, l) coordinates.
          std::uint32_t k = 0, l = 0;
          for (int q = 1, j = 0; q <= n; ++q) {
            if (q == qubit) continue;
            k |= std::uint32_t(bit_of(ia, q, n)) << (n - 2 - j);
            l |= std::uint32_t(bit_of(ib, q, n)) << (n - 2 - j);
            ++j;
          }
          std::uint64_t idx = ((std::uint64_t(ia) * dim + ib) * dim + ic) * dim + id;
          residual[std::uint64_t(k) * rd + l] += chi * v[idx];
        }
      }
    }
  }
  for (const Complex& r : residual) {
    if (std::abs(r) > 1e-10) return false;
  }
  return true;
}

}  // namespace luq
