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

#include "luq/eig2.hpp"
#include "luq/phase_fit.hpp"
#include "luq/state.hpp"
#include "luq/verdict.hpp"

namespace luq {

/// Support bookkeeping for the phase-fixing step.
///
/// S lists the bitstrings carrying amplitude, in lexicographic order. S_bar
/// is the greedy (lexicographic) maximal subset of S whose bitstrings are
/// linearly independent as real 0/1 vectors. i0 anchors the global phase:
/// the first element of S skipped by the greedy selection (the all-zeros
/// string always qualifies when present), or the first element of S when
/// nothing is skipped.
struct SupportStructure {
  std::vector<std::uint32_t> S;
  std::vector<std::uint32_t> S_bar;
  std::uint32_t i0 = 0;
  bool i0_in_S_bar = false;
};

namespace detail {

/// Incremental exact rank tracking of 0/1 vectors. Arithmetic is modulo a
/// prime larger than any possible minor determinant (Hadamard bound for a
/// 12x12 0/1 matrix is ~3e6), so independence over the rationals and over
/// GF(p) coincide.
class BinaryVectorRank {
 public:
  explicit BinaryVectorRank(int n) : n_(n) {}

  /// Try to insert the bitstring as a new independent vector. Returns false
  /// when it lies in the span of the vectors inserted so far.
  bool insert(std::uint32_t bits) {
    static constexpr std::int64_t p = 2147483647;  // 2^31 - 1, prime
    std::vector<std::int64_t> row(static_cast<size_t>(n_));
    for (int k = 1; k <= n_; ++k) row[size_t(k - 1)] = bit_of(bits, k, n_);
    for (const auto& basis_row : echelon_) {
      int lead = basis_row.first;
      std::int64_t factor = row[size_t(lead)] % p;
      if (factor == 0) continue;
      std::int64_t inv = mod_inverse(basis_row.second[size_t(lead)], p);
      std::int64_t scale = (factor * inv) % p;
      for (int j = 0; j < n_; ++j) {
        row[size_t(j)] = ((row[size_t(j)] - scale * basis_row.second[size_t(j)]) % p + p) % p;
      }
    }
    int lead = -1;
    for (int j = 0; j < n_; ++j) {
      if (row[size_t(j)] != 0) {
        lead = j;
        break;
      }
    }
    if (lead < 0) return false;
    echelon_.emplace_back(lead, std::move(row));
    return true;
  }

 private:
  static std::int64_t mod_inverse(std::int64_t a, std::int64_t p) {
    // Fermat: a^(p-2) mod p.
    std::int64_t result = 1, base = a % p, e = p - 2;
    while (e > 0) {
      if (e & 1) result = (result * base) % p;
      base = (base * base) % p;
      e >>= 1;
    }
    return result;
  }

  int n_;
  std::vector<std::pair<int, std::vector<std::int64_t>>> echelon_;
};

}  // namespace detail

inline SupportStructure support_structure(const PureState& state) {
  SupportStructure s;
  detail::BinaryVectorRank rank(state.n);
  bool have_i0 = false;
  for (std::uint32_t i = 0; i < std::uint32_t(state.dim()); ++i) {
    if (std::abs(state.amp[i]) <= state.tol.norm) continue;
    s.S.push_back(i);
    if (rank.insert(i)) {
      s.S_bar.push_back(i);
    } else if (!have_i0) {
      s.i0 = i;
      have_i0 = true;
    }
  }
  if (s.S.empty()) throw std::invalid_argument("support_structure: state has empty support");
  if (!have_i0) {
    s.i0 = s.S.front();
    s.i0_in_S_bar = true;
  }
  return s;
}

/// Canonicalization result: the transformed state, the layer achieving it,
/// the per-qubit spectra and the genericity flag (no single-qubit reduced
/// state degenerate). For generic inputs the fully phase-fixed form is
/// unique; otherwise it is still deterministic but not canonical.
struct StandardFormResult {
  PureState canonical;
  LocalUnitaryLayer layer;
  std::vector<Spectrum2> spectra;
  bool generic = false;
  PhaseVector phases;
  /// Residual of the anchor-row phase system; nonzero only for supports
  /// whose anchor row is affinely dependent, which never happens for
  /// generic states.
  double phase_fit_residual = 0.0;
};

/// Diagonalize every single-qubit reduced state. With the deterministic
/// eigensolver convention the diagonal entries come out in descending order,
/// so the result is already a sorted trace decomposition.
inline StandardFormResult trace_decomposition(const PureState& state) {
  StandardFormResult r;
  r.layer = LocalUnitaryLayer::identity(state.n);
  r.spectra.reserve(size_t(state.n));
  bool generic = true;
  for (int q = 1; q <= state.n; ++q) {
    Spectrum2 s = eig_hermitian2(partial_trace(state, {q}), state.tol);
    r.layer.factors[size_t(q - 1)] = s.diagonalizer;
    generic = generic && !s.degenerate;
    r.spectra.push_back(std::move(s));
  }
  r.generic = generic;
  r.canonical = apply_layer(r.layer, state);
  return r;
}

/// Trace decomposition with descending local spectra and degeneracy flags.
inline StandardFormResult sorted_trace_decomposition(const PureState& state) {
  return trace_decomposition(state);
}

namespace detail {

struct PhaseFix {
  PureState state;
  PhaseVector phases;
  double residual = 0.0;
};

inline PhaseFix fix_phases_impl(const PureState& state) {
  SupportStructure sup = support_structure(state);
  std::vector<PhaseRow> rows;
  rows.push_back({sup.i0, -std::arg(state.amp[sup.i0])});
  for (std::uint32_t i : sup.S_bar) {
    if (sup.i0_in_S_bar && i == sup.i0) continue;
    rows.push_back({i, -std::arg(state.amp[i])});
  }
  AffineFitResult fit = solve_affine_phases(rows, state.n, state.tol);
  PhaseFix out;
  out.state = apply_layer(fit.phases.as_layer(), state);
  out.phases = std::move(fit.phases);
  out.residual = fit.max_residual;
  return out;
}

}  // namespace detail

/// Fix the residual phase-gate freedom of a sorted trace decomposition:
/// solve arg(amp_i) + a0 + sum_k a_k i_k == 0 (mod 2pi) over the anchor row
/// i0 and the independent support rows S_bar, pinning free angles to 0.
inline std::pair<PureState, PhaseVector> fix_phases(const PureState& state) {
  detail::PhaseFix fx = detail::fix_phases_impl(state);
  return {std::move(fx.state), std::move(fx.phases)};
}

/// Sorted trace decomposition followed by phase fixing. Unique for generic
/// states: any two LU-equivalent generic inputs land on the same amplitudes.
inline StandardFormResult standard_form(const PureState& state) {
  StandardFormResult r = sorted_trace_decomposition(state);
  detail::PhaseFix fx = detail::fix_phases_impl(r.canonical);
  r.phases = fx.phases;
  r.phase_fit_residual = fx.residual;
  r.canonical = std::move(fx.state);
  r.layer = compose(fx.phases.as_layer(), r.layer);
  return r;
}

/// Rigorous upper bound on sup_L |<psi| L |phi>| over local unitary layers:
/// fidelity is monotone under partial trace and local spectra are
/// LU-invariant, so for every subsystem S the overlap is at most
/// sum_i sqrt(lambda_i mu_i) with both reduced spectra sorted descending.
/// The bound is the minimum over all single-qubit and two-qubit subsystems.
inline double lu_fidelity_upper_bound(const PureState& psi, const PureState& phi) {
  if (psi.n != phi.n) throw std::invalid_argument("lu_fidelity_upper_bound: size mismatch");
  double bound = 1.0;
  auto spectral_bound = [&](const std::vector<int>& keep) {
    Eigen::SelfAdjointEigenSolver<MatrixX> ep(partial_trace(psi, keep).mat);
    Eigen::SelfAdjointEigenSolver<MatrixX> ef(partial_trace(phi, keep).mat);
    double f = 0.0;
    for (Eigen::Index i = 0; i < ep.eigenvalues().size(); ++i) {
      f += std::sqrt(std::max(0.0, ep.eigenvalues()[i]) * std::max(0.0, ef.eigenvalues()[i]));
    }
    return f;
  };
  for (int q = 1; q <= psi.n; ++q) bound = std::min(bound, spectral_bound({q}));
  for (int i = 1; i <= psi.n; ++i) {
    for (int j = i + 1; j <= psi.n; ++j) bound = std::min(bound, spectral_bound({i, j}));
  }
  return bound;
}

namespace detail {

/// A NotEquivalent claim is only kept when the pair is provably separated at
/// the fidelity resolution the acceptance threshold works at; a witness the
/// overlap measure could not confirm is demoted to Undetermined.
inline Verdict guard_not_equivalent(Verdict v, const PureState& psi, const PureState& phi) {
  if (v.outcome != Outcome::NotEquivalent) return v;
  double gap = 1.0 - lu_fidelity_upper_bound(psi, phi);
  if (gap > 10.0 * psi.tol.fidelity_accept) return v;
  Verdict u = Verdict::make_undetermined(
      "witness present (" + v.witness + ") but the certified fidelity gap " +
          std::to_string(gap) + " is below the rejection resolution",
      v.residual);
  u.stats = v.stats;
  return u;
}

}  // namespace detail

/// Decide LU-equivalence of two generic states by comparing standard forms.
/// The certificate maps phi onto psi. Near-degenerate local spectra (gap
/// within 10x of the degeneracy threshold on either side) give Undetermined
/// rather than trusting an unstable eigenvalue ordering.
inline Verdict check_generic_equivalence(const PureState& psi, const PureState& phi) {
  if (psi.n != phi.n) throw std::invalid_argument("check_generic_equivalence: size mismatch");
  const ToleranceContext& tol = psi.tol;
  StandardFormResult sp = standard_form(psi);
  StandardFormResult sf = standard_form(phi);
  if (!sp.generic || !sf.generic) {
    throw std::invalid_argument(
        "check_generic_equivalence: input not generic; use decide_lu_equivalence");
  }
  for (int q = 1; q <= psi.n; ++q) {
    double g1 = sp.spectra[size_t(q - 1)].gap();
    double g2 = sf.spectra[size_t(q - 1)].gap();
    if (g1 <= 10.0 * tol.degeneracy || g2 <= 10.0 * tol.degeneracy) {
      Verdict v = Verdict::make_undetermined(
          "near-degenerate local spectrum at qubit " + std::to_string(q) +
          "; canonical ordering unstable");
      v.stats.path = "generic";
      return v;
    }
  }

  // Local spectra first: they separate faster than full amplitude vectors.
  double spectra_diff = 0.0;
  int spectra_qubit = 0;
  for (int q = 1; q <= psi.n; ++q) {
    double d = std::max(
        std::abs(sp.spectra[size_t(q - 1)].lambda1 - sf.spectra[size_t(q - 1)].lambda1),
        std::abs(sp.spectra[size_t(q - 1)].lambda2 - sf.spectra[size_t(q - 1)].lambda2));
    if (d > spectra_diff) {
      spectra_diff = d;
      spectra_qubit = q;
    }
  }
  const double amp_tol = tol.fidelity_accept;
  if (spectra_diff > 10.0 * tol.degeneracy) {
    Verdict v = Verdict::make_not_equivalent(
        "single-qubit spectra differ at qubit " + std::to_string(spectra_qubit) +
        " (max eigenvalue gap " + std::to_string(spectra_diff) + ")",
        spectra_diff);
    v.stats.path = "generic";
    return detail::guard_not_equivalent(std::move(v), psi, phi);
  }

  double amp_diff = 0.0;
  std::uint32_t amp_index = 0;
  for (std::uint32_t i = 0; i < std::uint32_t(sp.canonical.dim()); ++i) {
    double d = std::abs(sp.canonical.amp[i] - sf.canonical.amp[i]);
    if (d > amp_diff) {
      amp_diff = d;
      amp_index = i;
    }
  }
  if (amp_diff <= amp_tol) {
    LocalUnitaryLayer cert = compose(adjoint(sp.layer), sf.layer);
    double residual = 1.0 - std::abs(overlap(psi, apply_layer(cert, phi)));
    if (residual > tol.fidelity_accept) {
      Verdict v = Verdict::make_undetermined(
          "standard forms agree but certificate residual " + std::to_string(residual) +
          " exceeds acceptance",
          residual);
      v.stats.path = "generic";
      return v;
    }
    Verdict v = Verdict::make_equivalent(std::move(cert), residual);
    v.stats.path = "generic";
    v.stats.best_residual = residual;
    return v;
  }
  if (amp_diff > 10.0 * amp_tol) {
    Verdict v = Verdict::make_not_equivalent(
        "standard-form amplitudes differ at bitstring " + bitstring(amp_index, psi.n) +
        " by " + std::to_string(amp_diff),
        amp_diff);
    v.stats.path = "generic";
    return detail::guard_not_equivalent(std::move(v), psi, phi);
  }
  Verdict v = Verdict::make_undetermined(
      "standard forms differ by " + std::to_string(amp_diff) +
      ", inside the 10x rejection margin",
      amp_diff);
  v.stats.path = "generic";
  return v;
}

}  // namespace luq
