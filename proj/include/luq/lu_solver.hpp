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

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "luq/eig2.hpp"
#include "luq/nelder_mead.hpp"
#include "luq/phase_fit.hpp"
#include "luq/phase_gates.hpp"
#include "luq/random.hpp"
#include "luq/standard_form.hpp"
#include "luq/state.hpp"
#include "luq/verdict.hpp"

namespace luq {

struct LuConfig {
  int restarts = 64;           ///< multi-start count for the variable search
  int max_iterations = 2000;   ///< per-start simplex iteration cap
  std::uint64_t seed = 0;      ///< seeds the search start points
};

/// 1 - |<psi| L |phi>|.
inline double verify_certificate(const PureState& psi, const PureState& phi,
                                 const LocalUnitaryLayer& layer) {
  if (psi.n != phi.n || layer.n() != psi.n) {
    throw std::invalid_argument("verify_certificate: size mismatch");
  }
  return 1.0 - std::abs(overlap(psi, apply_layer(layer, phi)));
}

/// Euler angles of a single-qubit unitary e^{-i g Z} e^{-i b X} e^{-i a Z}
/// (covers SU(2); the global phase is carried elsewhere). The associated
/// diagonalizing factor w_bar() = e^{i b X} e^{i g Z} satisfies
/// w_bar() * unitary() = e^{-i a Z}, a phase gate up to phase.
struct EulerZXZ {
  double gamma = 0.0;
  double beta = 0.0;
  double alpha = 0.0;

  static Matrix2 rot_z(double t) {
    Matrix2 m = Matrix2::Zero();
    m(0, 0) = std::polar(1.0, -t);
    m(1, 1) = std::polar(1.0, t);
    return m;
  }
  static Matrix2 rot_x(double t) {
    Matrix2 m;
    Complex ms(0.0, -std::sin(t));
    m << Complex(std::cos(t), 0.0), ms, ms, Complex(std::cos(t), 0.0);
    return m;
  }

  Matrix2 unitary() const { return rot_z(gamma) * rot_x(beta) * rot_z(alpha); }
  Matrix2 w_bar() const { return rot_x(-beta) * rot_z(-gamma); }
};

/// Per-state classification: which single-qubit and two-qubit reduced states
/// are proportional to the identity. Chain statuses start Pending and are
/// resolved by build_chain.
struct EntanglementClass {
  enum class ChainStatus { Pending, Determined, Variable };

  int n = 0;
  std::vector<bool> qubit_mixed;                ///< rho_i prop. to 1/2
  std::vector<double> qubit_gap;                ///< eigenvalue gap of rho_i
  std::vector<std::vector<bool>> pair_mixed;    ///< [i-1][j-1], i < j
  std::vector<std::vector<double>> pair_dev;    ///< max-norm dist from 1/4
  std::vector<ChainStatus> chain_status;
  std::vector<std::vector<int>> determined_via;
};

inline EntanglementClass classify(const PureState& state) {
  EntanglementClass c;
  c.n = state.n;
  c.qubit_mixed.assign(size_t(state.n), false);
  c.qubit_gap.assign(size_t(state.n), 0.0);
  c.pair_mixed.assign(size_t(state.n), std::vector<bool>(size_t(state.n), false));
  c.pair_dev.assign(size_t(state.n), std::vector<double>(size_t(state.n), 0.0));
  c.chain_status.assign(size_t(state.n), EntanglementClass::ChainStatus::Pending);
  c.determined_via.assign(size_t(state.n), {});
  for (int q = 1; q <= state.n; ++q) {
    Spectrum2 s = eig_hermitian2(partial_trace(state, {q}), state.tol);
    c.qubit_gap[size_t(q - 1)] = s.gap();
    c.qubit_mixed[size_t(q - 1)] = s.gap() <= state.tol.degeneracy;
  }
  for (int i = 1; i <= state.n; ++i) {
    for (int j = i + 1; j <= state.n; ++j) {
      HermitianReduced rho = partial_trace(state, {i, j});
      double dev = (rho.mat - 0.25 * MatrixX::Identity(4, 4)).cwiseAbs().maxCoeff();
      c.pair_dev[size_t(i - 1)][size_t(j - 1)] = dev;
      c.pair_mixed[size_t(i - 1)][size_t(j - 1)] = dev <= state.tol.degeneracy;
    }
  }
  return c;
}

/// Hermitian 2x2 operators built from an off-diagonal conditional block of a
/// state: X = tr_{not k}(|Phi_i><Phi_j|) over conditioning outcomes i, j,
/// with Y = X + X^dag and Z = iX - iX^dag. Whichever of Y, Z deviates more
/// from a multiple of the identity pins down qubit k's local unitary.
struct CrossBlockOperator {
  std::vector<int> systems;   ///< conditioning qubits, ascending
  std::uint32_t i = 0;        ///< source tuple over `systems`
  std::uint32_t j = 0;        ///< target tuple over `systems`
  int target = 0;             ///< qubit k
  Matrix2 Y = Matrix2::Zero();
  Matrix2 Z = Matrix2::Zero();
  bool use_z = false;
  double gap_y = 0.0;
  double gap_z = 0.0;
  Spectrum2 phi_spectrum;     ///< spectrum of the chosen operator

  const Matrix2& chosen() const { return use_z ? Z : Y; }
  double chosen_gap() const { return use_z ? gap_z : gap_y; }
  bool usable(const ToleranceContext& tol) const { return chosen_gap() > tol.degeneracy; }
};

namespace detail {

inline double hermitian2_gap(const Matrix2& m) {
  double a = m(0, 0).real(), c = m(1, 1).real();
  return 2.0 * std::hypot(0.5 * (a - c), std::abs(0.5 * (m(0, 1) + std::conj(m(1, 0)))));
}

/// Position (1-based) of `target` among the qubits left after removing
/// `systems` (which must not contain it).
inline int remaining_position(const std::vector<int>& systems, int target) {
  int pos = target;
  for (int s : systems) {
    if (s < target) --pos;
  }
  return pos;
}

}  // namespace detail

inline CrossBlockOperator cross_block_operator(const PureState& phi,
                                               const std::vector<int>& systems, std::uint32_t i,
                                               std::uint32_t j, int target) {
  for (int s : systems) {
    if (s == target) throw std::invalid_argument("cross_block_operator: target inside conditioning tuple");
  }
  detail::check_qubit_index(target, phi.n, "cross_block_operator");
  CrossBlockOperator op;
  op.systems = systems;
  op.i = i;
  op.j = j;
  op.target = target;
  Vector u = project_systems(phi, systems, i);
  Vector v = project_systems(phi, systems, j);
  int pos = detail::remaining_position(systems, target);
  Matrix2 x = cross_trace_single(u, v, pos, phi.n - int(systems.size()));
  op.Y = x + x.adjoint();
  op.Z = Complex(0, 1) * x - Complex(0, 1) * x.adjoint();
  op.gap_y = detail::hermitian2_gap(op.Y);
  op.gap_z = detail::hermitian2_gap(op.Z);
  op.use_z = !(op.gap_y > op.gap_z);
  op.phi_spectrum = eig_hermitian2(op.chosen(), phi.tol);
  return op;
}

/// Scan (i, j) tuples in lexicographic order and return the first whose
/// preferred operator clears the degeneracy threshold, or nothing when every
/// block is proportional to the identity (no determination at this level).
inline std::optional<CrossBlockOperator> find_cross_block(const PureState& phi,
                                                          const std::vector<int>& systems,
                                                          int target) {
  const std::uint32_t td = 1u << systems.size();
  for (std::uint32_t i = 0; i < td; ++i) {
    for (std::uint32_t j = 0; j < td; ++j) {
      CrossBlockOperator op = cross_block_operator(phi, systems, i, j, target);
      if (op.usable(phi.tol)) return op;
    }
  }
  return std::nullopt;
}

/// Result of instantiating a chain entry's W_bar at a concrete assignment of
/// the variable unitaries it depends on.
struct WkEvaluation {
  Matrix2 w_bar = Matrix2::Identity();
  bool flip_allowed = false;
  Spectrum2 psi_spectrum;
  double spectra_diff = 0.0;  ///< vs. the phi-side operator spectrum
  bool mismatch = false;      ///< spectra_diff beyond 10x degeneracy: not LU-equivalent
                              ///< if the assignment is the true one
};

/// Build the psi-side counterpart of a cross-block operator under the given
/// conditioning-system unitaries, diagonalize it, and compare spectra.
inline WkEvaluation evaluate_Wk(const CrossBlockOperator& op, const PureState& psi,
                                const std::vector<Matrix2>& assignment) {
  if (assignment.size() != op.systems.size()) {
    throw std::invalid_argument("evaluate_Wk: assignment must cover the conditioning systems");
  }
  Vector amp = psi.amp;
  for (size_t m = 0; m < op.systems.size(); ++m) {
    detail::apply_single(assignment[m].adjoint(), op.systems[m], psi.n, amp);
  }
  PureState moved;
  moved.n = psi.n;
  moved.amp = std::move(amp);
  moved.tol = psi.tol;
  Vector u = project_systems(moved, op.systems, op.i);
  Vector v = project_systems(moved, op.systems, op.j);
  int pos = detail::remaining_position(op.systems, op.target);
  Matrix2 x = cross_trace_single(u, v, pos, psi.n - int(op.systems.size()));
  Matrix2 m = op.use_z ? Matrix2(Complex(0, 1) * x - Complex(0, 1) * x.adjoint())
                       : Matrix2(x + x.adjoint());
  WkEvaluation ev;
  ev.psi_spectrum = eig_hermitian2(m, psi.tol);
  ev.w_bar = ev.psi_spectrum.diagonalizer;
  ev.flip_allowed = ev.psi_spectrum.degenerate;
  ev.spectra_diff = std::max(std::abs(ev.psi_spectrum.lambda1 - op.phi_spectrum.lambda1),
                             std::abs(ev.psi_spectrum.lambda2 - op.phi_spectrum.lambda2));
  ev.mismatch = ev.spectra_diff > 10.0 * psi.tol.degeneracy;
  return ev;
}

/// Per-qubit record of how the diagonalizing factors of the final matching
/// equation are obtained: fixed from the local spectra, computed from a
/// cross-block operator as a function of the variable unitaries, or a free
/// variable.
struct ChainEntry {
  enum class Kind { FixedSpectra, CrossBlock, Variable };

  int qubit = 0;
  Kind kind = Kind::Variable;
  Matrix2 v_bar = Matrix2::Identity();
  Matrix2 w_fixed = Matrix2::Identity();          // FixedSpectra only
  std::optional<CrossBlockOperator> block;        // CrossBlock only
  std::vector<int> deps;                          // conditioning systems
  int variable_index = -1;                        // Variable only
  bool flip_allowed = false;
  std::string provenance;
};

struct DependencyChain {
  int n = 0;
  std::vector<ChainEntry> entries;   ///< indexed by qubit - 1
  std::vector<int> variables;        ///< qubit indices, ascending
};

/// Outcome of chain construction: either a chain, or an early verdict from an
/// LU-invariant witness. `tainted` marks borderline classifications that must
/// demote any negative final verdict to Undetermined.
struct ChainBuild {
  std::optional<DependencyChain> chain;
  std::optional<Verdict> early;
  bool tainted = false;
  std::string taint_note;
};

namespace detail {

inline double factorization_dev(const PureState& state, const std::vector<int>& systems,
                                int target) {
  std::vector<int> keep = systems;
  keep.push_back(target);
  HermitianReduced big = partial_trace(state, keep);
  HermitianReduced small = partial_trace(state, systems);
  Eigen::Index d = small.mat.rows();
  MatrixX expect = MatrixX::Zero(2 * d, 2 * d);
  // small (x) 1/2 with `target` as the least significant qubit.
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      expect(2 * r, 2 * c) = 0.5 * small.mat(r, c);
      expect(2 * r + 1, 2 * c + 1) = 0.5 * small.mat(r, c);
    }
  }
  // Frobenius norm: invariant under local unitaries, so the margin logic
  // compares like with like across the two states.
  return (big.mat - expect).norm();
}

}  // namespace detail

/// Construct the dependency chain for the pair (psi, phi).
///
/// Qubits with non-degenerate local spectra are fixed directly from the
/// eigendecompositions of rho_i and sigma_i (mismatched spectra are an
/// LU-invariant witness). Remaining qubits are determined through cross-block
/// operators conditioned on tuples of variable qubits, and a qubit that no
/// tuple can determine becomes the next variable itself. Conditioning tuples
/// are drawn from the declared variables only, so every W_bar is an exactly
/// evaluable function of the search assignment.
inline ChainBuild build_chain(const PureState& psi, const PureState& phi) {
  if (psi.n != phi.n) throw std::invalid_argument("build_chain: size mismatch");
  const ToleranceContext& tol = psi.tol;
  const int n = psi.n;
  ChainBuild out;

  DependencyChain chain;
  chain.n = n;
  chain.entries.resize(size_t(n));

  std::vector<int> pending;
  for (int q = 1; q <= n; ++q) {
    ChainEntry& e = chain.entries[size_t(q - 1)];
    e.qubit = q;
    Spectrum2 sp = eig_hermitian2(partial_trace(psi, {q}), tol);
    Spectrum2 sf = eig_hermitian2(partial_trace(phi, {q}), tol);
    bool mixed_p = sp.gap() <= tol.degeneracy;
    bool mixed_f = sf.gap() <= tol.degeneracy;
    bool border_p = !mixed_p && sp.gap() <= 10.0 * tol.degeneracy;
    bool border_f = !mixed_f && sf.gap() <= 10.0 * tol.degeneracy;
    if (mixed_p != mixed_f) {
      double lo = std::min(sp.gap(), sf.gap());
      double hi = std::max(sp.gap(), sf.gap());
      if (lo <= tol.degeneracy && hi > 10.0 * tol.degeneracy) {
        out.early = Verdict::make_not_equivalent(
            "single-qubit spectra differ at qubit " + std::to_string(q) + ": (" +
                std::to_string(sp.lambda1) + ", " + std::to_string(sp.lambda2) + ") vs (" +
                std::to_string(sf.lambda1) + ", " + std::to_string(sf.lambda2) + ")",
            hi - lo);
        out.early->stats.path = "chain";
        return out;
      }
      out.tainted = true;
      out.taint_note = "borderline mixedness at qubit " + std::to_string(q);
      pending.push_back(q);
      continue;
    }
    if (mixed_p || border_p || border_f) {
      if (border_p || border_f) {
        out.tainted = true;
        out.taint_note = "near-degenerate local spectrum at qubit " + std::to_string(q);
      }
      pending.push_back(q);
      continue;
    }
    double diff = std::max(std::abs(sp.lambda1 - sf.lambda1), std::abs(sp.lambda2 - sf.lambda2));
    if (diff > 10.0 * tol.degeneracy) {
      out.early = Verdict::make_not_equivalent(
          "single-qubit spectra differ at qubit " + std::to_string(q) + ": (" +
              std::to_string(sp.lambda1) + ", " + std::to_string(sp.lambda2) + ") vs (" +
              std::to_string(sf.lambda1) + ", " + std::to_string(sf.lambda2) + ")",
          diff);
      out.early->stats.path = "chain";
      return out;
    }
    if (diff > tol.degeneracy) {
      out.tainted = true;
      out.taint_note = "borderline local-spectra match at qubit " + std::to_string(q);
    }
    e.kind = ChainEntry::Kind::FixedSpectra;
    e.w_fixed = sp.diagonalizer;
    e.v_bar = sf.diagonalizer;
    e.provenance = "local spectra of qubit " + std::to_string(q);
  }

  // Two-qubit factorization screen: rho_ij prop. to 1 iff sigma_ij is.
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      HermitianReduced rp = partial_trace(psi, {i, j});
      HermitianReduced rf = partial_trace(phi, {i, j});
      double dp = (rp.mat - 0.25 * MatrixX::Identity(4, 4)).norm();
      double df = (rf.mat - 0.25 * MatrixX::Identity(4, 4)).norm();
      double lo = std::min(dp, df), hi = std::max(dp, df);
      if (lo <= tol.degeneracy && hi > 10.0 * tol.degeneracy) {
        out.early = Verdict::make_not_equivalent(
            "two-qubit reduced state of qubits {" + std::to_string(i) + "," + std::to_string(j) +
                "} is maximally mixed for one state only (deviations " + std::to_string(dp) +
                " vs " + std::to_string(df) + ")",
            hi - lo);
        out.early->stats.path = "chain";
        return out;
      }
      if (lo <= tol.degeneracy && hi > tol.degeneracy) {
        out.tainted = true;
        out.taint_note = "borderline two-qubit mixedness at {" + std::to_string(i) + "," +
                         std::to_string(j) + "}";
      }
    }
  }

  // Determine the still-pending (locally mixed) qubits from cross-block
  // operators conditioned on variable tuples; promote a qubit to a variable
  // when no tuple determines it.
  std::vector<int> variables;
  auto tuples_of_variables = [&]() {
    std::vector<std::vector<int>> tuples;
    const int v = int(variables.size());
    for (int size = 1; size <= v; ++size) {
      std::vector<int> idx(static_cast<size_t>(size));
      for (int t = 0; t < size; ++t) idx[size_t(t)] = t;
      while (true) {
        std::vector<int> tuple(static_cast<size_t>(size));
        for (int t = 0; t < size; ++t) tuple[size_t(t)] = variables[size_t(idx[size_t(t)])];
        tuples.push_back(std::move(tuple));
        int t = size - 1;
        while (t >= 0 && idx[size_t(t)] == v - size + t) --t;
        if (t < 0) break;
        ++idx[size_t(t)];
        for (int s = t + 1; s < size; ++s) idx[size_t(s)] = idx[size_t(s - 1)] + 1;
      }
    }
    return tuples;
  };

  while (!pending.empty()) {
    bool progressed = false;
    for (auto it = pending.begin(); it != pending.end();) {
      int k = *it;
      bool resolved = false;
      for (const auto& tuple : tuples_of_variables()) {
        double dev_p = detail::factorization_dev(psi, tuple, k);
        double dev_f = detail::factorization_dev(phi, tuple, k);
        double lo = std::min(dev_p, dev_f), hi = std::max(dev_p, dev_f);
        if (lo <= tol.degeneracy && hi > 10.0 * tol.degeneracy) {
          std::string t;
          for (int s : tuple) t += std::to_string(s) + ",";
          out.early = Verdict::make_not_equivalent(
              "reduced state of qubits {" + t + std::to_string(k) +
                  "} factorizes over qubit " + std::to_string(k) +
                  " for one state only (deviations " + std::to_string(dev_p) + " vs " +
                  std::to_string(dev_f) + ")",
              hi - lo);
          out.early->stats.path = "chain";
          return out;
        }
        if (lo <= tol.degeneracy && hi > tol.degeneracy) {
          out.tainted = true;
          out.taint_note = "borderline factorization over qubit " + std::to_string(k);
        }
        std::optional<CrossBlockOperator> op = find_cross_block(phi, tuple, k);
        if (!op) continue;
        ChainEntry& e = chain.entries[size_t(k - 1)];
        e.kind = ChainEntry::Kind::CrossBlock;
        e.v_bar = op->phi_spectrum.diagonalizer;
        e.deps = tuple;
        std::string t;
        for (int s : tuple) t += std::to_string(s) + ",";
        if (!t.empty()) t.pop_back();
        e.provenance = std::string(op->use_z ? "Z" : "Y") + "-block [T={" + t + "} i=" +
                       std::to_string(op->i) + " j=" + std::to_string(op->j) + " -> qubit " +
                       std::to_string(k) + "]";
        e.block = std::move(op);
        resolved = true;
        break;
      }
      if (resolved) {
        it = pending.erase(it);
        progressed = true;
      } else {
        ++it;
      }
    }
    if (pending.empty()) break;
    if (!progressed) {
      int k = pending.front();
      pending.erase(pending.begin());
      ChainEntry& e = chain.entries[size_t(k - 1)];
      e.kind = ChainEntry::Kind::Variable;
      e.variable_index = int(variables.size());
      e.v_bar = Matrix2::Identity();
      e.provenance = "variable";
      variables.push_back(k);
    }
  }

  chain.variables = variables;
  out.chain = std::move(chain);
  return out;
}

/// The two conditional-state pairs (<l| W_i Psi>, <l| V_i Phi>) with their
/// weights. Both branches must be matched by one remaining layer; the solver
/// keeps them joined in the final global check instead of recursing.
struct ProjectedBranchPair {
  ConditionalBranch psi_branch;
  ConditionalBranch phi_branch;
};

inline std::array<ProjectedBranchPair, 2> project_and_reduce(const PureState& psi,
                                                             const PureState& phi, int qubit,
                                                             const Matrix2& w_bar,
                                                             const Matrix2& v_bar) {
  if (psi.n != phi.n) throw std::invalid_argument("project_and_reduce: size mismatch");
  Spectrum2 sp = eig_hermitian2(partial_trace(psi, {qubit}), psi.tol);
  Spectrum2 sf = eig_hermitian2(partial_trace(phi, {qubit}), phi.tol);
  if (sp.degenerate || sf.degenerate) {
    throw std::invalid_argument(
        "project_and_reduce: degenerate local spectrum; use a variable instead");
  }
  if (std::abs(sp.lambda1 - sf.lambda1) > 10.0 * psi.tol.degeneracy) {
    throw std::invalid_argument("project_and_reduce: local spectra do not match");
  }
  LocalUnitaryLayer wl = LocalUnitaryLayer::identity(psi.n);
  wl.factors[size_t(qubit - 1)] = w_bar;
  LocalUnitaryLayer vl = LocalUnitaryLayer::identity(phi.n);
  vl.factors[size_t(qubit - 1)] = v_bar;
  PureState wpsi = apply_layer(wl, psi);
  PureState vphi = apply_layer(vl, phi);
  std::array<ProjectedBranchPair, 2> out;
  for (int l = 0; l < 2; ++l) {
    out[size_t(l)].psi_branch = conditional_state(wpsi, qubit, l);
    out[size_t(l)].phi_branch = conditional_state(vphi, qubit, l);
  }
  return out;
}

namespace detail {

/// W_bar factors for every qubit at a concrete variable assignment.
struct ChainEvaluation {
  std::vector<Matrix2> w_bars;
  std::vector<bool> flip_allowed;
  double max_spectra_diff = 0.0;
  bool mismatch = false;
};

inline ChainEvaluation evaluate_chain(const DependencyChain& chain, const PureState& psi,
                                      const std::vector<EulerZXZ>& vars) {
  ChainEvaluation ev;
  ev.w_bars.assign(size_t(chain.n), Matrix2::Identity());
  ev.flip_allowed.assign(size_t(chain.n), false);
  for (const ChainEntry& e : chain.entries) {
    switch (e.kind) {
      case ChainEntry::Kind::FixedSpectra:
        ev.w_bars[size_t(e.qubit - 1)] = e.w_fixed;
        break;
      case ChainEntry::Kind::Variable:
        ev.w_bars[size_t(e.qubit - 1)] = vars[size_t(e.variable_index)].w_bar();
        break;
      case ChainEntry::Kind::CrossBlock: {
        std::vector<Matrix2> assignment;
        assignment.reserve(e.deps.size());
        for (int dep : e.deps) {
          int vi = chain.entries[size_t(dep - 1)].variable_index;
          assignment.push_back(vars[size_t(vi)].unitary());
        }
        WkEvaluation wk = evaluate_Wk(*e.block, psi, assignment);
        ev.w_bars[size_t(e.qubit - 1)] = wk.w_bar;
        ev.flip_allowed[size_t(e.qubit - 1)] = wk.flip_allowed;
        ev.max_spectra_diff = std::max(ev.max_spectra_diff, wk.spectra_diff);
        ev.mismatch = ev.mismatch || wk.mismatch;
        break;
      }
    }
  }
  return ev;
}

inline std::vector<std::vector<int>> flip_patterns(const std::vector<bool>& allowed, int n) {
  std::vector<int> free_qubits;
  for (int q = 1; q <= n; ++q) {
    if (allowed[size_t(q - 1)]) free_qubits.push_back(q);
  }
  std::vector<std::vector<int>> patterns;
  const std::uint32_t count = 1u << free_qubits.size();
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    std::vector<int> flips(size_t(n), 0);
    for (size_t t = 0; t < free_qubits.size(); ++t) {
      if ((mask >> t) & 1u) flips[size_t(free_qubits[t] - 1)] = 1;
    }
    patterns.push_back(std::move(flips));
  }
  return patterns;
}

inline PureState apply_w_side(const PureState& psi, const std::vector<Matrix2>& w_bars,
                              const std::vector<int>& flips) {
  LocalUnitaryLayer layer(psi.n);
  for (int q = 1; q <= psi.n; ++q) {
    layer.factors[size_t(q - 1)] =
        flips[size_t(q - 1)] ? Matrix2(pauli_x() * w_bars[size_t(q - 1)]) : w_bars[size_t(q - 1)];
  }
  return apply_layer(layer, psi);
}

inline LocalUnitaryLayer assemble_certificate(const std::vector<Matrix2>& w_bars,
                                              const std::vector<int>& flips,
                                              const std::vector<Matrix2>& v_bars,
                                              const PhaseVector& ph) {
  // Inverting e^{i a0} (x)[U(a_i) X^{k_i} W_i] Psi = (x)V_i Phi gives
  // Psi = e^{-i a0} (x)[W_i^dag X^{k_i} U(-a_i) V_i] Phi.
  const int n = int(w_bars.size());
  LocalUnitaryLayer cert(n);
  cert.global_phase = wrap_angle(-ph.alpha0);
  for (int q = 0; q < n; ++q) {
    Matrix2 m = phase_gate(-ph.alpha[size_t(q)]) * v_bars[size_t(q)];
    if (flips[size_t(q)]) m = pauli_x() * m;
    cert.factors[size_t(q)] = w_bars[size_t(q)].adjoint() * m;
  }
  return cert;
}

}  // namespace detail

/// Full LU-equivalence decision.
///
/// Generic pairs go through the standard-form comparison. Everything else
/// builds the dependency chain; with no variables the flip/phase matching is
/// exhaustive, otherwise a seeded multi-start simplex search runs over the
/// Euler angles of the variable unitaries, minimizing
///   r(vars) = min over flip patterns of [1 - best phase-fit fidelity].
/// A failed search cannot certify non-equivalence, so it yields Undetermined.
inline Verdict decide_lu_equivalence(const PureState& psi, const PureState& phi,
                                     const LuConfig& config = {}) {
  if (psi.n != phi.n) throw std::invalid_argument("decide_lu_equivalence: size mismatch");
  const ToleranceContext& tol = psi.tol;
  const int n = psi.n;

  {
    StandardFormResult sp = sorted_trace_decomposition(psi);
    StandardFormResult sf = sorted_trace_decomposition(phi);
    if (sp.generic && sf.generic) return check_generic_equivalence(psi, phi);
  }

  ChainBuild build = build_chain(psi, phi);
  if (build.early) return detail::guard_not_equivalent(std::move(*build.early), psi, phi);
  const DependencyChain& chain = *build.chain;

  std::vector<Matrix2> v_bars(size_t(n), Matrix2::Identity());
  for (int q = 1; q <= n; ++q) v_bars[size_t(q - 1)] = chain.entries[size_t(q - 1)].v_bar;
  LocalUnitaryLayer v_layer(n);
  v_layer.factors = v_bars;
  const PureState b_side = apply_layer(v_layer, phi);

  auto demote = [&](Verdict v) {
    if (build.tainted && v.outcome == Outcome::NotEquivalent) {
      Verdict u = Verdict::make_undetermined(
          "negative evidence discarded: " + build.taint_note + " (was: " + v.witness + ")",
          v.residual);
      u.stats = v.stats;
      return u;
    }
    return v;
  };

  if (chain.variables.empty()) {
    detail::ChainEvaluation ev = detail::evaluate_chain(chain, psi, {});
    Verdict best = Verdict::make_undetermined("no flip pattern evaluated");
    for (const auto& flips : detail::flip_patterns(ev.flip_allowed, n)) {
      PureState a_side = detail::apply_w_side(psi, ev.w_bars, flips);
      Verdict pg = solve_phase_gates(b_side, a_side);
      if (pg.equivalent()) {
        LocalUnitaryLayer cert = detail::assemble_certificate(ev.w_bars, flips, v_bars, *pg.phases);
        double residual = verify_certificate(psi, phi, cert);
        if (residual <= tol.fidelity_accept) {
          Verdict v = Verdict::make_equivalent(std::move(cert), residual);
          v.phases = pg.phases;
          v.stats.path = "chain";
          v.stats.flip_patterns += 1;
          v.stats.best_residual = residual;
          return v;
        }
        pg = Verdict::make_undetermined(
            "phase fit accepted but certificate residual " + std::to_string(residual) +
            " exceeds acceptance", residual);
      }
      best = std::move(pg);
      best.stats.flip_patterns += 1;
    }
    best.stats.path = "chain";
    return detail::guard_not_equivalent(demote(std::move(best)), psi, phi);
  }

  // Variable search.
  const int nvars = int(chain.variables.size());
  const int dim = 3 * nvars;
  auto unpack = [&](const std::vector<double>& x) {
    std::vector<EulerZXZ> vars(static_cast<size_t>(nvars));
    for (int v = 0; v < nvars; ++v) {
      vars[size_t(v)] = EulerZXZ{x[size_t(3 * v)], x[size_t(3 * v + 1)], x[size_t(3 * v + 2)]};
    }
    return vars;
  };

  SearchStats stats;
  stats.variables = nvars;
  stats.path = "chain-search";

  auto objective = [&](const std::vector<double>& x) {
    detail::ChainEvaluation ev = detail::evaluate_chain(chain, psi, unpack(x));
    double best_r = 1.0;
    for (const auto& flips : detail::flip_patterns(ev.flip_allowed, n)) {
      PureState a_side = detail::apply_w_side(psi, ev.w_bars, flips);
      PhaseAlignment al = align_phases(a_side.amp, b_side.amp, n);
      best_r = std::min(best_r, 1.0 - al.fidelity);
    }
    return best_r;
  };

  Pcg32 rng(config.seed);
  NelderMeadOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.stop_below = tol.fidelity_accept;
  double best_residual = 2.0;
  std::vector<double> best_x;
  for (int start = 0; start < std::max(1, config.restarts); ++start) {
    std::vector<double> x0(size_t(dim), 0.0);
    if (start > 0) {
      for (double& xi : x0) xi = rng.uniform(0.0, kTwoPi);
    }
    NelderMeadResult r = nelder_mead(objective, std::move(x0), opt);
    stats.starts += 1;
    stats.evaluations += r.evaluations;
    if (r.f < best_residual) {
      best_residual = r.f;
      best_x = r.x;
    }
    if (best_residual <= tol.fidelity_accept) break;
  }
  stats.best_residual = best_residual;

  if (best_residual <= tol.fidelity_accept) {
    std::vector<EulerZXZ> vars = unpack(best_x);
    detail::ChainEvaluation ev = detail::evaluate_chain(chain, psi, vars);
    Verdict best_v = Verdict::make_undetermined("certificate assembly failed", best_residual);
    for (const auto& flips : detail::flip_patterns(ev.flip_allowed, n)) {
      PureState a_side = detail::apply_w_side(psi, ev.w_bars, flips);
      PhaseAlignment al = align_phases(a_side.amp, b_side.amp, n);
      stats.flip_patterns += 1;
      LocalUnitaryLayer cert = detail::assemble_certificate(ev.w_bars, flips, v_bars, al.phases);
      double residual = verify_certificate(psi, phi, cert);
      if (residual <= tol.fidelity_accept) {
        Verdict v = Verdict::make_equivalent(std::move(cert), residual);
        v.phases = al.phases;
        v.stats = stats;
        v.stats.best_residual = residual;
        return v;
      }
      if (residual < best_v.residual) {
        best_v = Verdict::make_undetermined(
            "search residual met acceptance but certificate verification gave " +
                std::to_string(residual),
            residual);
      }
    }
    best_v.stats = stats;
    return best_v;
  }

  Verdict v = Verdict::make_undetermined(
      "variable search did not reach the acceptance residual (best " +
          std::to_string(best_residual) + " after " + std::to_string(stats.starts) + " starts)",
      best_residual);
  v.stats = stats;
  return v;
}

/// Multi-start minimization of 1 - |<Psi|(x)U_i|Phi>| over all 3n Euler
/// angles. A testing oracle: slow, assumption-free, deterministic per seed.
struct OracleResult {
  double residual = 1.0;
  LocalUnitaryLayer layer;
  long evaluations = 0;
  int starts = 0;
};

inline OracleResult brute_force_oracle(const PureState& psi, const PureState& phi, int restarts,
                                       std::uint64_t seed) {
  if (psi.n != phi.n) throw std::invalid_argument("brute_force_oracle: size mismatch");
  const int n = psi.n;
  const int dim = 3 * n;
  auto layer_of = [&](const std::vector<double>& x) {
    LocalUnitaryLayer layer(n);
    for (int q = 0; q < n; ++q) {
      layer.factors[size_t(q)] =
          EulerZXZ{x[size_t(3 * q)], x[size_t(3 * q + 1)], x[size_t(3 * q + 2)]}.unitary();
    }
    return layer;
  };
  auto objective = [&](const std::vector<double>& x) {
    return 1.0 - std::abs(overlap(psi, apply_layer(layer_of(x), phi)));
  };

  Pcg32 rng(seed);
  NelderMeadOptions opt;
  opt.stop_below = 1e-12;
  OracleResult out;
  std::vector<double> best_x(size_t(dim), 0.0);
  out.residual = objective(best_x);
  for (int start = 0; start < std::max(1, restarts); ++start) {
    std::vector<double> x0(size_t(dim), 0.0);
    if (start > 0) {
      for (double& xi : x0) xi = rng.uniform(0.0, kTwoPi);
    }
    NelderMeadResult r = nelder_mead(objective, std::move(x0), opt);
    out.evaluations += r.evaluations;
    out.starts += 1;
    if (r.f < out.residual) {
      out.residual = r.f;
      best_x = r.x;
    }
    if (out.residual <= opt.stop_below) break;
  }
  out.layer = layer_of(best_x);
  out.layer.global_phase = wrap_angle(-std::arg(overlap(psi, apply_layer(out.layer, phi))));
  out.residual = 1.0 - std::abs(overlap(psi, apply_layer(out.layer, phi)));
  return out;
}

/// LU-equivalence criterion for mixed states: pick a matching non-degenerate
/// eigenvalue, decide equivalence of the eigenvectors, and verify that the
/// certificate also maps rho onto sigma. The certificate maps sigma to rho.
inline Verdict mixed_state_criterion(const MatrixX& rho, const MatrixX& sigma,
                                     const LuConfig& config = {},
                                     const ToleranceContext& tol = {}) {
  if (rho.rows() != rho.cols() || sigma.rows() != sigma.cols() || rho.rows() != sigma.rows()) {
    throw std::invalid_argument("mixed_state_criterion: need equal square matrices");
  }
  int n = 0;
  while ((Eigen::Index(1) << n) < rho.rows()) ++n;
  if ((Eigen::Index(1) << n) != rho.rows() || n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("mixed_state_criterion: dimension must be 2^n");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 100 * tol.hermitian ||
      (sigma - sigma.adjoint()).cwiseAbs().maxCoeff() > 100 * tol.hermitian) {
    throw std::invalid_argument("mixed_state_criterion: inputs are not Hermitian");
  }

  Eigen::SelfAdjointEigenSolver<MatrixX> er(rho);
  Eigen::SelfAdjointEigenSolver<MatrixX> es(sigma);
  const Eigen::Index d = rho.rows();

  // Eigen sorts ascending; walk from the top.
  double spectra_diff = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    spectra_diff = std::max(spectra_diff, std::abs(er.eigenvalues()[i] - es.eigenvalues()[i]));
  }
  if (spectra_diff > 10.0 * tol.degeneracy) {
    return Verdict::make_not_equivalent(
        "density-matrix spectra differ (max eigenvalue deviation " +
            std::to_string(spectra_diff) + ")",
        spectra_diff);
  }
  if (spectra_diff > tol.degeneracy) {
    return Verdict::make_undetermined(
        "density-matrix spectra differ by " + std::to_string(spectra_diff) +
        ", inside the 10x rejection margin");
  }

  auto isolated = [&](const Eigen::VectorXd& ev, Eigen::Index i) {
    double gap = std::numeric_limits<double>::infinity();
    if (i > 0) gap = std::min(gap, ev[i] - ev[i - 1]);
    if (i + 1 < d) gap = std::min(gap, ev[i + 1] - ev[i]);
    return gap > tol.degeneracy;
  };

  for (Eigen::Index i = d - 1; i >= 0; --i) {
    if (er.eigenvalues()[i] < tol.degeneracy) break;  // ignore the kernel
    if (!isolated(er.eigenvalues(), i) || !isolated(es.eigenvalues(), i)) continue;
    PureState psi = PureState::normalized(n, er.eigenvectors().col(i), tol);
    PureState phi = PureState::normalized(n, es.eigenvectors().col(i), tol);
    Verdict v = decide_lu_equivalence(psi, phi, config);
    if (v.outcome == Outcome::NotEquivalent) {
      v.witness = "eigenvectors of the shared non-degenerate eigenvalue " +
                  std::to_string(er.eigenvalues()[i]) + " are not LU-equivalent: " + v.witness;
      return v;
    }
    if (v.outcome == Outcome::Undetermined) return v;
    double frob = (apply_layer_density(*v.certificate, sigma, n) - rho).norm();
    if (frob <= 1e-8) {
      v.residual = frob;
      return v;
    }
    // The certificate is only fixed up to the symmetry of the eigenvector.
    // When that symmetry has a continuous part (a sparse support leaves
    // phase-gate directions free), sweep it for a member that also maps the
    // full matrices. Discrete symmetry elements are not enumerated.
    StandardFormResult fp = standard_form(psi);
    StandardFormResult ff = standard_form(phi);
    if (fp.generic && ff.generic) {
      SupportStructure sup = support_structure(ff.canonical);
      Eigen::MatrixXd rows(Eigen::Index(sup.S.size()), n + 1);
      for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        rows(r, 0) = 1.0;
        for (int k = 1; k <= n; ++k) rows(r, k) = double(bit_of(sup.S[size_t(r)], k, n));
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
      if (lu.dimensionOfKernel() > 0) {
        Eigen::MatrixXd kernel = lu.kernel();
        const int f = int(kernel.cols());
        auto family_member = [&](const std::vector<double>& t) {
          Eigen::VectorXd angles = Eigen::VectorXd::Zero(n + 1);
          for (int d = 0; d < f; ++d) angles += t[size_t(d)] * kernel.col(d);
          LocalUnitaryLayer stab(n);
          stab.global_phase = wrap_angle(angles[0]);
          for (int k = 1; k <= n; ++k) stab.factors[size_t(k - 1)] = phase_gate(angles[k]);
          return compose(adjoint(fp.layer), compose(stab, ff.layer));
        };
        auto objective = [&](const std::vector<double>& t) {
          return (apply_layer_density(family_member(t), sigma, n) - rho).norm();
        };
        Pcg32 rng(config.seed + 0x6d69786564ULL);
        NelderMeadOptions opt;
        opt.max_iterations = 400;
        opt.stop_below = 1e-10;
        double best = frob;
        std::vector<double> best_t(size_t(f), 0.0);
        for (int start = 0; start < 16; ++start) {
          std::vector<double> t0(size_t(f), 0.0);
          if (start > 0) {
            for (double& ti : t0) ti = rng.uniform(-2.0 * kTwoPi, 2.0 * kTwoPi);
          }
          NelderMeadResult r = nelder_mead(objective, std::move(t0), opt);
          if (r.f < best) {
            best = r.f;
            best_t = r.x;
          }
          if (best <= 1e-10) break;
        }
        if (best <= 1e-8) {
          LocalUnitaryLayer cert = family_member(best_t);
          if (verify_certificate(psi, phi, cert) <= tol.fidelity_accept) {
            Verdict ok = Verdict::make_equivalent(std::move(cert), best);
            ok.stats = v.stats;
            return ok;
          }
        }
      }
    }
    return Verdict::make_undetermined(
        "eigenvector certificate does not map the density matrices (Frobenius residual " +
            std::to_string(frob) + "); the discrete symmetry family is not enumerated",
        frob);
  }
  return Verdict::make_undetermined("criterion inapplicable: no matching non-degenerate eigenvalue");
}

}  // namespace luq
