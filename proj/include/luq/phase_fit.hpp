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

#include "luq/state.hpp"

namespace luq {

/// Global phase plus n phase-gate angles diag(1, e^{i alpha_k}), all in
/// [0, 2*pi). `free_mask[k]` marks angles the solved system left
/// underdetermined (pinned to 0); index 0 is the global phase.
struct PhaseVector {
  double alpha0 = 0.0;
  std::vector<double> alpha;      // size n
  std::vector<bool> free_mask;    // size n + 1, index 0 = global phase

  LocalUnitaryLayer as_layer() const {
    LocalUnitaryLayer l(int(alpha.size()));
    l.global_phase = wrap_angle(alpha0);
    for (size_t k = 0; k < alpha.size(); ++k) l.factors[k] = phase_gate(alpha[k]);
    return l;
  }
};

/// One constraint of the affine phase system:
///   alpha_0 + sum_k alpha_k * bit_k(index) == rhs   (mod 2*pi).
struct PhaseRow {
  std::uint32_t index = 0;
  double rhs = 0.0;
};

struct AffineFitResult {
  PhaseVector phases;
  double max_residual = 0.0;         // wrapped residual over all rows
  std::uint32_t worst_row = 0;       // index of the row with max residual
  bool consistent = false;           // max_residual <= tol.phase
};

/// Solve the 0/1 affine phase system on a maximal independent subset of the
/// given rows (scanned in order, so lexicographically earlier rows win),
/// pin free angles to 0, and report the wrapped residual of every row.
///
/// Entries of the coefficient matrix are 0/1 plus the all-ones global-phase
/// column, so elimination pivots are rationals bounded away from zero by far
/// more than the rounding noise; a fixed pivot threshold keeps the pivot
/// pattern exact.
inline AffineFitResult solve_affine_phases(const std::vector<PhaseRow>& rows, int n,
                                           const ToleranceContext& tol = {}) {
  const int cols = n + 1;
  const int m = int(rows.size());
  Eigen::MatrixXd a(m, cols);
  Eigen::VectorXd b(m);
  for (int r = 0; r < m; ++r) {
    a(r, 0) = 1.0;
    for (int k = 1; k <= n; ++k) a(r, k) = double(bit_of(rows[size_t(r)].index, k, n));
    b[r] = wrap_residual(rows[size_t(r)].rhs);
  }

  constexpr double kPivotEps = 1e-9;
  std::vector<int> pivot_col_of_row(size_t(m), -1);
  std::vector<int> pivot_row_of_col(size_t(cols), -1);
  int rank = 0;
  for (int col = 0; col < cols && rank < m; ++col) {
    int prow = -1;
    for (int r = rank; r < m; ++r) {
      if (std::abs(a(r, col)) > kPivotEps) {
        prow = r;
        break;
      }
    }
    if (prow < 0) continue;
    a.row(rank).swap(a.row(prow));
    std::swap(b[rank], b[prow]);
    for (int r = 0; r < m; ++r) {
      if (r == rank) continue;
      double f = a(r, col) / a(rank, col);
      if (f != 0.0) {
        a.row(r) -= f * a.row(rank);
        b[r] -= f * b[rank];
      }
    }
    pivot_col_of_row[size_t(rank)] = col;
    pivot_row_of_col[size_t(col)] = rank;
    ++rank;
  }

  AffineFitResult out;
  out.phases.alpha.assign(size_t(n), 0.0);
  out.phases.free_mask.assign(size_t(cols), false);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  for (int col = 0; col < cols; ++col) {
    int r = pivot_row_of_col[size_t(col)];
    if (r < 0) {
      out.phases.free_mask[size_t(col)] = true;  // pinned to 0
    } else {
      x[col] = b[r] / a(r, col);
    }
  }
  out.phases.alpha0 = wrap_angle(x[0]);
  for (int k = 1; k <= n; ++k) out.phases.alpha[size_t(k - 1)] = wrap_angle(x[k]);

  for (int r = 0; r < m; ++r) {
    double lhs = out.phases.alpha0;
    for (int k = 1; k <= n; ++k) {
      if (bit_of(rows[size_t(r)].index, k, n)) lhs += out.phases.alpha[size_t(k - 1)];
    }
    double res = std::abs(wrap_residual(lhs - rows[size_t(r)].rhs));
    if (res > out.max_residual) {
      out.max_residual = res;
      out.worst_row = rows[size_t(r)].index;
    }
  }
  out.consistent = out.max_residual <= tol.phase;
  return out;
}

/// Best phase-gate alignment of two raw amplitude vectors: maximize
///   |f(z)| with f(z) = sum_i conj(b_i) a_i prod_k z_k^{bit_k(i)},  |z_k| = 1,
/// i.e. the fidelity |<b| e^{i a0} (x)U(alpha) |a>| optimized over all phase
/// gates. f is multilinear in the z_k, so each coordinate has a closed-form
/// optimum and cyclic ascent increases |f| monotonically. Seeded from both
/// the all-ones point and an exact affine fit of the dominant amplitudes.
struct PhaseAlignment {
  PhaseVector phases;    // alpha0 chosen so the aligned overlap is real positive
  double fidelity = 0.0; // |f| at the optimum (<= 1 for unit vectors)
};

inline PhaseAlignment align_phases(const Vector& a, const Vector& b, int n) {
  const std::uint32_t dim = std::uint32_t(a.size());
  Vector c(dim);
  for (std::uint32_t i = 0; i < dim; ++i) c[i] = std::conj(b[i]) * a[i];

  auto objective = [&](const std::vector<Complex>& z) {
    Complex f = 0.0;
    for (std::uint32_t i = 0; i < dim; ++i) {
      Complex t = c[i];
      for (int k = 1; k <= n; ++k) {
        if (bit_of(i, k, n)) t *= z[size_t(k - 1)];
      }
      f += t;
    }
    return f;
  };

  auto ascend = [&](std::vector<Complex> z) {
    Complex f = objective(z);
    for (int sweep = 0; sweep < 80; ++sweep) {
      double before = std::abs(f);
      for (int k = 1; k <= n; ++k) {
        Complex p = 0.0, q = 0.0;
        for (std::uint32_t i = 0; i < dim; ++i) {
          Complex t = c[i];
          for (int j = 1; j <= n; ++j) {
            if (j != k && bit_of(i, j, n)) t *= z[size_t(j - 1)];
          }
          (bit_of(i, k, n) ? q : p) += t;
        }
        double ap = std::abs(p), aq = std::abs(q);
        if (ap > 1e-300 && aq > 1e-300) z[size_t(k - 1)] = (p / ap) * std::conj(q / aq);
        f = p + z[size_t(k - 1)] * q;
      }
      if (std::abs(f) - before < 1e-15 * (1.0 + std::abs(f))) break;
    }
    return std::pair<std::vector<Complex>, Complex>(std::move(z), f);
  };

  // Seed 1: exact affine fit on the dominant support.
  double cmax = 0.0;
  for (std::uint32_t i = 0; i < dim; ++i) cmax = std::max(cmax, std::abs(c[i]));
  std::vector<PhaseRow> rows;
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (std::abs(c[i]) >= 1e-2 * cmax) rows.push_back({i, -std::arg(c[i])});
  }
  std::vector<Complex> z_fit(static_cast<size_t>(n));
  {
    AffineFitResult fit = solve_affine_phases(rows, n);
    for (int k = 0; k < n; ++k) z_fit[size_t(k)] = std::polar(1.0, fit.phases.alpha[size_t(k)]);
  }
  auto r1 = ascend(std::move(z_fit));
  auto r2 = ascend(std::vector<Complex>(size_t(n), Complex(1.0, 0.0)));
  const auto& best = (std::abs(r1.second) >= std::abs(r2.second)) ? r1 : r2;

  PhaseAlignment out;
  out.fidelity = std::abs(best.second);
  out.phases.alpha.resize(size_t(n));
  out.phases.free_mask.assign(size_t(n) + 1, false);
  for (int k = 0; k < n; ++k) out.phases.alpha[size_t(k)] = wrap_angle(std::arg(best.first[size_t(k)]));
  out.phases.alpha0 = wrap_angle(-std::arg(best.second));
  return out;
}

}  // namespace luq
