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
#include <functional>
#include <limits>
#include <vector>

namespace luq {

struct NelderMeadOptions {
  int max_iterations = 2000;
  double f_tolerance = 1e-13;     // stop when the simplex f-spread is below
  double x_tolerance = 1e-11;     // ... or the simplex diameter is below
  double initial_step = 0.35;     // per-coordinate offset of the start simplex
  double stop_below = -1.0;       // stop early once f <= this (disabled if < 0)
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  long evaluations = 0;
};

/// Derivative-free simplex minimization with the standard reflection /
/// expansion / contraction / shrink coefficients (1, 2, 0.5, 0.5).
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  const int dim = int(x0.size());
  NelderMeadResult result;

  std::vector<std::vector<double>> xs(size_t(dim) + 1, x0);
  std::vector<double> fs(size_t(dim) + 1);
  for (int i = 1; i <= dim; ++i) xs[size_t(i)][size_t(i - 1)] += opt.initial_step;
  for (int i = 0; i <= dim; ++i) {
    fs[size_t(i)] = f(xs[size_t(i)]);
    ++result.evaluations;
  }

  std::vector<int> order(size_t(dim) + 1);
  std::vector<double> centroid(static_cast<size_t>(dim));
  std::vector<double> xr(static_cast<size_t>(dim)), xe(static_cast<size_t>(dim)), xc(static_cast<size_t>(dim));

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    result.iterations = iter + 1;
    for (int i = 0; i <= dim; ++i) order[size_t(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int p, int q) { return fs[size_t(p)] < fs[size_t(q)]; });
    const int best = order[0], worst = order[size_t(dim)], second_worst = order[size_t(dim - 1)];

    if (opt.stop_below >= 0 && fs[size_t(best)] <= opt.stop_below) break;
    if (fs[size_t(worst)] - fs[size_t(best)] <= opt.f_tolerance) break;
    double diam = 0.0;
    for (int i = 1; i <= dim; ++i) {
      for (int d = 0; d < dim; ++d) {
        diam = std::max(diam, std::abs(xs[size_t(order[size_t(i)])][size_t(d)] -
                                       xs[size_t(best)][size_t(d)]));
      }
    }
    if (diam <= opt.x_tolerance) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (int i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (int d = 0; d < dim; ++d) centroid[size_t(d)] += xs[size_t(i)][size_t(d)];
    }
    for (int d = 0; d < dim; ++d) centroid[size_t(d)] /= double(dim);

    auto blend = [&](std::vector<double>& out, double t) {
      for (int d = 0; d < dim; ++d) {
        out[size_t(d)] = centroid[size_t(d)] + t * (xs[size_t(worst)][size_t(d)] - centroid[size_t(d)]);
      }
    };

    blend(xr, -1.0);
    double fr = f(xr);
    ++result.evaluations;
    if (fr < fs[size_t(best)]) {
      blend(xe, -2.0);
      double fe = f(xe);
      ++result.evaluations;
      if (fe < fr) {
        xs[size_t(worst)] = xe;
        fs[size_t(worst)] = fe;
      } else {
        xs[size_t(worst)] = xr;
        fs[size_t(worst)] = fr;
      }
      continue;
    }
    if (fr < fs[size_t(second_worst)]) {
      xs[size_t(worst)] = xr;
      fs[size_t(worst)] = fr;
      continue;
    }
    const bool outside = fr < fs[size_t(worst)];
    blend(xc, outside ? -0.5 : 0.5);
    double fc = f(xc);
    ++result.evaluations;
    if (fc < (outside ? fr : fs[size_t(worst)])) {
      xs[size_t(worst)] = xc;
      fs[size_t(worst)] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (int i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (int d = 0; d < dim; ++d) {
        xs[size_t(i)][size_t(d)] =
            xs[size_t(best)][size_t(d)] + 0.5 * (xs[size_t(i)][size_t(d)] - xs[size_t(best)][size_t(d)]);
      }
      fs[size_t(i)] = f(xs[size_t(i)]);
      ++result.evaluations;
    }
  }

  int best = 0;
  for (int i = 1; i <= dim; ++i) {
    if (fs[size_t(i)] < fs[size_t(best)]) best = i;
  }
  result.x = xs[size_t(best)];
  result.f = fs[size_t(best)];
  return result;
}

}  // namespace luq
