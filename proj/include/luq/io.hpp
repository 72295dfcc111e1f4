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

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "luq/state.hpp"
#include "luq/verdict.hpp"

namespace luq {

using Json = nlohmann::json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A state as loaded from disk: normalized, with the original vector norm.
struct LoadedState {
  PureState state;
  double original_norm = 1.0;
};

/// State file format: { "n": int, "amplitudes": [[re, im], ...] } with 2^n
/// entries, qubit 1 the most significant bit. Input amplitudes need not be
/// normalized; the loader normalizes and records the original norm.
inline LoadedState state_from_json(const Json& j, ToleranceContext tol = {}) {
  if (!j.is_object() || !j.contains("n") || !j.contains("amplitudes")) {
    throw ParseError("state: expected an object with \"n\" and \"amplitudes\"");
  }
  int n = 0;
  try {
    n = j.at("n").get<int>();
  } catch (const Json::exception&) {
    throw ParseError("state: \"n\" must be an integer");
  }
  if (n < 1 || n > kMaxQubits) {
    throw ParseError("state: n out of range [1," + std::to_string(kMaxQubits) + "]");
  }
  const auto& amps = j.at("amplitudes");
  if (!amps.is_array() || amps.size() != size_t(1) << n) {
    throw ParseError("state: \"amplitudes\" must be an array of 2^n [re, im] pairs");
  }
  Vector v(Eigen::Index(1) << n);
  for (size_t i = 0; i < amps.size(); ++i) {
    const auto& e = amps[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ParseError("state: amplitude " + std::to_string(i) + " is not an [re, im] pair");
    }
    v[Eigen::Index(i)] = Complex(e[0].get<double>(), e[1].get<double>());
  }
  LoadedState out;
  out.original_norm = v.norm();
  if (out.original_norm <= tol.norm) throw ParseError("state: amplitude vector is (near) zero");
  out.state = PureState(n, v / out.original_norm, tol);
  return out;
}

inline Json state_to_json(const PureState& state) {
  Json amps = Json::array();
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    amps.push_back({state.amp[i].real(), state.amp[i].imag()});
  }
  return Json{{"n", state.n}, {"amplitudes", std::move(amps)}};
}

inline Json unitaries_to_json(const LocalUnitaryLayer& layer) {
  Json us = Json::array();
  for (const Matrix2& u : layer.factors) {
    us.push_back({{{u(0, 0).real(), u(0, 0).imag()}, {u(0, 1).real(), u(0, 1).imag()}},
                  {{u(1, 0).real(), u(1, 0).imag()}, {u(1, 1).real(), u(1, 1).imag()}}});
  }
  return us;
}

/// Layer file format: { "n": int, "global_phase": float, "unitaries": [...] }.
inline Json layer_to_json(const LocalUnitaryLayer& layer) {
  return Json{{"n", layer.n()},
              {"global_phase", layer.global_phase},
              {"unitaries", unitaries_to_json(layer)}};
}

/// Accepts any object carrying "global_phase" and "unitaries" (layer files
/// and certificates alike).
inline LocalUnitaryLayer layer_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("unitaries") || !j.contains("global_phase")) {
    throw ParseError("layer: expected an object with \"global_phase\" and \"unitaries\"");
  }
  const auto& us = j.at("unitaries");
  if (!us.is_array() || us.empty()) throw ParseError("layer: \"unitaries\" must be a non-empty array");
  LocalUnitaryLayer layer(int(us.size()));
  if (!j.at("global_phase").is_number()) throw ParseError("layer: \"global_phase\" must be a number");
  layer.global_phase = wrap_angle(j.at("global_phase").get<double>());
  for (size_t q = 0; q < us.size(); ++q) {
    const auto& u = us[q];
    if (!u.is_array() || u.size() != 2) throw ParseError("layer: unitary " + std::to_string(q) + " malformed");
    for (int r = 0; r < 2; ++r) {
      const auto& row = u[size_t(r)];
      if (!row.is_array() || row.size() != 2) {
        throw ParseError("layer: unitary " + std::to_string(q) + " malformed");
      }
      for (int c = 0; c < 2; ++c) {
        const auto& e = row[size_t(c)];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
          throw ParseError("layer: unitary " + std::to_string(q) + " entry is not [re, im]");
        }
        layer.factors[q](r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      }
    }
  }
  return layer;
}

/// Certificate format:
/// { "verdict": "equivalent"|"not_equivalent"|"undetermined",
///   "global_phase": float, "unitaries": [...], "residual": float,
///   "witness": string|null, "diagnostics": {...} }.
inline Json verdict_to_json(const Verdict& v) {
  Json j;
  j["verdict"] = to_string(v.outcome);
  if (v.certificate) {
    j["global_phase"] = v.certificate->global_phase;
    j["unitaries"] = unitaries_to_json(*v.certificate);
    j["residual"] = v.residual;
  } else {
    j["global_phase"] = 0.0;
    j["unitaries"] = Json::array();
    j["residual"] = v.outcome == Outcome::Undetermined ? Json(v.residual) : Json(nullptr);
  }
  j["witness"] = v.witness.empty() ? Json(nullptr) : Json(v.witness);
  Json diag;
  diag["path"] = v.stats.path;
  diag["variables"] = v.stats.variables;
  diag["starts"] = v.stats.starts;
  diag["evaluations"] = v.stats.evaluations;
  diag["flip_patterns"] = v.stats.flip_patterns;
  diag["best_residual"] = v.stats.best_residual;
  if (v.outcome == Outcome::NotEquivalent) diag["witness_margin"] = v.witness_margin;
  j["diagnostics"] = std::move(diag);
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace luq
