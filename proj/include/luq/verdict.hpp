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

#include <optional>
#include <string>

#include "luq/phase_fit.hpp"
#include "luq/state.hpp"

namespace luq {

enum class Outcome { Equivalent, NotEquivalent, Undetermined };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Equivalent: return "equivalent";
    case Outcome::NotEquivalent: return "not_equivalent";
    case Outcome::Undetermined: return "undetermined";
  }
  return "undetermined";
}

struct SearchStats {
  int variables = 0;
  int starts = 0;
  long evaluations = 0;
  int flip_patterns = 0;
  double best_residual = 1.0;
  std::string path;  // "generic", "chain", "chain-search", ...
};

/// Three-valued decision. Equivalent always carries a verified certificate;
/// NotEquivalent carries a witness whose margin cleared 10x the relevant
/// tolerance; Undetermined carries whatever diagnostics the search produced.
struct Verdict {
  Outcome outcome = Outcome::Undetermined;
  std::optional<LocalUnitaryLayer> certificate;
  double residual = 1.0;
  std::string witness;
  double witness_margin = 0.0;
  std::optional<PhaseVector> phases;
  SearchStats stats;

  bool equivalent() const { return outcome == Outcome::Equivalent; }

  static Verdict make_equivalent(LocalUnitaryLayer cert, double residual_) {
    Verdict v;
    v.outcome = Outcome::Equivalent;
    v.certificate = std::move(cert);
    v.residual = residual_;
    return v;
  }

  static Verdict make_not_equivalent(std::string witness_, double margin) {
    Verdict v;
    v.outcome = Outcome::NotEquivalent;
    v.witness = std::move(witness_);
    v.witness_margin = margin;
    return v;
  }

  static Verdict make_undetermined(std::string note, double best_residual = 1.0) {
    Verdict v;
    v.outcome = Outcome::Undetermined;
    v.witness = std::move(note);
    v.residual = best_residual;
    v.stats.best_residual = best_residual;
    return v;
  }
};

}  // namespace luq
