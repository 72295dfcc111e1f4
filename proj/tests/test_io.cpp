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

#include <catch2/catch_amalgamated.hpp>

#include "luq/io.hpp"
#include "luq/lu_solver.hpp"
#include "luq/random.hpp"

using namespace luq;

TEST_CASE("state JSON round trip and normalization on load", "[io]") {
  Pcg32 rng(3);
  PureState psi = random_state(3, rng);
  LoadedState back = state_from_json(state_to_json(psi));
  REQUIRE(back.state.n == 3);
  REQUIRE((back.state.amp - psi.amp).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE(back.original_norm == Catch::Approx(1.0));

  // Unnormalized input: the loader normalizes and keeps the original norm.
  Json j = Json{{"n", 1}, {"amplitudes", {{3.0, 0.0}, {4.0, 0.0}}}};
  LoadedState scaled = state_from_json(j);
  REQUIRE(scaled.original_norm == Catch::Approx(5.0));
  REQUIRE(std::abs(scaled.state.amp[0] - Complex(0.6, 0)) < 1e-15);
}

TEST_CASE("state JSON rejects malformed input", "[io]") {
  REQUIRE_THROWS_AS(state_from_json(Json::array()), ParseError);
  REQUIRE_THROWS_AS(state_from_json(Json{{"n", 2}, {"amplitudes", {{1.0, 0.0}}}}), ParseError);
  REQUIRE_THROWS_AS(state_from_json(Json{{"n", 0}, {"amplitudes", Json::array()}}), ParseError);
  Json bad_entry = Json{{"n", 1}, {"amplitudes", {{1.0, 0.0}, {"x", 0.0}}}};
  REQUIRE_THROWS_AS(state_from_json(bad_entry), ParseError);
  Json zero = Json{{"n", 1}, {"amplitudes", {{0.0, 0.0}, {0.0, 0.0}}}};
  REQUIRE_THROWS_AS(state_from_json(zero), ParseError);
}

TEST_CASE("layer JSON round trip", "[io]") {
  Pcg32 rng(9);
  LocalUnitaryLayer layer = random_layer(3, rng);
  layer.global_phase = 1.25;
  LocalUnitaryLayer back = layer_from_json(layer_to_json(layer));
  REQUIRE(back.n() == 3);
  REQUIRE(back.global_phase == Catch::Approx(1.25));
  for (int q = 0; q < 3; ++q) {
    REQUIRE((back.factors[size_t(q)] - layer.factors[size_t(q)]).cwiseAbs().maxCoeff() < 1e-15);
  }
  REQUIRE_THROWS_AS(layer_from_json(Json{{"global_phase", 0.0}}), ParseError);
}

TEST_CASE("verdict JSON carries the certificate fields", "[io]") {
  Pcg32 rng(15);
  PureState psi = random_state(2, rng);
  PureState moved = apply_layer(random_layer(2, rng), psi);
  Verdict v = decide_lu_equivalence(psi, moved);
  REQUIRE(v.equivalent());
  Json j = verdict_to_json(v);
  REQUIRE(j.at("verdict") == "equivalent");
  REQUIRE(j.at("witness").is_null());
  REQUIRE(j.at("unitaries").size() == 2);
  REQUIRE(j.at("residual").get<double>() <= 1e-8);

  // The emitted certificate replays through layer_from_json.
  LocalUnitaryLayer replay = layer_from_json(j);
  REQUIRE(verify_certificate(psi, moved, replay) <= 1e-8);

  Verdict ne = decide_lu_equivalence(ghz_state(3), w_state(3));
  Json jn = verdict_to_json(ne);
  REQUIRE(jn.at("verdict") == "not_equivalent");
  REQUIRE(jn.at("witness").is_string());
  REQUIRE(jn.at("unitaries").empty());
  REQUIRE(jn.at("residual").is_null());
  REQUIRE(jn.at("diagnostics").contains("witness_margin"));
}
