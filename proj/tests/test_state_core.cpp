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

#include "luq/random.hpp"
#include "luq/state.hpp"

using namespace luq;

namespace {

Matrix2 hadamard() {
  Matrix2 h;
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("PureState validates its invariants", "[state]") {
  Vector good(4);
  good << 0.5, 0.5, 0.5, 0.5;
  REQUIRE_NOTHROW(PureState(2, good));
  REQUIRE_THROWS_AS(PureState(2, Vector::Ones(4)), std::invalid_argument);  // not normalized
  REQUIRE_THROWS_AS(PureState(3, good), std::invalid_argument);             // wrong length
  REQUIRE_THROWS_AS(PureState(0, Vector::Ones(1)), std::invalid_argument);
  REQUIRE_THROWS_AS(PureState(13, Vector::Zero(1 << 13)), std::invalid_argument);
}

TEST_CASE("partial_trace on the Bell state is maximally mixed", "[state]") {
  PureState bell = PureState::normalized(2, (Vector(4) << 1, 0, 0, 1).finished());
  HermitianReduced rho = partial_trace(bell, {1});
  REQUIRE((rho.mat - 0.5 * MatrixX::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial_trace of a product state is a projector", "[state]") {
  Pcg32 rng(7);
  PureState chi = random_state(2, rng);
  Vector full = Vector::Zero(8);
  for (int i = 0; i < 4; ++i) full[i] = chi.amp[i];  // |0> (x) |chi>
  PureState prod = PureState::normalized(3, full);
  HermitianReduced rho = partial_trace(prod, {1});
  MatrixX expect = MatrixX::Zero(2, 2);
  expect(0, 0) = 1.0;
  REQUIRE((rho.mat - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial_trace of the W state, brute-force oracle value", "[state]") {
  PureState w = w_state(3);
  HermitianReduced rho = partial_trace(w, {1});
  // Independent route: sum the two <i2 i3| blocks directly.
  MatrixX expect = MatrixX::Zero(2, 2);
  for (std::uint32_t e = 0; e < 4; ++e) {
    std::uint32_t i0 = e;       // qubit 1 = 0
    std::uint32_t i1 = e | 4u;  // qubit 1 = 1
    expect(0, 0) += std::norm(w.amp[i0]);
    expect(0, 1) += w.amp[i0] * std::conj(w.amp[i1]);
    expect(1, 0) += w.amp[i1] * std::conj(w.amp[i0]);
    expect(1, 1) += std::norm(w.amp[i1]);
  }
  REQUIRE((rho.mat - expect).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE(rho.mat(0, 0).real() == Catch::Approx(2.0 / 3.0));
  REQUIRE(rho.mat(1, 1).real() == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("partial_trace rejects bad subsets", "[state]") {
  PureState ghz = ghz_state(3);
  REQUIRE_THROWS_AS(partial_trace(ghz, {0}), std::invalid_argument);
  REQUIRE_THROWS_AS(partial_trace(ghz, {4}), std::invalid_argument);
  REQUIRE_THROWS_AS(partial_trace(ghz, {1, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(partial_trace(ghz, {}), std::invalid_argument);
}

TEST_CASE("partial_trace results are unit-trace positive semidefinite", "[state][property]") {
  Pcg32 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + int(rng.next_u32() % 4);
    PureState psi = random_state(n, rng);
    std::vector<int> keep{1 + int(rng.next_u32() % std::uint32_t(n))};
    int second = 1 + int(rng.next_u32() % std::uint32_t(n));
    if (second != keep[0]) keep.push_back(second);
    HermitianReduced rho = partial_trace(psi, keep);
    REQUIRE(std::abs(rho.mat.trace().real() - 1.0) < 1e-10);
    REQUIRE(std::abs(rho.mat.trace().imag()) < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixX> es(rho.mat);
    REQUIRE(es.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("apply_layer basics", "[state]") {
  PureState ghz = ghz_state(3);
  PureState same = apply_layer(LocalUnitaryLayer::identity(3), ghz);
  REQUIRE((same.amp - ghz.amp).cwiseAbs().maxCoeff() == 0.0);

  LocalUnitaryLayer x1(2);
  x1.factors[0] = pauli_x();
  PureState flipped = apply_layer(x1, PureState::basis(2, 0));
  REQUIRE(std::abs(flipped.amp[2] - Complex(1, 0)) < 1e-15);  // |10>

  LocalUnitaryLayer hh(2);
  hh.factors[0] = hadamard();
  hh.factors[1] = hadamard();
  PureState plus = apply_layer(hh, PureState::basis(2, 0));
  for (int i = 0; i < 4; ++i) REQUIRE(std::abs(plus.amp[i] - Complex(0.5, 0)) < 1e-14);
}

TEST_CASE("apply_layer composes and is covariant under partial_trace", "[state][property]") {
  Pcg32 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + int(rng.next_u32() % 3);
    PureState psi = random_state(n, rng);
    LocalUnitaryLayer l = random_layer(n, rng);
    LocalUnitaryLayer m = random_layer(n, rng);
    l.global_phase = rng.uniform(0, kTwoPi);
    m.global_phase = rng.uniform(0, kTwoPi);

    PureState lhs = apply_layer(l, apply_layer(m, psi));
    PureState rhs = apply_layer(compose(l, m), psi);
    REQUIRE((lhs.amp - rhs.amp).cwiseAbs().maxCoeff() < 1e-10);

    for (int q = 1; q <= n; ++q) {
      MatrixX moved = partial_trace(apply_layer(l, psi), {q}).mat;
      const Matrix2& u = l.factors[size_t(q - 1)];
      MatrixX expect = u * partial_trace(psi, {q}).mat * u.adjoint();
      REQUIRE((moved - expect).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("overlap values", "[state]") {
  Pcg32 rng(3);
  PureState psi = random_state(3, rng);
  REQUIRE(std::abs(overlap(psi, psi) - Complex(1, 0)) < 1e-12);
  REQUIRE(std::abs(overlap(PureState::basis(2, 0), PureState::basis(2, 3))) == 0.0);
  PureState ghz = ghz_state(3);
  REQUIRE(std::abs(overlap(ghz, PureState::basis(3, 0)) - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-14);
  REQUIRE_THROWS_AS(overlap(psi, PureState::basis(2, 0)), std::invalid_argument);
}

TEST_CASE("conditional_state on GHZ and product states", "[state]") {
  PureState ghz = ghz_state(3);
  ConditionalBranch b0 = conditional_state(ghz, 1, 0);
  REQUIRE_FALSE(b0.empty);
  REQUIRE(b0.weight == Catch::Approx(0.5));
  REQUIRE(std::abs(b0.state.amp[0] - Complex(1, 0)) < 1e-13);  // |00>

  // |0> (x) |Phi+>: conditioning qubit 1 on outcome 1 leaves nothing.
  Vector v = Vector::Zero(8);
  v[0] = 1.0 / std::sqrt(2.0);
  v[3] = 1.0 / std::sqrt(2.0);
  PureState prod = PureState::normalized(3, v);
  ConditionalBranch b1 = conditional_state(prod, 1, 1);
  REQUIRE(b1.empty);
  REQUIRE(b1.weight == 0.0);

  PureState w = w_state(3);
  ConditionalBranch w0 = conditional_state(w, 1, 0);
  REQUIRE(w0.weight == Catch::Approx(2.0 / 3.0));
  REQUIRE(std::abs(w0.state.amp[1] - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-13);
  REQUIRE(std::abs(w0.state.amp[2] - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-13);
}

TEST_CASE("conditional weights sum to one", "[state][property]") {
  Pcg32 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + int(rng.next_u32() % 4);
    PureState psi = random_state(n, rng);
    int q = 1 + int(rng.next_u32() % std::uint32_t(n));
    double w = conditional_state(psi, q, 0).weight + conditional_state(psi, q, 1).weight;
    REQUIRE(w == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("seeded generators are reproducible", "[state]") {
  Pcg32 a(42), b(42);
  PureState s1 = random_state(4, a);
  PureState s2 = random_state(4, b);
  REQUIRE((s1.amp - s2.amp).cwiseAbs().maxCoeff() == 0.0);
  Matrix2 u1 = random_unitary2(a);
  Matrix2 u2 = random_unitary2(b);
  REQUIRE((u1 - u2).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((u1 * u1.adjoint() - Matrix2::Identity()).cwiseAbs().maxCoeff() < 1e-14);
}
