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

// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; run with a list of criterion numbers or nothing for all of them.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "luq/io.hpp"
#include "luq/lu_solver.hpp"
#include "luq/phase_gates.hpp"
#include "luq/random.hpp"
#include "luq/standard_form.hpp"

#ifndef LUQ_CLI_PATH
#define LUQ_CLI_PATH "./tools/luq"
#endif

using namespace luq;
namespace fs = std::filesystem;

namespace {

struct Report {
  bool pass = true;
  std::ostringstream detail;
  std::ostringstream problems;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (problems.tellp() > 0) problems << "; ";
      problems << what;
    }
  }

  std::string text() {
    if (pass) return detail.str();
    std::string t = problems.str();
    if (detail.tellp() > 0) t += " | " + detail.str();
    return t;
  }
};

double elapsed_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PureState generic_random_state(int n, Pcg32& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    PureState psi = random_state(n, rng);
    if (sorted_trace_decomposition(psi).generic) return psi;
  }
  throw std::runtime_error("could not sample a generic state");
}

LocalUnitaryLayer random_layer_with_phase(int n, Pcg32& rng) {
  LocalUnitaryLayer l = random_layer(n, rng);
  l.global_phase = rng.uniform(0.0, kTwoPi);
  return l;
}

// --- criterion 1 -----------------------------------------------------------

void criterion_canonicality(Report& rep) {
  Pcg32 rng(1001);
  auto t0 = std::chrono::steady_clock::now();
  int checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + trial % 5;  // 2..6
    PureState psi = generic_random_state(n, rng);
    StandardFormResult base = standard_form(psi);
    for (int hit = 0; hit < 5; ++hit) {
      StandardFormResult moved = standard_form(apply_layer(random_layer_with_phase(n, rng), psi));
      double diff = (moved.canonical.amp - base.canonical.amp).cwiseAbs().maxCoeff();
      worst = std::max(worst, diff);
      ++checked;
    }
  }
  double secs = elapsed_seconds(t0);
  rep.require(checked == 1000, "expected 1000 canonical comparisons");
  rep.require(worst <= 1e-8, "worst canonical deviation " + std::to_string(worst));
  rep.require(secs < 30.0, "runtime " + std::to_string(secs) + " s exceeds 30 s");
  rep.detail << "1000/1000 round trips, worst deviation " << worst << ", " << secs << " s";
}

// --- criterion 2 -----------------------------------------------------------

void criterion_generic_equivalence(Report& rep) {
  Pcg32 rng(2002);
  int eq_ok = 0, ne_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + trial % 5;
    PureState psi = generic_random_state(n, rng);
    PureState moved = apply_layer(random_layer_with_phase(n, rng), psi);
    Verdict v = check_generic_equivalence(psi, moved);
    if (v.equivalent() && v.residual <= 1e-8 &&
        verify_certificate(psi, moved, *v.certificate) <= 1e-8) {
      ++eq_ok;
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + trial % 5;
    PureState a = generic_random_state(n, rng);
    PureState b = generic_random_state(n, rng);
    Verdict v = check_generic_equivalence(a, b);
    if (v.outcome == Outcome::NotEquivalent && !v.witness.empty()) ++ne_ok;
  }
  rep.require(eq_ok == 100, "equivalent pairs certified: " + std::to_string(eq_ok) + "/100");
  rep.require(ne_ok == 100, "independent pairs separated: " + std::to_string(ne_ok) + "/100");
  rep.detail << eq_ok << "/100 certified equivalent, " << ne_ok << "/100 separated";
}

// --- criterion 3 -----------------------------------------------------------

void criterion_schmidt(Report& rep) {
  Pcg32 rng(3003);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    PureState psi = random_state(2, rng);
    StandardFormResult r = standard_form(psi);
    MatrixX m(2, 2);
    m << psi.amp[0], psi.amp[1], psi.amp[2], psi.amp[3];
    Eigen::JacobiSVD<MatrixX> svd(m);
    worst = std::max(worst, std::abs(r.canonical.amp[0].real() - svd.singularValues()[0]));
    worst = std::max(worst, std::abs(r.canonical.amp[3].real() - svd.singularValues()[1]));
    worst = std::max(worst, std::abs(r.canonical.amp[1]));
    worst = std::max(worst, std::abs(r.canonical.amp[2]));
  }
  rep.require(worst <= 1e-10, "worst Schmidt deviation " + std::to_string(worst));
  rep.detail << "1000 states, worst deviation from singular values " << worst;
}

// --- criterion 4 -----------------------------------------------------------

void criterion_bell_symmetry(Report& rep) {
  Pcg32 rng(4004);
  Vector v = Vector::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  PureState bell = PureState::normalized(2, v);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix2 w = random_unitary2(rng);
    LocalUnitaryLayer ww(2);
    ww.factors[0] = w;
    ww.factors[1] = w.conjugate();
    worst = std::max(worst, verify_certificate(bell, bell, ww));
  }
  rep.require(worst <= 1e-10, "worst W (x) W* residual " + std::to_string(worst));
  rep.detail << "100 layers, worst residual " << worst;
}

// --- criterion 5 -----------------------------------------------------------

void criterion_ghz_recovery(Report& rep) {
  Pcg32 rng(5005);
  PureState ghz = ghz_state(3);
  LuConfig config;
  config.seed = 5005;
  int equivalent = 0, not_equivalent = 0;
  std::vector<double> times;
  int variables_seen = 0;
  for (int trial = 0; trial < 50; ++trial) {
    PureState moved = apply_layer(random_layer_with_phase(3, rng), ghz);
    auto t0 = std::chrono::steady_clock::now();
    Verdict v = decide_lu_equivalence(moved, ghz, config);
    times.push_back(elapsed_seconds(t0));
    if (v.equivalent() && v.residual <= 1e-8) {
      ++equivalent;
      variables_seen = std::max(variables_seen, v.stats.variables);
    } else if (v.outcome == Outcome::NotEquivalent) {
      ++not_equivalent;
    }
  }
  std::sort(times.begin(), times.end());
  double median = times[times.size() / 2];
  rep.require(equivalent >= 49, "recovered " + std::to_string(equivalent) + "/50");
  rep.require(not_equivalent == 0,
              std::to_string(not_equivalent) + " spurious NotEquivalent verdicts");
  rep.require(variables_seen == 1, "expected the 1-variable search");
  rep.require(median < 5.0, "median time " + std::to_string(median) + " s");
  rep.detail << equivalent << "/50 recovered via 1-variable search, median " << median
             << " s, failures undetermined: " << (50 - equivalent - not_equivalent);
}

// --- criterion 6 -----------------------------------------------------------

void criterion_invariant_separations(Report& rep) {
  // Expectations derived from the partial-trace oracle, not asserted numbers.
  PureState ghz3 = ghz_state(3);
  PureState w3 = w_state(3);
  Spectrum2 sg = eig_hermitian2(partial_trace(ghz3, {1}));
  Spectrum2 sw = eig_hermitian2(partial_trace(w3, {1}));
  rep.require(std::abs(sg.lambda1 - sw.lambda1) > 1e-7,
              "oracle: GHZ3 and W3 local spectra too close to separate");
  Verdict gw = decide_lu_equivalence(ghz3, w3);
  rep.require(gw.outcome == Outcome::NotEquivalent, "GHZ3 vs W3 not separated");
  rep.require(gw.witness.find("spectra") != std::string::npos,
              "GHZ3 vs W3 witness is not the local spectra");

  PureState ghz4 = ghz_state(4);
  PureState cl4 = cluster_state(4);
  double dev_ghz = (partial_trace(ghz4, {1, 3}).mat - 0.25 * MatrixX::Identity(4, 4))
                       .cwiseAbs()
                       .maxCoeff();
  double dev_cl = (partial_trace(cl4, {1, 3}).mat - 0.25 * MatrixX::Identity(4, 4))
                      .cwiseAbs()
                      .maxCoeff();
  rep.require(dev_cl <= 1e-10 && dev_ghz > 1e-7,
              "oracle: qubits {1,3} marginals do not separate GHZ4 from the cluster state");
  Verdict gc = decide_lu_equivalence(ghz4, cl4);
  rep.require(gc.outcome == Outcome::NotEquivalent, "GHZ4 vs cluster4 not separated");
  rep.require(gc.witness.find("two-qubit") != std::string::npos,
              "GHZ4 vs cluster4 witness is not a two-qubit marginal");
  rep.detail << "GHZ3|W3 spectra witness; GHZ4|cluster4 two-qubit marginal witness";
}

// --- criterion 7 -----------------------------------------------------------

void criterion_phase_oracles(Report& rep) {
  Pcg32 rng(7007);
  int disagreements = 0, recovered = 0, planted_total = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + trial % 2;
    PureState base = random_state(n, rng);
    {  // plant a few zeros half of the time
      Vector v = base.amp;
      if (trial % 2) {
        int zeros = 1 + int(rng.next_u32() % 2u);
        for (int z = 0; z < zeros; ++z) v[rng.next_u32() % std::uint32_t(v.size())] = 0.0;
      }
      base = PureState::normalized(n, v);
    }
    PureState other = (trial % 3 == 0) ? PureState::normalized(n, random_state(n, rng).amp)
                                       : apply_layer(random_phase_layer(n, rng), base);
    std::vector<double> abar(size_t(n) + 1);
    for (double& a : abar) a = rng.uniform(0.0, kTwoPi);
    PureState psi0 = complete_zero(base).completed;
    PureState phia = complete_with_phases(other, abar).completed;
    for (int q = 1; q <= n; ++q) {
      if (condition_ii_pairwise(psi0, phia, q) != condition_ii_fourcopy(psi0, phia, q)) {
        ++disagreements;
      }
    }
  }
  for (int trial = 0; trial < 300; ++trial) {
    int n = 2 + trial % 2;
    PureState phi = random_state(n, rng);
    LocalUnitaryLayer planted = random_phase_layer(n, rng);
    PureState psi = apply_layer(planted, phi);
    ++planted_total;
    Verdict v = solve_phase_gates(psi, phi);
    if (v.equivalent() &&
        (apply_layer(v.phases->as_layer(), phi).amp - psi.amp).cwiseAbs().maxCoeff() <= 1e-9) {
      ++recovered;
    }
  }
  rep.require(disagreements == 0, std::to_string(disagreements) + " oracle disagreements");
  rep.require(recovered == planted_total,
              "phase recovery " + std::to_string(recovered) + "/" + std::to_string(planted_total));
  rep.detail << "1000 completed pairs agree across both oracle forms; " << recovered << "/"
             << planted_total << " planted phase layers recovered";
}

// --- criterion 8 -----------------------------------------------------------

void criterion_oracle_consistency(Report& rep) {
  Pcg32 rng(8008);
  LuConfig config;
  config.seed = 8008;
  int unsound = 0, not_equivalent = 0, equivalent = 0, undetermined = 0;
  for (int trial = 0; trial < 500; ++trial) {
    int n = 2 + trial % 3;
    PureState a;
    bool constructed_equivalent = (trial % 2 == 0);
    switch ((trial / 2) % 5) {
      case 0: a = random_state(n, rng); break;
      case 1: a = ghz_state(n); break;
      case 2: a = w_state(n); break;
      case 3: a = (trial % 20 == 6) ? cluster_state(4) : random_state(n, rng); break;
      default: a = product_state(n); break;
    }
    PureState b = constructed_equivalent ? apply_layer(random_layer_with_phase(a.n, rng), a)
                                         : random_state(a.n, rng);
    Verdict v = decide_lu_equivalence(a, b, config);
    if (v.equivalent()) ++equivalent;
    if (v.outcome == Outcome::Undetermined) ++undetermined;
    if (v.outcome == Outcome::NotEquivalent) {
      ++not_equivalent;
      if (constructed_equivalent) {
        ++unsound;  // ground truth says equivalent
      } else if (brute_force_oracle(a, b, 50, 17 + std::uint64_t(trial)).residual <= 1e-8) {
        ++unsound;
      }
    }
  }
  rep.require(unsound == 0, std::to_string(unsound) + " unsoundness events");
  rep.detail << "500 pairs: " << equivalent << " equivalent, " << not_equivalent
             << " not-equivalent, " << undetermined << " undetermined, 0 unsound";
}

// --- criterion 9 -----------------------------------------------------------

void criterion_mixed_states(Report& rep) {
  Pcg32 rng(9009);
  LuConfig config;
  config.seed = 9009;
  int ok = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + trial % 2;
    Eigen::Index d = Eigen::Index(1) << n;
    MatrixX rho = MatrixX::Zero(d, d);
    double weights[3] = {0.55, 0.3, 0.15};
    for (double w : weights) {
      PureState s = random_state(n, rng);
      rho += w * (s.amp * s.amp.adjoint());
    }
    LocalUnitaryLayer l = random_layer_with_phase(n, rng);
    MatrixX sigma = apply_layer_density(l, rho, n);
    Verdict v = mixed_state_criterion(rho, sigma, config);
    if (v.equivalent() && v.residual <= 1e-8) {
      ++ok;
      worst = std::max(worst, v.residual);
    }
  }
  rep.require(ok == 50, "recovered " + std::to_string(ok) + "/50");
  rep.detail << ok << "/50 mixed pairs certified, worst Frobenius residual " << worst;
}

// --- criterion 10 ----------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(LUQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

void criterion_determinism(Report& rep) {
  fs::path dir = fs::temp_directory_path() / "luq_acceptance";
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };

  int rc = run_cli("random --n 3 --kind haar_state --seed 424242 --quiet --output " + p("s1.json"));
  rc |= run_cli("random --n 3 --kind haar_state --seed 424242 --quiet --output " + p("s2.json"));
  rep.require(rc == 0, "random generation failed");
  rep.require(slurp(p("s1.json")) == slurp(p("s2.json")), "random states differ across runs");
  rep.require(!slurp(p("s1.json")).empty(), "random state file is empty");

  // A GHZ pair that exercises the seeded variable search.
  rc = run_cli("random --n 3 --kind ghz --quiet --output " + p("ghz.json"));
  rep.require(rc == 0, "ghz generation failed");
  {
    Pcg32 rng(606060);
    LoadedState ghz = state_from_json(read_json_file(p("ghz.json")));
    PureState moved = apply_layer(random_layer_with_phase(3, rng), ghz.state);
    write_json_file(p("moved.json"), state_to_json(moved));
  }
  int rc1 = run_cli("check --seed 99 --quiet --output " + p("c1.json") + " " + p("ghz.json") +
                    " " + p("moved.json"));
  int rc2 = run_cli("check --seed 99 --quiet --output " + p("c2.json") + " " + p("ghz.json") +
                    " " + p("moved.json"));
  rep.require(rc1 == 0 && rc2 == 0, "check exited with " + std::to_string(rc1) + "/" +
                                        std::to_string(rc2) + " (expected 0: equivalent)");
  std::string c1 = slurp(p("c1.json")), c2 = slurp(p("c2.json"));
  rep.require(!c1.empty() && c1 == c2, "certificates differ across identical runs");

  // The emitted certificate replays through verify.
  int rcv = run_cli("verify " + p("ghz.json") + " " + p("moved.json") + " " + p("c1.json"));
  rep.require(rcv == 0, "verify rejected the emitted certificate");

  std::error_code ec;
  fs::remove_all(dir, ec);
  rep.detail << "byte-identical fixtures and certificates; certificate replays with exit 0";
}

struct Criterion {
  int id;
  std::string name;
  std::function<void(Report&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria = {
      {1, "canonicality round-trip", criterion_canonicality},
      {2, "generic equivalence, positive and negative", criterion_generic_equivalence},
      {3, "two-qubit Schmidt agreement", criterion_schmidt},
      {4, "Bell W (x) W* symmetry", criterion_bell_symmetry},
      {5, "GHZ3 recovery through the variable search", criterion_ghz_recovery},
      {6, "invariant separations (GHZ vs W, GHZ vs cluster)", criterion_invariant_separations},
      {7, "phase-gate oracle coherence", criterion_phase_oracles},
      {8, "solver vs brute-force oracle consistency", criterion_oracle_consistency},
      {9, "mixed-state criterion", criterion_mixed_states},
      {10, "CLI determinism", criterion_determinism},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    selected.push_back(std::atoi(argv[i]));
  }

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    Report rep;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(rep);
    } catch (const std::exception& e) {
      rep.require(false, std::string("exception: ") + e.what());
    }
    double secs = elapsed_seconds(t0);
    std::printf("[%s] criterion %2d: %s (%.2f s) -- %s\n", rep.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), secs, rep.text().c_str());
    std::fflush(stdout);
    if (!rep.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
