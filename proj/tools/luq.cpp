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

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "luq/io.hpp"
#include "luq/lu_solver.hpp"
#include "luq/random.hpp"
#include "luq/standard_form.hpp"

namespace {

// Exit codes: 0 equivalent / success, 1 not equivalent / verify fail,
// 2 undetermined, 3 usage error, 4 I/O or parse error.
constexpr int kExitUsage = 3;
constexpr int kExitIo = 4;

struct Options {
  std::uint64_t seed = 0;
  int restarts = 64;
  double tol_fidelity = 1e-8;
  double tol_degeneracy = 1e-8;
  std::string output;
  bool quiet = false;
};

luq::ToleranceContext make_tol(const Options& o) {
  luq::ToleranceContext tol;
  tol.fidelity_accept = o.tol_fidelity;
  tol.degeneracy = o.tol_degeneracy;
  tol.validate();
  return tol;
}

luq::PureState load_state(const std::string& path, const luq::ToleranceContext& tol) {
  return luq::state_from_json(luq::read_json_file(path), tol).state;
}

void emit(const Options& o, const luq::Json& j, const std::string& label) {
  if (!o.output.empty()) {
    luq::write_json_file(o.output, j);
    if (!o.quiet) std::cout << label << " written to " << o.output << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
}

int exit_code_of(luq::Outcome outcome) {
  switch (outcome) {
    case luq::Outcome::Equivalent: return 0;
    case luq::Outcome::NotEquivalent: return 1;
    case luq::Outcome::Undetermined: return 2;
  }
  return 2;
}

int cmd_standard_form(const Options& o, const std::string& input, const std::string& layer_out) {
  luq::PureState state = load_state(input, make_tol(o));
  luq::StandardFormResult r = luq::standard_form(state);
  if (!o.quiet) {
    std::cout << "generic: " << (r.generic ? "true" : "false") << "\n";
    for (int q = 1; q <= state.n; ++q) {
      const luq::Spectrum2& s = r.spectra[size_t(q - 1)];
      std::cout << "qubit " << q << ": spectrum (" << s.lambda1 << ", " << s.lambda2 << ")"
                << (s.degenerate ? " [degenerate]" : "") << "\n";
    }
  }
  luq::Json canonical = luq::state_to_json(r.canonical);
  if (!layer_out.empty()) {
    luq::write_json_file(layer_out, luq::layer_to_json(r.layer));
    if (!o.quiet) std::cout << "layer written to " << layer_out << "\n";
  } else if (!o.quiet) {
    std::cout << "layer:\n" << luq::layer_to_json(r.layer).dump(2) << "\n";
  }
  emit(o, canonical, "canonical state");
  return 0;
}

int cmd_check(const Options& o, const std::string& input_a, const std::string& input_b) {
  luq::ToleranceContext tol = make_tol(o);
  luq::PureState a = load_state(input_a, tol);
  luq::PureState b = load_state(input_b, tol);
  if (a.n != b.n) {
    std::cerr << "error: states have different qubit counts (" << a.n << " vs " << b.n << ")\n";
    return kExitUsage;
  }
  luq::LuConfig config;
  config.restarts = o.restarts;
  config.seed = o.seed;
  luq::Verdict v = luq::decide_lu_equivalence(a, b, config);
  emit(o, luq::verdict_to_json(v), "certificate");
  if (!o.quiet) {
    std::cout << "verdict: " << luq::to_string(v.outcome);
    if (v.outcome == luq::Outcome::Equivalent) std::cout << " (residual " << v.residual << ")";
    if (v.outcome == luq::Outcome::NotEquivalent) std::cout << " (" << v.witness << ")";
    std::cout << "\n";
  }
  return exit_code_of(v.outcome);
}

int cmd_verify(const Options& o, const std::string& input_a, const std::string& input_b,
               const std::string& cert_path) {
  luq::ToleranceContext tol = make_tol(o);
  luq::PureState a = load_state(input_a, tol);
  luq::PureState b = load_state(input_b, tol);
  luq::LocalUnitaryLayer layer = luq::layer_from_json(luq::read_json_file(cert_path));
  if (layer.n() != a.n || a.n != b.n) {
    std::cerr << "error: certificate / state sizes do not match\n";
    return kExitUsage;
  }
  layer.validate(tol);
  double residual = luq::verify_certificate(a, b, layer);
  std::cout << "residual: " << residual << "\n";
  return residual <= tol.fidelity_accept ? 0 : 1;
}

int cmd_random(const Options& o, int n, const std::string& kind) {
  luq::ToleranceContext tol = make_tol(o);
  luq::Pcg32 rng(o.seed);
  luq::Json j;
  if (kind == "haar_state") {
    j = luq::state_to_json(luq::random_state(n, rng, tol));
  } else if (kind == "layer") {
    j = luq::layer_to_json(luq::random_layer(n, rng));
  } else if (kind == "ghz") {
    j = luq::state_to_json(luq::ghz_state(n, tol));
  } else if (kind == "w") {
    j = luq::state_to_json(luq::w_state(n, tol));
  } else if (kind == "cluster") {
    j = luq::state_to_json(luq::cluster_state(n, tol));
  } else if (kind == "product") {
    j = luq::state_to_json(luq::product_state(n, tol));
  } else {
    std::cerr << "error: unknown kind \"" << kind
              << "\" (expected haar_state|layer|ghz|w|cluster|product)\n";
    return kExitUsage;
  }
  emit(o, j, kind);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"luq - canonical forms and local-unitary equivalence of n-qubit pure states"};
  app.require_subcommand(1);

  Options o;
  app.add_option("--seed", o.seed, "seed for random fixtures and search starts")
      ->envname("LUQ_SEED");
  app.add_option("--restarts", o.restarts, "multi-start count for the variable search")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol-fidelity", o.tol_fidelity, "acceptance threshold on 1-|<A|L|B>|");
  app.add_option("--tol-degeneracy", o.tol_degeneracy, "eigenvalue-gap threshold");
  app.add_option("--output", o.output, "write the primary JSON result to this path");
  app.add_flag("--quiet", o.quiet, "suppress the human-readable summary");

  std::string input_a, input_b, cert_path, layer_out, kind = "haar_state";
  int n = 2;

  CLI::App* sf = app.add_subcommand("standard-form", "canonicalize a state file");
  sf->fallthrough();  // global flags may follow the subcommand name
  sf->add_option("input", input_a, "state JSON file")->required();
  sf->add_option("--layer-output", layer_out, "write the achieving layer to this path");

  CLI::App* check = app.add_subcommand("check", "decide LU-equivalence of two state files");
  check->fallthrough();
  check->add_option("input_a", input_a, "first state JSON file")->required();
  check->add_option("input_b", input_b, "second state JSON file")->required();

  CLI::App* verify = app.add_subcommand("verify", "replay a certificate against two state files");
  verify->fallthrough();
  verify->add_option("input_a", input_a, "first state JSON file")->required();
  verify->add_option("input_b", input_b, "second state JSON file")->required();
  verify->add_option("certificate", cert_path, "certificate or layer JSON file")->required();

  CLI::App* random = app.add_subcommand("random", "generate a seeded state or layer file");
  random->fallthrough();
  random->add_option("--n", n, "qubit count")->check(CLI::Range(1, luq::kMaxQubits));
  random->add_option("--kind", kind, "haar_state|layer|ghz|w|cluster|product");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sf->parsed()) return cmd_standard_form(o, input_a, layer_out);
    if (check->parsed()) return cmd_check(o, input_a, input_b);
    if (verify->parsed()) return cmd_verify(o, input_a, input_b, cert_path);
    if (random->parsed()) return cmd_random(o, n, kind);
  } catch (const luq::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
