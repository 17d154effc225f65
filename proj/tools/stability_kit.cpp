//
// Copyright 2026 The stability-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// stability-kit <suite> [--config f] [--seed hex] [--out path] [--format json|csv]

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "stability/experiment.hpp"

namespace {

struct Flags {
  std::string config, seed, out, format = "json";
  std::optional<uint64_t> trials;
  std::optional<double> nu, rho, alpha, beta, eps, delta, eta;
  std::optional<unsigned> m, n, prime_bits;
  std::optional<std::string> circuit, circuit2, class_path, dist, dist2;
  bool wall_clock = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file");
  sub->add_option("--seed", f.seed, "root seed, hex");
  sub->add_option("--out", f.out, "write the report here instead of stdout");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--trials", f.trials, "runs or pairs; 0 keeps the suite default");
  sub->add_option("--nu", f.nu);
  sub->add_option("--rho", f.rho);
  sub->add_option("--alpha", f.alpha);
  sub->add_option("--beta", f.beta);
  sub->add_option("--eps", f.eps);
  sub->add_option("--delta", f.delta);
  sub->add_option("--eta", f.eta);
  sub->add_option("--m", f.m, "circuit input bits for random circuits");
  sub->add_option("--n", f.n, "circuit output bits for random circuits");
  sub->add_option("--prime-bits", f.prime_bits);
  sub->add_option("--circuit", f.circuit, "circuit file");
  sub->add_option("--circuit2", f.circuit2, "second circuit file, same input width");
  sub->add_option("--class", f.class_path, "hypothesis class JSON");
  sub->add_option("--dist", f.dist, "distribution JSON");
  sub->add_option("--dist2", f.dist2, "second distribution JSON");
  sub->add_flag("--wall-clock", f.wall_clock, "record elapsed seconds in the report");
}

template <typename T>
void set(const std::optional<T>& v, T& out) {
  if (v) out = *v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replicability, privacy and generalization experiments"};
  app.require_subcommand(1);
  std::map<std::string, Flags> flags;
  for (const auto& s : stability::kSuites) add_flags(app.add_subcommand(s), flags[s]);
  CLI11_PARSE(app, argc, argv);

  std::string suite = app.get_subcommands().front()->get_name();
  const Flags& f = flags[suite];
  try {
    stability::ExperimentConfig c;
    if (!f.config.empty()) {
      c = stability::load_config(f.config);
      if (c.suite != suite) {
        c.warnings.push_back("config suite '" + c.suite + "' overridden by '" + suite + "'");
        c.suite = suite;
      }
    } else {
      c = stability::default_config(suite);
    }
    if (!f.seed.empty()) c.seed = f.seed;
    set(f.trials, c.trials);
    set(f.nu, c.nu);
    set(f.rho, c.rho);
    set(f.alpha, c.alpha);
    set(f.beta, c.beta);
    set(f.eps, c.eps);
    set(f.delta, c.delta);
    set(f.eta, c.eta);
    set(f.m, c.m);
    set(f.n, c.n);
    set(f.prime_bits, c.prime_bits);
    set(f.circuit, c.circuit);
    set(f.circuit2, c.circuit2);
    set(f.class_path, c.class_path);
    set(f.dist, c.dist);
    set(f.dist2, c.dist2);
    if (f.wall_clock) c.wall_clock = true;
    for (const auto& w : c.warnings) std::cerr << "warning: " << w << "\n";

    stability::Report r = stability::run_suite(c);
    std::string text = stability::emit_report(
        r, f.format == "csv" ? stability::ReportFormat::kCsv : stability::ReportFormat::kJson);
    if (f.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(f.out, std::ios::binary);
      if (!out) throw std::invalid_argument("out: cannot write '" + f.out + "'");
      out << text;
    }
    return r.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
