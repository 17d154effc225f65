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

#include "stability/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "stability/parallel.hpp"
#include "stability/verify.hpp"

namespace stability {
namespace {

using ojson = nlohmann::ordered_json;

nlohmann::json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw std::invalid_argument("report: bad number '" + s + "'");
  }
  return j.get<double>();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_number(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument(field + ": " + what);
}

void merge(Report& r, const CheckResult& c, const std::string& prefix = "") {
  for (auto m : c.metrics) {
    m.name = prefix + m.name;
    r.metrics.push_back(std::move(m));
  }
  for (const auto& [k, v] : c.constants) r.constants[prefix + k] = v;
  for (const auto& [k, v] : c.notes) r.notes[prefix + k] = v;
}

uint64_t trials_or(const ExperimentConfig& c, uint64_t fallback) {
  return c.trials ? c.trials : fallback;
}

TruthTableCircuit circuit_for(const ExperimentConfig& c, const std::string& path,
                              const RandomTape& tape) {
  if (!path.empty()) return load_circuit(path);
  TapeReader r(tape);
  return random_circuit(c.m, c.n, r);
}

void run_corrsamp(const ExperimentConfig& c, const RandomTape& root, Report& r) {
  TruthTableCircuit c1 = circuit_for(c, c.circuit, root.derive(0));
  auto params = CorrSampParams::resolve(c1.in_bits(), c.nu, c.corrsamp);
  CorrSampler sampler(c1, params);
  uint64_t runs = trials_or(c, 20000);
  std::vector<std::optional<uint64_t>> outs(runs);
  std::vector<uint64_t> rounds(runs);
  parallel_for(runs, [&](uint64_t i) {
    CorrSampStats st;
    outs[i] = sampler.sample(root.derive({1, i}), &st);
    rounds[i] = st.rounds_used;
  });
  std::map<uint64_t, uint64_t> hist;
  uint64_t bot = 0, max_rounds = 0;
  double mean_rounds = 0;
  for (uint64_t i = 0; i < runs; ++i) {
    if (outs[i]) hist[*outs[i]]++;
    else ++bot;
    mean_rounds += static_cast<double>(rounds[i]) / static_cast<double>(runs);
    max_rounds = std::max(max_rounds, rounds[i]);
  }
  FiniteDistribution target = induced_distribution(c1);
  double tv = static_cast<double>(bot) / static_cast<double>(runs);
  for (size_t i = 0; i < target.size(); ++i) {
    uint64_t y = outcome_to_u64(target.outcomes()[i]);
    auto it = hist.find(y);
    double ph = it == hist.end() ? 0 : static_cast<double>(it->second) / static_cast<double>(runs);
    tv += std::abs(ph - target.probs()[i]);
  }
  tv /= 2;
  double bot_rate = static_cast<double>(bot) / static_cast<double>(runs);
  r.metrics.push_back({"tv_to_target", tv, Cmp::kLessEq, 5 * c.nu, 0});
  r.metrics.push_back({"bot_rate", bot_rate, Cmp::kLessEq, 5 * c.nu, wald_half_width(bot_rate, runs)});

  if (!c.circuit2.empty()) {
    TruthTableCircuit c2 = load_circuit(c.circuit2);
    require(c2.in_bits() == c1.in_bits(), "circuit2", "input width differs from circuit");
    CorrSampler s2(c2, params);
    std::vector<uint8_t> differ(runs);
    parallel_for(runs, [&](uint64_t i) { differ[i] = s2.sample(root.derive({1, i})) != outs[i]; });
    double rate = static_cast<double>(std::count(differ.begin(), differ.end(), 1)) /
                  static_cast<double>(runs);
    double pair_tv = tv_distance(target, induced_distribution(c2));
    double hw = wald_half_width(rate, runs);
    r.metrics.push_back({"disagreement", rate, Cmp::kLessEq, 8 * (pair_tv + c.nu) + 3 * hw, hw});
    r.constants["pair_tv"] = pair_tv;
  }
  nlohmann::ordered_json h = nlohmann::ordered_json::object();
  for (const auto& [y, n] : hist) h[std::to_string(y)] = n;
  h["bot"] = bot;
  r.notes["outputs"] = h.dump();
  r.notes["rounds_used"] = "mean " + csv_number(mean_rounds) + " max " + std::to_string(max_rounds);
  r.constants["k"] = params.k;
  r.constants["T1"] = static_cast<double>(params.T1);
  r.constants["T2"] = static_cast<double>(params.T2);
  r.constants["c0"] = c.corrsamp.c0;
  r.constants["c1"] = c.corrsamp.c1;
  r.constants["c2"] = c.corrsamp.c2;
  r.constants["runs"] = static_cast<double>(runs);
}

void run_cs_explicit(const ExperimentConfig& c, const RandomTape& root, Report& r) {
  ConsistentSamplerCheck cfg;
  cfg.tapes = trials_or(c, cfg.tapes);
  std::vector<std::pair<FiniteDistribution, FiniteDistribution>> pairs;
  if (!c.dist.empty() || !c.dist2.empty()) {
    require(!c.dist.empty() && !c.dist2.empty(), "dist2", "dist and dist2 must be given together");
    auto p = distribution_from_json(read_file(c.dist));
    auto q = distribution_from_json(read_file(c.dist2));
    std::vector<Outcome> all = p.outcomes();
    for (const auto& o : q.outcomes()) {
      if (!p.index_of(o)) all.push_back(o);
    }
    pairs.emplace_back(align(p, all), align(q, all));
  }
  merge(r, check_consistent_sampler(cfg, root, pairs));
}

void run_learn_finite(const ExperimentConfig& c, const RandomTape& root, Report& r) {
  FiniteClass cls = c.class_path.empty() ? graded_class(32, 64)
                                         : FiniteClass::from_json(read_file(c.class_path));
  FiniteDistribution data = c.dist.empty() ? realizable_distribution(cls, 0)
                                           : distribution_from_json(read_file(c.dist));
  LearnerCheck cfg{c.rho, c.alpha, c.beta, trials_or(c, 200), c.learner};
  CheckResult res = check_finite_learner(cfg, cls, data, root);
  for (auto& m : res.metrics) {
    if (m.name == "within_alpha_rate") m.name = "measured_error";
  }
  merge(r, res);
  r.constants["trials"] = static_cast<double>(cfg.trials);
}

void run_list_hh(const ExperimentConfig& c, const RandomTape& root, Report& r) {
  HeavyHitterCheck cfg;
  cfg.eta = c.eta;
  cfg.rho = c.rho;
  cfg.beta = c.beta;
  cfg.runs = trials_or(c, cfg.runs);
  cfg.pairs = std::max<uint64_t>(1, cfg.runs / 2);
  cfg.constants = c.heavy;
  merge(r, check_list_heavy_hitter(cfg, root));
}

void run_rep2dp(const ExperimentConfig& c, const RandomTape& root, Report& r) {
  RepToDpCheck cfg{c.eps, c.delta, c.beta, trials_or(c, 1000), c.rep2dp};
  CheckResult res = check_rep_to_dp(cfg, root);
  for (auto& m : res.metrics) {
    if (m.name == "max_privacy_excess") m.name = "privacy_excess";
  }
  merge(r, res);
}

void run_rep2pg(const ExperimentConfig& c, const RandomTape& root, Report& r) {
  RepToPgCheck cfg;
  cfg.eps = c.eps;
  cfg.delta = c.delta;
  cfg.beta = c.beta;
  cfg.pairs = trials_or(c, cfg.pairs);
  merge(r, check_rep_to_pg(cfg, root));
  auto resolved = RepToPgParams::resolve(c.eps, c.delta, c.beta, c.rep2pg);
  r.constants["resolved_k"] = static_cast<double>(resolved.k);
  r.constants["resolved_t"] = static_cast<double>(resolved.t);
  r.constants["c_k"] = c.rep2pg.c_k;
  r.constants["c_t"] = c.rep2pg.c_t;
}

void run_dp2rep(const ExperimentConfig& c, const RandomTape& root, Report& r) {
  DpToRepCheck cfg;
  cfg.rho = c.rho;
  cfg.runs = trials_or(c, cfg.runs);
  cfg.pairs = std::max<uint64_t>(1, cfg.runs / 10);
  merge(r, check_dp_to_rep(cfg, root));
}

void run_crypto_sep(const ExperimentConfig& c, const RandomTape& root, Report& r) {
  AdversaryCheck adv;
  adv.prime_bits = c.prime_bits;
  adv.challenges = trials_or(c, adv.challenges);
  merge(r, check_adversary(adv, root.derive(0)));
  DPRandEncCheck enc;
  enc.eps = c.eps;
  merge(r, check_dp_rand_enc(enc, root.derive(1)));
  merge(r, check_rerandomization(enc.p, enc.q, root.derive(2)), "rerandomize.");
}

void run_verify_all(const ExperimentConfig&, const RandomTape& root, Report& r) {
  for (const auto& crit : acceptance_criteria()) {
    merge(r, crit.run(root.derive(static_cast<uint64_t>(crit.id))),
          "c" + std::to_string(crit.id) + ".");
  }
}

ojson constants_json(const ExperimentConfig& c) {
  ojson j;
  j["corrsamp"] = {{"c0", c.corrsamp.c0}, {"c1", c.corrsamp.c1}, {"c2", c.corrsamp.c2}};
  j["learner"] = {{"c_tau", c.learner.c_tau}, {"c_m", c.learner.c_m}};
  j["heavy"] = {{"c_tau", c.heavy.c_tau}, {"c1", c.heavy.c1}, {"c2", c.heavy.c2}};
  j["rep2dp"] = {{"c_k1", c.rep2dp.c_k1}, {"c_k2", c.rep2dp.c_k2}, {"c_fail", c.rep2dp.c_fail}};
  j["rep2pg"] = {{"c_k", c.rep2pg.c_k}, {"c_t", c.rep2pg.c_t}};
  return j;
}

template <typename T>
void read_field(const nlohmann::json& j, const std::string& key, const std::string& field, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(field + ": wrong type");
  }
}

}  // namespace

const std::vector<std::string> kSuites = {"corrsamp", "cs-explicit", "learn-finite", "list-hh",
                                          "rep2dp",   "rep2pg",      "dp2rep",       "crypto-sep",
                                          "verify-all"};

bool Report::pass() const {
  return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass(); });
}

std::string emit_report(const Report& r, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    std::string out = "metric,value,cmp,tolerance,half_width,pass\n";
    for (const auto& m : r.metrics) {
      out += m.name + "," + csv_number(m.value) + "," + (m.cmp == Cmp::kLessEq ? "<=" : ">=") +
             "," + csv_number(m.tolerance) + "," + csv_number(m.half_width) + "," +
             (m.pass() ? "true" : "false") + "\n";
    }
    return out;
  }
  ojson j;
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  j["pass"] = r.pass();
  j["metrics"] = ojson::object();
  for (const auto& m : r.metrics) {
    j["metrics"][m.name] = {{"value", number_json(m.value)},
                            {"cmp", m.cmp == Cmp::kLessEq ? "<=" : ">="},
                            {"tolerance", number_json(m.tolerance)},
                            {"half_width", number_json(m.half_width)},
                            {"pass", m.pass()}};
  }
  j["constants"] = ojson::object();
  for (const auto& [k, v] : r.constants) j["constants"][k] = number_json(v);
  j["notes"] = ojson::object();
  for (const auto& [k, v] : r.notes) j["notes"][k] = v;
  if (r.wall_clock_seconds) j["wall_clock_seconds"] = *r.wall_clock_seconds;
  return j.dump(2) + "\n";
}

Report report_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
    Report r;
    r.suite = j.at("suite").get<std::string>();
    r.seed = j.at("seed").get<std::string>();
    for (const auto& [name, m] : j.at("metrics").items()) {
      auto cmp = m.at("cmp").get<std::string>();
      if (cmp != "<=" && cmp != ">=") throw std::invalid_argument("report: bad cmp '" + cmp + "'");
      r.metrics.push_back({name, number_from_json(m.at("value")),
                           cmp == "<=" ? Cmp::kLessEq : Cmp::kGreaterEq,
                           number_from_json(m.at("tolerance")), number_from_json(m.at("half_width"))});
    }
    for (const auto& [k, v] : j.at("constants").items()) r.constants[k] = number_from_json(v);
    for (const auto& [k, v] : j.at("notes").items()) r.notes[k] = v.get<std::string>();
    if (j.contains("wall_clock_seconds")) r.wall_clock_seconds = j["wall_clock_seconds"].get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("report: ") + e.what());
  }
}

ExperimentConfig default_config(const std::string& suite) {
  ExperimentConfig c;
  c.suite = suite;
  if (suite == "dp2rep") c.rho = 0.1;
  if (suite == "rep2pg") c.delta = 0.1;
  if (suite == "rep2dp") c.beta = 0.05;
  if (suite == "crypto-sep") c.eps = 0.5;
  return c;
}

ExperimentConfig config_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  require(j.is_object(), "config", "expected a JSON object");
  require(j.contains("suite") && j["suite"].is_string(), "suite", "missing");
  ExperimentConfig c = default_config(j["suite"].get<std::string>());
  static const std::vector<std::string> known = {
      "suite", "seed", "trials", "nu", "rho", "alpha", "beta", "eps", "delta", "eta", "m", "n",
      "prime_bits", "circuit", "circuit2", "class", "dist", "dist2", "wall_clock", "constants"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      c.warnings.push_back("unknown key '" + k + "' ignored");
    }
  }
  if (j.contains("seed") && j["seed"].is_number_unsigned()) {
    c.seed = std::to_string(j["seed"].get<uint64_t>());
  } else {
    read_field(j, "seed", "seed", c.seed);
  }
  read_field(j, "trials", "trials", c.trials);
  read_field(j, "nu", "nu", c.nu);
  read_field(j, "rho", "rho", c.rho);
  read_field(j, "alpha", "alpha", c.alpha);
  read_field(j, "beta", "beta", c.beta);
  read_field(j, "eps", "eps", c.eps);
  read_field(j, "delta", "delta", c.delta);
  read_field(j, "eta", "eta", c.eta);
  read_field(j, "m", "m", c.m);
  read_field(j, "n", "n", c.n);
  read_field(j, "prime_bits", "prime_bits", c.prime_bits);
  read_field(j, "circuit", "circuit", c.circuit);
  read_field(j, "circuit2", "circuit2", c.circuit2);
  read_field(j, "class", "class", c.class_path);
  read_field(j, "dist", "dist", c.dist);
  read_field(j, "dist2", "dist2", c.dist2);
  read_field(j, "wall_clock", "wall_clock", c.wall_clock);
  if (j.contains("constants")) {
    const auto& k = j["constants"];
    require(k.is_object(), "constants", "expected an object");
    auto group = [&](const std::string& name, const std::vector<std::pair<std::string, double*>>& fs) {
      if (!k.contains(name)) return;
      require(k[name].is_object(), "constants." + name, "expected an object");
      for (const auto& [key, v] : k[name].items()) {
        auto it = std::find_if(fs.begin(), fs.end(), [&](const auto& f) { return f.first == key; });
        if (it == fs.end()) {
          c.warnings.push_back("unknown key 'constants." + name + "." + key + "' ignored");
          continue;
        }
        read_field(k[name], key, "constants." + name + "." + key, *it->second);
      }
    };
    double c0 = c.corrsamp.c0;
    group("corrsamp", {{"c0", &c0}, {"c1", &c.corrsamp.c1}, {"c2", &c.corrsamp.c2}});
    require(c0 == std::floor(c0), "constants.corrsamp.c0", "must be an integer");
    c.corrsamp.c0 = static_cast<int>(c0);
    group("learner", {{"c_tau", &c.learner.c_tau}, {"c_m", &c.learner.c_m}});
    group("heavy", {{"c_tau", &c.heavy.c_tau}, {"c1", &c.heavy.c1}, {"c2", &c.heavy.c2}});
    group("rep2dp",
          {{"c_k1", &c.rep2dp.c_k1}, {"c_k2", &c.rep2dp.c_k2}, {"c_fail", &c.rep2dp.c_fail}});
    group("rep2pg", {{"c_k", &c.rep2pg.c_k}, {"c_t", &c.rep2pg.c_t}});
    for (const auto& [key, v] : k.items()) {
      if (key != "corrsamp" && key != "learner" && key != "heavy" && key != "rep2dp" &&
          key != "rep2pg") {
        c.warnings.push_back("unknown key 'constants." + key + "' ignored");
      }
    }
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_file(path)); }

std::string config_to_json(const ExperimentConfig& c) {
  ojson j;
  j["suite"] = c.suite;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["nu"] = c.nu;
  j["rho"] = c.rho;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["eps"] = c.eps;
  j["delta"] = c.delta;
  j["eta"] = c.eta;
  j["m"] = c.m;
  j["n"] = c.n;
  j["prime_bits"] = c.prime_bits;
  j["circuit"] = c.circuit;
  j["circuit2"] = c.circuit2;
  j["class"] = c.class_path;
  j["dist"] = c.dist;
  j["dist2"] = c.dist2;
  j["wall_clock"] = c.wall_clock;
  j["constants"] = constants_json(c);
  return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& c) {
  require(std::find(kSuites.begin(), kSuites.end(), c.suite) != kSuites.end(), "suite",
          "unknown suite '" + c.suite + "'");
  try {
    Seed::from_hex(c.seed);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(e.what());
  }
  auto open01 = [](const std::string& f, double v) { require(v > 0 && v < 1, f, "must lie in (0, 1)"); };
  require(c.nu > 0 && c.nu < 0.5, "nu", "must lie in (0, 0.5)");
  open01("rho", c.rho);
  open01("alpha", c.alpha);
  open01("beta", c.beta);
  require(c.eps > 0 && c.eps <= 4, "eps", "must lie in (0, 4]");
  require(c.delta > 0 && c.delta < 0.5, "delta", "must lie in (0, 0.5)");
  require(c.eta > 0 && c.eta <= 1, "eta", "must lie in (0, 1]");
  require(c.m >= 1 && c.m <= TruthTableCircuit::kMaxInBits, "m", "must lie in [1, 20]");
  require(c.n >= 1 && c.n <= 16, "n", "must lie in [1, 16]");
  require(c.prime_bits >= 4 && c.prime_bits <= 64, "prime_bits", "must lie in [4, 64]");
  require(c.trials <= 100000000, "trials", "must be at most 1e8");
  require(c.corrsamp.c0 >= -8 && c.corrsamp.c0 <= 8, "constants.corrsamp.c0", "must lie in [-8, 8]");
  require(c.corrsamp.c1 > 0, "constants.corrsamp.c1", "must be positive");
  require(c.corrsamp.c2 > 0, "constants.corrsamp.c2", "must be positive");
  require(c.learner.c_tau > 0, "constants.learner.c_tau", "must be positive");
  require(c.learner.c_m > 0, "constants.learner.c_m", "must be positive");
  require(c.heavy.c_tau > 0, "constants.heavy.c_tau", "must be positive");
  require(c.heavy.c1 > 0, "constants.heavy.c1", "must be positive");
  require(c.heavy.c2 > 0, "constants.heavy.c2", "must be positive");
  require(c.rep2dp.c_k1 > 0, "constants.rep2dp.c_k1", "must be positive");
  require(c.rep2dp.c_k2 > 0, "constants.rep2dp.c_k2", "must be positive");
  require(c.rep2dp.c_fail > 0, "constants.rep2dp.c_fail", "must be positive");
  require(c.rep2pg.c_k > 0, "constants.rep2pg.c_k", "must be positive");
  require(c.rep2pg.c_t > 0, "constants.rep2pg.c_t", "must be positive");
}

Report run_suite(const ExperimentConfig& config) {
  validate_config(config);
  auto start = std::chrono::steady_clock::now();
  Seed seed = Seed::from_hex(config.seed);
  RandomTape root(seed);
  Report r;
  r.suite = config.suite;
  r.seed = seed.to_hex();
  const auto& s = config.suite;
  if (s == "corrsamp") run_corrsamp(config, root, r);
  else if (s == "cs-explicit") run_cs_explicit(config, root, r);
  else if (s == "learn-finite") run_learn_finite(config, root, r);
  else if (s == "list-hh") run_list_hh(config, root, r);
  else if (s == "rep2dp") run_rep2dp(config, root, r);
  else if (s == "rep2pg") run_rep2pg(config, root, r);
  else if (s == "dp2rep") run_dp2rep(config, root, r);
  else if (s == "crypto-sep") run_crypto_sep(config, root, r);
  else run_verify_all(config, root, r);
  if (config.wall_clock) {
    r.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

}  // namespace stability
