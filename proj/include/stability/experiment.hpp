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

#ifndef STABILITY_EXPERIMENT_HPP_
#define STABILITY_EXPERIMENT_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stability/corrsamp.hpp"
#include "stability/learners.hpp"
#include "stability/transforms.hpp"

namespace stability {

enum class Cmp { kLessEq, kGreaterEq };

struct Metric {
  std::string name;
  double value = 0;
  Cmp cmp = Cmp::kLessEq;
  double tolerance = 0;
  double half_width = 0;

  bool pass() const { return cmp == Cmp::kLessEq ? value <= tolerance : value >= tolerance; }
  friend bool operator==(const Metric&, const Metric&) = default;
};

struct Report {
  std::string suite;
  std::string seed;
  std::vector<Metric> metrics;
  std::map<std::string, double> constants;
  std::map<std::string, std::string> notes;
  std::optional<double> wall_clock_seconds;

  bool pass() const;
  friend bool operator==(const Report&, const Report&) = default;
};

enum class ReportFormat { kJson, kCsv };

std::string emit_report(const Report& r, ReportFormat format = ReportFormat::kJson);
Report report_from_json(std::string_view text);

extern const std::vector<std::string> kSuites;

struct ExperimentConfig {
  std::string suite;
  std::string seed = "0";
  uint64_t trials = 0;  // 0: the suite's default
  double nu = 0.1;
  double rho = 0.2;
  double alpha = 0.2;
  double beta = 0.1;
  double eps = 1.0;
  double delta = 0.05;
  double eta = 0.8;
  unsigned m = 6;
  unsigned n = 4;
  unsigned prime_bits = 16;
  std::string circuit;
  std::string circuit2;
  std::string class_path;
  std::string dist;
  std::string dist2;
  bool wall_clock = false;

  CorrSampConstants corrsamp;
  LearnerConstants learner;
  HeavyHitterConstants heavy;
  RepToDpConstants rep2dp;
  RepToPgConstants rep2pg;

  std::vector<std::string> warnings;
};

// Defaults differ per suite (dp2rep runs at rho = 0.1, rep2pg at
// delta = 0.1).
ExperimentConfig default_config(const std::string& suite);
// Unknown keys become warnings. Errors name the offending field.
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& c);
void validate_config(const ExperimentConfig& c);

Report run_suite(const ExperimentConfig& config);

}  // namespace stability

#endif  // STABILITY_EXPERIMENT_HPP_
