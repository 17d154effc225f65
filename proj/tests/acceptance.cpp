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

// Runs every acceptance criterion at the pinned seed and prints one line per
// criterion. Exit status is nonzero if any criterion fails or overruns its
// time budget.

#include <chrono>
#include <cstdio>
#include <string>

#include "stability/verify.hpp"

int main() {
  using stability::Cmp;
  stability::RandomTape root(stability::acceptance_seed());
  int failed = 0;
  for (const auto& c : stability::acceptance_criteria()) {
    auto start = std::chrono::steady_clock::now();
    stability::CheckResult res;
    std::string error;
    try {
      res = c.run(root.derive(static_cast<uint64_t>(c.id)));
    } catch (const std::exception& e) {
      error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = error.empty() && res.pass() && secs <= c.budget_seconds;
    failed += !ok;
    std::string detail;
    for (const auto& m : res.metrics) {
      char buf[160];
      std::snprintf(buf, sizeof buf, " %s=%.6g%s%.6g", m.name.c_str(), m.value,
                    m.cmp == Cmp::kLessEq ? "<=" : ">=", m.tolerance);
      detail += buf;
    }
    if (!error.empty()) detail += " error=" + error;
    if (secs > c.budget_seconds) detail += " over_budget";
    std::printf("[%s] %2d %-22s (%.1fs/%.0fs)%s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                secs, c.budget_seconds, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(stability::acceptance_criteria().size()) - failed,
              stability::acceptance_criteria().size());
  return failed == 0 ? 0 : 1;
}
