// Copyright 2026 The quadsim Authors
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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace quadsim {

using Point = std::vector<double>;

enum class Outcome { Global, Local, Budget };

std::string to_string(Outcome outcome);
Outcome outcome_from_string(const std::string& s);

// Oracle accounting for one trial. quantum_calls counts sign-flip oracle
// applications inside Grover iterations; classical_evals counts every direct
// evaluation of f (including the threshold check on a measured candidate).
struct OracleCounter {
  std::uint64_t quantum_calls = 0;
  std::uint64_t classical_evals = 0;

  std::uint64_t combined() const noexcept {
    return quantum_calls + classical_evals;
  }
};

// Acceptance bookkeeping for one generation of a classical surrogate run:
// `accepted` good samples needed `attempts` draws.
struct IterationStat {
  int generation = 0;
  std::uint64_t accepted = 0;
  std::uint64_t attempts = 0;

  double acceptance() const noexcept {
    return static_cast<double>(accepted) / static_cast<double>(attempts);
  }
};

struct TrialRecord {
  std::string method;
  std::string function;
  int dim = 0;
  int tau = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;

  Outcome outcome = Outcome::Budget;
  OracleCounter counter;
  int generations = 0;
  bool covariance_failure = false;
  // (combined oracle count, best f so far); f is non-increasing.
  std::vector<std::pair<std::uint64_t, double>> best_value_trace;
  nlohmann::json final_state;  // null when the method keeps no distribution

  // Classical surrogate runs only.
  std::vector<IterationStat> iterations;
  std::optional<double> estimated_quantum_cost;

  double best_value() const;
  // Metric cost: combined calls for quantum methods, f evaluations otherwise.
  std::uint64_t cost() const noexcept { return counter.combined(); }

  // Records f at the current combined count if it improves on the trace.
  void observe(double value);
};

nlohmann::json to_json(const TrialRecord& record);
TrialRecord trial_from_json(const nlohmann::json& j);

}  // namespace quadsim
