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

#include "quadsim/trial.hpp"

#include <limits>
#include <stdexcept>

namespace quadsim {

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Global:
      return "global";
    case Outcome::Local:
      return "local";
    case Outcome::Budget:
      return "budget";
  }
  return "budget";
}

Outcome outcome_from_string(const std::string& s) {
  if (s == "global") return Outcome::Global;
  if (s == "local") return Outcome::Local;
  if (s == "budget") return Outcome::Budget;
  throw std::invalid_argument("unknown outcome: " + s);
}

double TrialRecord::best_value() const {
  if (best_value_trace.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  return best_value_trace.back().second;
}

void TrialRecord::observe(double value) {
  if (best_value_trace.empty() || value < best_value_trace.back().second) {
    best_value_trace.emplace_back(counter.combined(), value);
  }
}

nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [calls, value] : r.best_value_trace) {
    trace.push_back({calls, value});
  }
  nlohmann::json j = {
      {"method", r.method},
      {"function", r.function},
      {"dim", r.dim},
      {"tau", r.tau},
      {"trial", r.trial},
      {"seed", r.seed},
      {"outcome", to_string(r.outcome)},
      {"quantum_calls", r.counter.quantum_calls},
      {"classical_evals", r.counter.classical_evals},
      {"combined_calls", r.counter.combined()},
      {"generations", r.generations},
      {"covariance_failure", r.covariance_failure},
      {"best_value", r.best_value_trace.empty()
                         ? nlohmann::json(nullptr)
                         : nlohmann::json(r.best_value())},
      {"trace", trace},
      {"final_state", r.final_state},
  };
  if (!r.iterations.empty()) {
    nlohmann::json its = nlohmann::json::array();
    for (const auto& it : r.iterations) {
      its.push_back({it.generation, it.accepted, it.attempts});
    }
    j["iterations"] = its;
  }
  if (r.estimated_quantum_cost) {
    j["estimated_quantum_cost"] = *r.estimated_quantum_cost;
  }
  return j;
}

TrialRecord trial_from_json(const nlohmann::json& j) {
  TrialRecord r;
  r.method = j.at("method").get<std::string>();
  r.function = j.at("function").get<std::string>();
  r.dim = j.at("dim").get<int>();
  r.tau = j.at("tau").get<int>();
  r.trial = j.at("trial").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  r.counter.quantum_calls = j.at("quantum_calls").get<std::uint64_t>();
  r.counter.classical_evals = j.at("classical_evals").get<std::uint64_t>();
  r.generations = j.at("generations").get<int>();
  r.covariance_failure = j.value("covariance_failure", false);
  for (const auto& e : j.at("trace")) {
    r.best_value_trace.emplace_back(e.at(0).get<std::uint64_t>(),
                                    e.at(1).get<double>());
  }
  r.final_state = j.value("final_state", nlohmann::json(nullptr));
  if (j.contains("iterations")) {
    for (const auto& e : j.at("iterations")) {
      r.iterations.push_back({e.at(0).get<int>(), e.at(1).get<std::uint64_t>(),
                              e.at(2).get<std::uint64_t>()});
    }
  }
  if (j.contains("estimated_quantum_cost")) {
    r.estimated_quantum_cost = j.at("estimated_quantum_cost").get<double>();
  }
  return r;
}

}  // namespace quadsim
