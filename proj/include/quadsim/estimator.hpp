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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quadsim/rng.hpp"
#include "quadsim/testbed.hpp"
#include "quadsim/trial.hpp"

namespace quadsim::estimate {

// Ratio between measured quantum cost and the classical lower bound.
inline constexpr double kTotalCoefficient = 2.3;

// Rotation count that drives success probability to 1:
// arccos(sqrt p) / (2 arcsin(sqrt p)). Throws for p outside (0, 1].
double n_opt(double p);

struct SeriesOptions {
  double growth = 1.25;             // lambda
  std::size_t max_terms = 100'000;  // rounds k
  double tail = 1e-12;              // stop once prod_j b_j falls below this
};

// Expected rotations spent in the round that accepts, summed over rounds:
//   S = sum_k 1/(n_k+1) (prod_{j<k} b_j) sum_{r<=n_k} r a_r,
//   n_k = floor(lambda^(k-1)), a_r = sin^2((2r+1) arcsin sqrt p),
//   b_k = 1 - sum_r a_r / (n_k+1).
// Throws std::invalid_argument for p outside (0, 1) and std::runtime_error
// when the tail is still above `tail` after max_terms rounds.
double s_of_p(double p, const SeriesOptions& options = {});

// Expected rotations over all rounds until acceptance, rejected rounds
// included: sum_k (prod_{j<k} b_j) n_k / 2. This is what a trial's
// quantum_calls counter measures for one amplitude amplification.
double expected_total_rotations(double p, const SeriesOptions& options = {});

enum class Method { Gas, Quads };

std::string to_string(Method method);
Method method_from_string(const std::string& s);

struct SurrogateConfig {
  double alpha = 0.5;
  double quantile = 0.2;
  double eps = 0.01;
  double eps_sigma = 0.01;
  double sigma0 = 0.5;
  std::optional<int> selected;
  std::uint64_t budget = 100'000'000;  // classical evaluations
  int tau = 8;
  bool weight_by_accepted = true;
};

// Same control flow as run_gas / run_quads with every amplitude
// amplification replaced by classical rejection sampling: uniform grid draws
// (GAS) or truncated Gaussian draws snapped to the grid (QuADS). Records
// (accepted, attempts) per generation and the per-trial cost
// sum_i w_i n_opt(accepted_i / attempts_i) in estimated_quantum_cost, with
// w_i = accepted_i (or 1 when weight_by_accepted is false).
TrialRecord run_classical_surrogate(Method method, const ObjectiveSpec& spec,
                                    const OptimumRecord& opt, const Grid& grid,
                                    const SurrogateConfig& config, Rng& rng);

double trial_cost(std::span<const IterationStat> iterations,
                  bool weight_by_accepted = true);

struct EstimateReport {
  std::size_t n_trials = 0;
  std::size_t n_global = 0;
  double p_global = 0.0;
  double o_local = 0.0;   // lower bound averaged over non-global trials
  double o_global = 0.0;  // lower bound averaged over global trials
  double o_single = 0.0;
  double o_lower = 0.0;
  double o_total = 0.0;   // kTotalCoefficient * o_lower
  bool unbounded = false; // no global trial: o_lower is infinite
};

nlohmann::json to_json(const EstimateReport& report);

EstimateReport estimate_lower_bound(std::span<const TrialRecord> trials,
                                    bool weight_by_accepted = true);

}  // namespace quadsim::estimate
