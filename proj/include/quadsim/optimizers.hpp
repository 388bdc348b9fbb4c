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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "quadsim/quantum.hpp"
#include "quadsim/rng.hpp"
#include "quadsim/testbed.hpp"
#include "quadsim/trial.hpp"

namespace quadsim {

// Per-generation snapshot for trace files (one JSON line each).
struct GenerationTrace {
  int generation = 0;
  std::vector<double> mean;  // empty for GAS
  double sigma = 0.0;
  double threshold = 0.0;
  std::vector<double> accepted_values;
  OracleCounter counter;
};

nlohmann::json to_json(const GenerationTrace& trace);

using TraceSink = std::function<void(const GenerationTrace&)>;

struct QuadsConfig {
  double alpha = 0.5;       // threshold smoothing
  double quantile = 0.2;    // q
  double growth = 1.2;      // lambda
  double eps = 0.01;        // global-hit radius
  double eps_sigma = 0.01;  // local-convergence step size
  double sigma0 = 0.5;
  std::optional<int> selected;  // K; default_population(D).selected if unset
  std::uint64_t budget = 10'000'000;  // combined oracle calls
  int tau = 8;
  std::uint64_t amplitude_cap = quantum::kDefaultAmplitudeCap;
  TraceSink trace;
};

struct GasConfig {
  double growth = 1.2;
  double eps = 0.01;
  std::uint64_t budget = 10'000'000;
  int tau = 8;
  std::uint64_t amplitude_cap = quantum::kDefaultAmplitudeCap;
  TraceSink trace;
};

// Linear interpolation between order statistics at rank q (n - 1).
// Throws std::invalid_argument on empty input.
double quantile(std::span<const double> values, double q);

// alpha * threshold + (1 - alpha) * quantile_q(values)
double update_threshold(double threshold, std::span<const double> values,
                        double alpha, double q);

// Grover adaptive search from a uniform state. Outcomes: Global or Budget.
TrialRecord run_gas(const ObjectiveSpec& spec, const OptimumRecord& opt,
                    const Grid& grid, const GasConfig& config, Rng& rng);

// Amplitude amplification from an adaptive Gaussian state with CMA-ES
// updates and a smoothed-quantile threshold.
TrialRecord run_quads(const ObjectiveSpec& spec, const OptimumRecord& opt,
                      const Grid& grid, const QuadsConfig& config, Rng& rng);

}  // namespace quadsim
