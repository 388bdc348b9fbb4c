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
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "quadsim/estimator.hpp"
#include "quadsim/quantum.hpp"
#include "quadsim/rng.hpp"
#include "quadsim/trial.hpp"

namespace quadsim::harness {

struct RunStats {
  std::size_t n_trials = 0;
  std::size_t n_global = 0;
  std::size_t n_budget = 0;  // pooled with local in the metrics
  double p_global = 0.0;
  double o_local = 0.0;
  double o_global = 0.0;
  double o_single = 0.0;
  double o_total = 0.0;
  bool unbounded = false;  // p_global == 0, o_total is +inf
};

// o_single = o_local (1 - p) + o_global p, o_total = o_single / p.
RunStats aggregate(std::span<const TrialRecord> trials);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool unbounded = false;  // upper percentile is infinite
};

// Percentile bootstrap of o_total (5th and 95th by default).
Interval bootstrap_ci(std::span<const TrialRecord> trials, Rng& rng,
                      int resamples = 2000, double lower = 0.05,
                      double upper = 0.95);

// Empirical percentile with linear interpolation; +inf entries sort last.
double percentile(std::vector<double> values, double q);

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

// Least squares of log10(o_total) on D over the finite points. Throws
// std::invalid_argument with fewer than two distinct finite D.
Regression scaling_regression(std::span<const std::pair<int, double>> points);

class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleCell : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names{"quads", "gas", "cmaes", "pso",
                                              "basinhopping"};
  return names;
}

bool is_statevector_method(const std::string& method);

struct ExperimentPlan {
  std::vector<std::string> methods;
  std::vector<std::string> functions;
  std::vector<int> dims;
  int tau = 8;
  int trials = 100;
  std::uint64_t seed = 0;
  std::uint64_t budget = 10'000'000;            // per trial, combined calls
  std::uint64_t surrogate_budget = 100'000'000;  // classical surrogate
  std::uint64_t amplitude_cap = quantum::kDefaultAmplitudeCap;
  bool estimator_fallback = false;
  int threads = 0;  // 0: hardware concurrency
  int bootstrap_resamples = 2000;
  std::filesystem::path output_dir = "results";

  double alpha = 0.5;
  double quantile = 0.2;
  double growth = 1.2;
  double eps = 0.01;
  double eps_sigma = 0.01;
  double sigma0 = 0.5;
};

// Throws PlanError.
void validate(const ExperimentPlan& plan);

nlohmann::json to_json(const ExperimentPlan& plan);
// Missing keys keep the values already in `base`.
ExperimentPlan plan_from_json(const nlohmann::json& j, ExperimentPlan base = {});

struct CellKey {
  std::string method;
  std::string function;
  int dim = 0;
  int tau = 0;

  std::string id() const;  // "<method>__<function>__d<D>__t<tau>"
};

struct CellResult {
  CellKey key;
  std::vector<TrialRecord> records;
  RunStats stats;
  Interval ci;
  // Set when the cell ran on the classical surrogate.
  std::optional<estimate::EstimateReport> estimate;
  bool from_cache = false;
};

struct ResultStore {
  std::filesystem::path dir;
  std::vector<CellResult> cells;
};

// Runs one trial of `method`; the record carries key fields and seed.
TrialRecord run_trial(const ExperimentPlan& plan, const CellKey& key,
                      std::uint64_t trial_index);

// Runs every cell, writes <dir>/cells/<id>.jsonl, <dir>/manifest.json and
// <dir>/summary.csv. Cells listed in the manifest with an identical
// configuration are loaded instead of recomputed. Throws InfeasibleCell
// when a statevector cell exceeds the amplitude cap and the estimator
// fallback is off.
ResultStore run_experiment(const ExperimentPlan& plan);

// Reads every cell file below `dir`.
ResultStore load_results(const std::filesystem::path& dir,
                         int bootstrap_resamples = 2000,
                         std::uint64_t seed = 0);

void write_jsonl(const std::filesystem::path& path,
                 std::span<const TrialRecord> records);
std::vector<TrialRecord> read_jsonl(const std::filesystem::path& path);

// stats.csv, traces/, fraction_solved/, scaling.csv, regression.csv and the
// SVG charts under `out`.
void emit_reports(const ResultStore& store, const std::filesystem::path& out);

struct StatsRow {
  CellKey key;
  RunStats stats;
  Interval ci;
  bool estimated = false;
  double o_lower = 0.0;        // surrogate lower bound, estimated cells
  double o_total_est = 0.0;    // 2.3 * o_lower
};

void write_stats_csv(const std::filesystem::path& path,
                     std::span<const StatsRow> rows);
std::vector<StatsRow> read_stats_csv(const std::filesystem::path& path);
std::vector<StatsRow> stats_rows(const ResultStore& store);

// Paired statevector and surrogate runs for one cell.
struct Calibration {
  CellKey key;
  RunStats simulated;
  Interval simulated_ci;
  estimate::EstimateReport estimated;
  double ratio = 0.0;  // simulated o_total / estimated o_lower
};

Calibration calibrate(const ExperimentPlan& plan, const CellKey& key);

}  // namespace quadsim::harness
