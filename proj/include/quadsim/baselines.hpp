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
#include <vector>

#include "quadsim/rng.hpp"
#include "quadsim/testbed.hpp"
#include "quadsim/trial.hpp"

namespace quadsim::baselines {

// Returns f(x), or nullopt when the caller wants the search to stop
// (global hit or budget).
using Evaluator = std::function<std::optional<double>(const Point&)>;

struct Swarm {
  std::vector<Point> positions;
  std::vector<Point> velocities;
  std::vector<Point> personal_best;
  std::vector<double> personal_best_value;
  Point global_best;
  double global_best_value = 0.0;
  double inertia = 0.9;    // w
  double cognitive = 0.5;  // c1
  double social = 0.3;     // c2
};

// Uniform positions in [0,1]^D, zero velocities; evaluates every particle.
// Returns nullopt if the evaluator asked to stop.
std::optional<Swarm> init_swarm(int particles, int dims, Evaluator& eval,
                                Rng& rng);

// One synchronous step: every particle draws its own r1, r2 ~ U(0,1) (in
// particle order, r1 first), moves, is clamped to the cube with the clamped
// velocity components zeroed, and is evaluated; bests are updated after all
// moves. Returns false if the evaluator asked to stop mid-step.
bool pso_step(Swarm& swarm, Evaluator& eval, Rng& rng);

struct PsoConfig {
  std::optional<int> particles;  // 10 * D if unset
  double inertia = 0.9;
  double cognitive = 0.5;
  double social = 0.3;
  int stagnation_window = 50;
  double stagnation_tol = 1e-12;
  double eps = 0.01;
  std::uint64_t budget = 10'000'000;
};

TrialRecord run_pso(const ObjectiveSpec& spec, const OptimumRecord& opt,
                    const PsoConfig& config, Rng& rng);

struct NelderMeadConfig {
  double initial_step = 0.05;
  double xtol = 1e-8;
  double ftol = 1e-12;
  int max_evaluations = 2000;
};

struct LocalResult {
  Point x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;  // false: evaluation cap reached
  bool stopped = false;    // evaluator asked to stop
};

// Nelder-Mead with every trial vertex projected onto [0,1]^D. The result is
// never worse than x0.
LocalResult local_minimize(Evaluator& eval, const Point& x0,
                           const NelderMeadConfig& config = {});
LocalResult local_minimize(const ObjectiveSpec& spec, const Point& x0,
                           const NelderMeadConfig& config = {});

struct BasinHoppingConfig {
  double step = 0.25;
  double temperature = 1.0;
  int max_hops = 200;
  double eps = 0.01;
  std::uint64_t budget = 10'000'000;
  NelderMeadConfig local;
  // Called after every hop with the candidate and current basin values
  // (current as it was before the Metropolis decision).
  std::function<void(int hop, double candidate, double current, bool accepted)>
      on_hop;
};

// Perturb, clamp to the nearest boundary, minimize locally, Metropolis
// accept. Outcomes: Global on a hit, Local at the hop cap, Budget.
TrialRecord run_basinhopping(const ObjectiveSpec& spec,
                             const OptimumRecord& opt,
                             const BasinHoppingConfig& config, Rng& rng);

}  // namespace quadsim::baselines
