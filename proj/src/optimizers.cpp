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

#include "quadsim/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "quadsim/cma.hpp"
#include "quadsim/errors.hpp"

namespace quadsim {

nlohmann::json to_json(const GenerationTrace& t) {
  return {{"g", t.generation},
          {"mean", t.mean},
          {"sigma", t.sigma},
          {"threshold", t.threshold},
          {"accepted", t.accepted_values},
          {"quantum_calls", t.counter.quantum_calls},
          {"classical_evals", t.counter.classical_evals}};
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must be in [0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double update_threshold(double threshold, std::span<const double> values,
                        double alpha, double q) {
  return alpha * threshold + (1.0 - alpha) * quantile(values, q);
}

TrialRecord run_gas(const ObjectiveSpec& spec, const OptimumRecord& opt,
                    const Grid& grid, const GasConfig& config, Rng& rng) {
  const auto values = quantum::grid_values(spec, grid, config.amplitude_cap);
  const quantum::Statevector psi0 =
      quantum::prepare_uniform_state(grid, config.amplitude_cap);

  TrialRecord rec;
  const std::uint64_t start = std::uniform_int_distribution<std::uint64_t>(
      0, grid.total_points() - 1)(rng);
  double threshold = (*values)[start];
  ++rec.counter.classical_evals;
  rec.observe(threshold);
  if (is_global_hit(grid.point(start), opt, config.eps)) {
    rec.outcome = Outcome::Global;
    return rec;
  }
  if (rec.counter.combined() > config.budget) {
    rec.outcome = Outcome::Budget;
    return rec;
  }

  quantum::AaOptions aa;
  aa.growth = config.growth;
  aa.budget = config.budget;
  bool hit = false;
  auto observe = [&](std::uint64_t j, double v) {
    rec.observe(v);
    hit = is_global_hit(grid.point(j), opt, config.eps);
    return hit;
  };
  for (;;) {
    const quantum::AaResult res = quantum::aa_sample(
        psi0, *values, threshold, aa, rng, rec.counter, observe);
    if (res.status == quantum::AaStatus::BudgetExhausted) {
      rec.outcome = Outcome::Budget;
      return rec;
    }
    if (res.status == quantum::AaStatus::Stopped) {
      rec.outcome = Outcome::Global;
      ++rec.generations;
      return rec;
    }
    threshold = res.value;
    ++rec.generations;
    if (config.trace) {
      config.trace({rec.generations, {}, 0.0, threshold, {res.value}, rec.counter});
    }
  }
}

TrialRecord run_quads(const ObjectiveSpec& spec, const OptimumRecord& opt,
                      const Grid& grid, const QuadsConfig& config, Rng& rng) {
  const int d = spec.dimension;
  const int k = config.selected.value_or(cma::default_population(d).selected);
  const cma::CmaHyperparams hp = cma::default_hyperparams(d, k);
  const auto values = quantum::grid_values(spec, grid, config.amplitude_cap);

  TrialRecord rec;
  Point mu0(static_cast<std::size_t>(d));
  for (double& v : mu0) v = uniform01(rng);
  cma::DistributionState state =
      cma::DistributionState::initial(mu0, config.sigma0);
  auto finish = [&](Outcome outcome) {
    rec.outcome = outcome;
    rec.final_state = cma::to_json(state);
    return rec;
  };

  double threshold = spec.evaluate(mu0);
  ++rec.counter.classical_evals;
  rec.observe(threshold);
  if (is_global_hit(mu0, opt, config.eps)) return finish(Outcome::Global);
  if (rec.counter.combined() > config.budget) return finish(Outcome::Budget);
  if (state.sigma < config.eps_sigma) return finish(Outcome::Local);

  quantum::AaOptions aa;
  aa.growth = config.growth;
  aa.budget = config.budget;
  auto observe = [&](std::uint64_t j, double v) {
    rec.observe(v);
    return is_global_hit(grid.point(j), opt, config.eps);
  };

  std::vector<Point> accepted;
  std::vector<double> accepted_values;
  std::vector<Point> ordered(static_cast<std::size_t>(k));
  for (;;) {
    std::optional<quantum::Statevector> psi0;
    try {
      psi0.emplace(quantum::prepare_gaussian_state(
          grid, std::span<const double>(state.mean.data(), d),
          state.covariance(), config.amplitude_cap));
    } catch (const NumericalError&) {
      rec.covariance_failure = true;
      return finish(Outcome::Local);
    }
    accepted.clear();
    accepted_values.clear();
    while (accepted.size() < static_cast<std::size_t>(k)) {
      const quantum::AaResult res = quantum::aa_sample(
          *psi0, *values, threshold, aa, rng, rec.counter, observe);
      if (res.status == quantum::AaStatus::BudgetExhausted) {
        return finish(Outcome::Budget);
      }
      if (res.status == quantum::AaStatus::Stopped) {
        return finish(Outcome::Global);
      }
      accepted.push_back(grid.point(res.index));
      accepted_values.push_back(res.value);
    }
    const auto order = cma::select_best(accepted_values, k);
    for (std::size_t i = 0; i < order.size(); ++i) ordered[i] = accepted[order[i]];
    try {
      state = cma::cma_update(state, ordered, hp);
    } catch (const NumericalError&) {
      rec.covariance_failure = true;
      return finish(Outcome::Local);
    }
    threshold = update_threshold(threshold, accepted_values, config.alpha,
                                 config.quantile);
    rec.generations = state.generation;
    if (config.trace) {
      config.trace({state.generation,
                    Point(state.mean.data(), state.mean.data() + d),
                    state.sigma, threshold, accepted_values, rec.counter});
    }
    if (state.sigma < config.eps_sigma) return finish(Outcome::Local);
  }
}

}  // namespace quadsim
