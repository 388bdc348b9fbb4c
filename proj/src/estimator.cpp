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

#include "quadsim/estimator.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "quadsim/cma.hpp"
#include "quadsim/errors.hpp"
#include "quadsim/optimizers.hpp"

namespace quadsim::estimate {
namespace {

// Walks the rounds of the randomized-rotation schedule; `round` receives
// (prod_{j<k} b_j, n_k, sum_r a_r, sum_r r a_r) and returns its contribution.
template <typename Round>
double sum_rounds(double p, const SeriesOptions& options, Round round) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be in (0, 1)");
  if (!(options.growth > 1.0)) throw std::invalid_argument("growth must be > 1");
  const double angle = std::asin(std::sqrt(p));
  double reach = 1.0;  // probability that round k happens
  double total = 0.0;
  double m = 1.0;
  for (std::size_t k = 0; k < options.max_terms; ++k) {
    const auto n = static_cast<std::uint64_t>(std::floor(m));
    double sum_a = 0.0;
    double sum_ra = 0.0;
    for (std::uint64_t r = 0; r <= n; ++r) {
      const double s = std::sin((2.0 * static_cast<double>(r) + 1.0) * angle);
      const double a = s * s;
      sum_a += a;
      sum_ra += static_cast<double>(r) * a;
    }
    total += round(reach, n, sum_a, sum_ra);
    reach *= 1.0 - sum_a / (static_cast<double>(n) + 1.0);
    if (reach < options.tail) return total;
    m *= options.growth;
  }
  throw std::runtime_error("series did not converge within max_terms");
}

}  // namespace

double n_opt(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in (0, 1]");
  const double s = std::sqrt(p);
  return std::acos(s) / (2.0 * std::asin(s));
}

double s_of_p(double p, const SeriesOptions& options) {
  return sum_rounds(p, options,
                    [](double reach, std::uint64_t n, double, double sum_ra) {
                      return reach * sum_ra / (static_cast<double>(n) + 1.0);
                    });
}

double expected_total_rotations(double p, const SeriesOptions& options) {
  return sum_rounds(p, options,
                    [](double reach, std::uint64_t n, double, double) {
                      return reach * static_cast<double>(n) / 2.0;
                    });
}

std::string to_string(Method method) {
  return method == Method::Gas ? "gas" : "quads";
}

Method method_from_string(const std::string& s) {
  if (s == "gas") return Method::Gas;
  if (s == "quads") return Method::Quads;
  throw std::invalid_argument("surrogate method must be gas or quads: " + s);
}

double trial_cost(std::span<const IterationStat> iterations,
                  bool weight_by_accepted) {
  double cost = 0.0;
  for (const auto& it : iterations) {
    if (it.accepted == 0) continue;
    const double w = weight_by_accepted ? static_cast<double>(it.accepted) : 1.0;
    cost += w * n_opt(it.acceptance());
  }
  return cost;
}

TrialRecord run_classical_surrogate(Method method, const ObjectiveSpec& spec,
                                    const OptimumRecord& opt, const Grid& grid,
                                    const SurrogateConfig& config, Rng& rng) {
  const int d = spec.dimension;
  TrialRecord rec;
  rec.tau = grid.bits();

  // Evaluates a grid point; true when the trial must stop.
  auto evaluate = [&](const Point& x, double& value) {
    value = spec.evaluate(x);
    ++rec.counter.classical_evals;
    rec.observe(value);
    if (is_global_hit(x, opt, config.eps)) {
      rec.outcome = Outcome::Global;
      return true;
    }
    if (rec.counter.classical_evals > config.budget) {
      rec.outcome = Outcome::Budget;
      return true;
    }
    return false;
  };
  auto finish = [&] {
    rec.estimated_quantum_cost =
        trial_cost(rec.iterations, config.weight_by_accepted);
    return rec;
  };
  auto close_generation = [&](std::uint64_t accepted, std::uint64_t attempts) {
    if (accepted > 0) {
      rec.iterations.push_back({rec.generations, accepted, attempts});
    }
  };

  double value = 0.0;
  if (method == Method::Gas) {
    std::uniform_int_distribution<std::uint64_t> digit(0, grid.cells_per_axis() - 1);
    Point x(static_cast<std::size_t>(d));
    auto draw = [&] {
      for (double& v : x) v = grid.coordinate(digit(rng));
    };
    draw();
    if (evaluate(x, value)) return finish();
    double threshold = value;
    for (;;) {
      std::uint64_t attempts = 0;
      for (;;) {
        draw();
        ++attempts;
        const bool stop = evaluate(x, value);
        const bool good = value < threshold;
        if (stop) {
          close_generation(good ? 1 : 0, attempts);
          return finish();
        }
        if (good) break;
      }
      threshold = value;
      close_generation(1, attempts);
      ++rec.generations;
    }
  }

  const int k = config.selected.value_or(cma::default_population(d).selected);
  const cma::CmaHyperparams hp = cma::default_hyperparams(d, k);
  Point mu0(static_cast<std::size_t>(d));
  for (double& v : mu0) v = uniform01(rng);
  cma::DistributionState state =
      cma::DistributionState::initial(mu0, config.sigma0);
  auto finish_quads = [&](Outcome outcome) {
    rec.outcome = outcome;
    rec.final_state = cma::to_json(state);
    return finish();
  };
  if (evaluate(mu0, value)) return finish_quads(rec.outcome);
  double threshold = value;
  if (state.sigma < config.eps_sigma) return finish_quads(Outcome::Local);

  std::vector<Point> accepted;
  std::vector<double> accepted_values;
  std::vector<Point> ordered(static_cast<std::size_t>(k));
  for (;;) {
    std::optional<cma::TruncatedGaussianSampler> sampler;
    try {
      sampler.emplace(state);
    } catch (const NumericalError&) {
      rec.covariance_failure = true;
      return finish_quads(Outcome::Local);
    }
    accepted.clear();
    accepted_values.clear();
    std::uint64_t attempts = 0;
    while (accepted.size() < static_cast<std::size_t>(k)) {
      const Point x = grid.snap(sampler->draw(rng));
      ++attempts;
      const bool stop = evaluate(x, value);
      const bool good = value < threshold;
      if (good) {
        accepted.push_back(x);
        accepted_values.push_back(value);
      }
      if (stop) {
        close_generation(accepted.size(), attempts);
        return finish_quads(rec.outcome);
      }
    }
    close_generation(accepted.size(), attempts);
    const auto order = cma::select_best(accepted_values, k);
    for (std::size_t i = 0; i < order.size(); ++i) ordered[i] = accepted[order[i]];
    try {
      state = cma::cma_update(state, ordered, hp);
    } catch (const NumericalError&) {
      rec.covariance_failure = true;
      return finish_quads(Outcome::Local);
    }
    threshold = update_threshold(threshold, accepted_values, config.alpha,
                                 config.quantile);
    rec.generations = state.generation;
    if (state.sigma < config.eps_sigma) return finish_quads(Outcome::Local);
  }
}

nlohmann::json to_json(const EstimateReport& r) {
  auto num = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf");
  };
  return {{"n_trials", r.n_trials},   {"n_global", r.n_global},
          {"p_global", r.p_global},   {"o_local_lower", num(r.o_local)},
          {"o_global_lower", num(r.o_global)},
          {"o_single_lower", num(r.o_single)},
          {"o_lower", num(r.o_lower)}, {"o_total_estimate", num(r.o_total)},
          {"coefficient", kTotalCoefficient}, {"unbounded", r.unbounded}};
}

EstimateReport estimate_lower_bound(std::span<const TrialRecord> trials,
                                    bool weight_by_accepted) {
  EstimateReport rep;
  rep.n_trials = trials.size();
  double sum_global = 0.0;
  double sum_local = 0.0;
  for (const auto& t : trials) {
    const double c = trial_cost(t.iterations, weight_by_accepted);
    if (t.outcome == Outcome::Global) {
      ++rep.n_global;
      sum_global += c;
    } else {
      sum_local += c;
    }
  }
  const std::size_t n_local = rep.n_trials - rep.n_global;
  rep.o_global = rep.n_global > 0 ? sum_global / static_cast<double>(rep.n_global) : 0.0;
  rep.o_local = n_local > 0 ? sum_local / static_cast<double>(n_local) : 0.0;
  if (rep.n_trials == 0 || rep.n_global == 0) {
    rep.unbounded = true;
    rep.o_single = rep.o_local;
    rep.o_lower = rep.o_total = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.p_global = static_cast<double>(rep.n_global) / static_cast<double>(rep.n_trials);
  rep.o_single = rep.o_local * (1.0 - rep.p_global) + rep.o_global * rep.p_global;
  rep.o_lower = rep.o_single / rep.p_global;
  rep.o_total = kTotalCoefficient * rep.o_lower;
  return rep;
}

}  // namespace quadsim::estimate
