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

#include "quadsim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace quadsim::baselines {
namespace {

void project(Point& x) {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
}

// Wraps f with the shared stop rules of every baseline trial.
Evaluator make_trial_evaluator(const ObjectiveSpec& spec,
                               const OptimumRecord& opt, double eps,
                               std::uint64_t budget, TrialRecord& rec) {
  return [&spec, &opt, eps, budget, &rec](const Point& x) -> std::optional<double> {
    const double v = spec.evaluate(x);
    ++rec.counter.classical_evals;
    rec.observe(v);
    if (is_global_hit(x, opt, eps)) {
      rec.outcome = Outcome::Global;
      return std::nullopt;
    }
    if (rec.counter.classical_evals > budget) {
      rec.outcome = Outcome::Budget;
      return std::nullopt;
    }
    return v;
  };
}

}  // namespace

std::optional<Swarm> init_swarm(int particles, int dims, Evaluator& eval,
                                Rng& rng) {
  if (particles < 1 || dims < 1) {
    throw std::invalid_argument("swarm needs particles >= 1 and dims >= 1");
  }
  Swarm s;
  const auto d = static_cast<std::size_t>(dims);
  for (int i = 0; i < particles; ++i) {
    Point x(d);
    for (double& v : x) v = uniform01(rng);
    const auto fx = eval(x);
    if (!fx) return std::nullopt;
    s.positions.push_back(x);
    s.velocities.emplace_back(d, 0.0);
    s.personal_best.push_back(x);
    s.personal_best_value.push_back(*fx);
  }
  const auto best = static_cast<std::size_t>(
      std::min_element(s.personal_best_value.begin(),
                       s.personal_best_value.end()) -
      s.personal_best_value.begin());
  s.global_best = s.personal_best[best];
  s.global_best_value = s.personal_best_value[best];
  return s;
}

bool pso_step(Swarm& swarm, Evaluator& eval, Rng& rng) {
  const std::size_t n = swarm.positions.size();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r1 = uniform01(rng);
    const double r2 = uniform01(rng);
    Point& x = swarm.positions[i];
    Point& v = swarm.velocities[i];
    const Point& p = swarm.personal_best[i];
    for (std::size_t k = 0; k < x.size(); ++k) {
      v[k] = swarm.inertia * v[k] + swarm.cognitive * r1 * (p[k] - x[k]) +
             swarm.social * r2 * (swarm.global_best[k] - x[k]);
      x[k] += v[k];
      if (x[k] < 0.0) {
        x[k] = 0.0;
        v[k] = 0.0;
      } else if (x[k] > 1.0) {
        x[k] = 1.0;
        v[k] = 0.0;
      }
    }
    const auto fx = eval(x);
    if (!fx) return false;
    values[i] = *fx;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] < swarm.personal_best_value[i]) {
      swarm.personal_best_value[i] = values[i];
      swarm.personal_best[i] = swarm.positions[i];
    }
    if (values[i] < swarm.global_best_value) {
      swarm.global_best_value = values[i];
      swarm.global_best = swarm.positions[i];
    }
  }
  return true;
}

TrialRecord run_pso(const ObjectiveSpec& spec, const OptimumRecord& opt,
                    const PsoConfig& config, Rng& rng) {
  TrialRecord rec;
  Evaluator eval = make_trial_evaluator(spec, opt, config.eps, config.budget, rec);
  const int particles = config.particles.value_or(10 * spec.dimension);
  auto swarm = init_swarm(particles, spec.dimension, eval, rng);
  if (!swarm) return rec;
  swarm->inertia = config.inertia;
  swarm->cognitive = config.cognitive;
  swarm->social = config.social;

  double reference = swarm->global_best_value;
  int stale = 0;
  while (stale < config.stagnation_window) {
    if (!pso_step(*swarm, eval, rng)) return rec;
    ++rec.generations;
    if (swarm->global_best_value < reference - config.stagnation_tol) {
      reference = swarm->global_best_value;
      stale = 0;
    } else {
      ++stale;
    }
  }
  rec.outcome = Outcome::Local;
  return rec;
}

LocalResult local_minimize(Evaluator& eval, const Point& x0,
                           const NelderMeadConfig& config) {
  const std::size_t d = x0.size();
  LocalResult res;
  std::vector<Point> simplex;
  std::vector<double> f;
  auto call = [&](Point x, double& out) {
    project(x);
    const auto v = eval(x);
    ++res.evaluations;
    if (!v) {
      res.stopped = true;
      return false;
    }
    out = *v;
    return true;
  };

  Point start = x0;
  project(start);
  double f0 = 0.0;
  if (!call(start, f0)) {
    res.x = start;
    return res;
  }
  simplex.push_back(start);
  f.push_back(f0);
  for (std::size_t i = 0; i < d; ++i) {
    Point v = start;
    v[i] += v[i] + config.initial_step <= 1.0 ? config.initial_step
                                              : -config.initial_step;
    double fv = 0.0;
    if (!call(v, fv)) break;
    simplex.push_back(v);
    f.push_back(fv);
  }

  std::vector<std::size_t> order(simplex.size());
  auto best_so_far = [&] {
    const auto i = static_cast<std::size_t>(
        std::min_element(f.begin(), f.end()) - f.begin());
    res.x = simplex[i];
    project(res.x);
    res.value = f[i];
    return res;
  };
  if (res.stopped) return best_so_far();

  while (res.evaluations < config.max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double size = 0.0;
    for (const auto& v : simplex) {
      for (std::size_t k = 0; k < d; ++k) {
        size = std::max(size, std::abs(v[k] - simplex[best][k]));
      }
    }
    if (size <= config.xtol && f[worst] - f[best] <= config.ftol) {
      res.converged = true;
      break;
    }

    Point centroid(d, 0.0);
    for (std::size_t i : order) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(d);
    auto along = [&](double t) {
      Point p(d);
      for (std::size_t k = 0; k < d; ++k) {
        p[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
      }
      project(p);
      return p;
    };

    const Point xr = along(-1.0);
    double fr = 0.0;
    if (!call(xr, fr)) return best_so_far();
    if (fr < f[best]) {
      const Point xe = along(-2.0);
      double fe = 0.0;
      if (!call(xe, fe)) return best_so_far();
      if (fe < fr) {
        simplex[worst] = xe;
        f[worst] = fe;
      } else {
        simplex[worst] = xr;
        f[worst] = fr;
      }
      continue;
    }
    if (fr < f[second]) {
      simplex[worst] = xr;
      f[worst] = fr;
      continue;
    }
    const bool outside = fr < f[worst];
    const Point xc = along(outside ? -0.5 : 0.5);
    double fc = 0.0;
    if (!call(xc, fc)) return best_so_far();
    if (fc < (outside ? fr : f[worst])) {
      simplex[worst] = xc;
      f[worst] = fc;
      continue;
    }
    for (std::size_t i : order) {
      if (i == best) continue;
      for (std::size_t k = 0; k < d; ++k) {
        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      }
      if (!call(simplex[i], f[i])) return best_so_far();
    }
  }
  return best_so_far();
}

LocalResult local_minimize(const ObjectiveSpec& spec, const Point& x0,
                           const NelderMeadConfig& config) {
  Evaluator eval = [&spec](const Point& x) -> std::optional<double> {
    return spec.evaluate(x);
  };
  return local_minimize(eval, x0, config);
}

TrialRecord run_basinhopping(const ObjectiveSpec& spec,
                             const OptimumRecord& opt,
                             const BasinHoppingConfig& config, Rng& rng) {
  TrialRecord rec;
  Evaluator eval = make_trial_evaluator(spec, opt, config.eps, config.budget, rec);
  const auto d = static_cast<std::size_t>(spec.dimension);

  Point x(d);
  for (double& v : x) v = uniform01(rng);
  LocalResult cur = local_minimize(eval, x, config.local);
  if (cur.stopped) return rec;

  std::uniform_real_distribution<double> jump(-config.step, config.step);
  for (int hop = 0; hop < config.max_hops; ++hop) {
    Point y = cur.x;
    for (double& v : y) v = std::clamp(v + jump(rng), 0.0, 1.0);
    const LocalResult cand = local_minimize(eval, y, config.local);
    ++rec.generations;
    if (cand.stopped) return rec;
    const double delta = cand.value - cur.value;
    const bool accept =
        delta < 0.0 || uniform01(rng) < std::exp(-delta / config.temperature);
    if (config.on_hop) config.on_hop(hop, cand.value, cur.value, accept);
    if (accept) cur = cand;
  }
  rec.outcome = Outcome::Local;
  return rec;
}

}  // namespace quadsim::baselines
