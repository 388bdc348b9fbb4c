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

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "quadsim/estimator.hpp"

using namespace quadsim;
using namespace quadsim::estimate;

namespace {

TrialRecord synthetic(Outcome outcome, std::vector<IterationStat> its) {
  TrialRecord r;
  r.outcome = outcome;
  r.iterations = std::move(its);
  return r;
}

}  // namespace

TEST_CASE("optimal rotation count") {
  CHECK(n_opt(1.0) == 0.0);
  CHECK(n_opt(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  // acos(0.01) / (2 asin(0.01)) at 30 digits (mpmath).
  CHECK(n_opt(1e-4) == doctest::Approx(78.0385073057156821).epsilon(1e-13));
  CHECK_THROWS_AS(n_opt(0.0), std::invalid_argument);
  CHECK_THROWS_AS(n_opt(1.5), std::invalid_argument);
  CHECK_THROWS_AS(n_opt(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("optimal rotation count never exceeds the small-angle bound") {
  for (int i = 1; i < 2000; ++i) {
    const double p = std::pow(10.0, -7.0 * i / 2000.0);
    CHECK(n_opt(p) <= std::numbers::pi / (4.0 * std::sqrt(p)));
  }
}

TEST_CASE("series rejects invalid arguments") {
  CHECK_THROWS_AS(s_of_p(0.0), std::invalid_argument);
  CHECK_THROWS_AS(s_of_p(1.0), std::invalid_argument);
  SeriesOptions short_series;
  short_series.max_terms = 3;
  CHECK_THROWS_AS(s_of_p(1e-6, short_series), std::runtime_error);
}

TEST_CASE("series matches the Monte-Carlo acceptance process") {
  // Frozen from tests/oracles/aa_schedule_mc.py (10^5 runs each).
  SeriesOptions opt;
  opt.growth = 1.2;
  CHECK(std::abs(s_of_p(0.3, opt) - 0.766860) <= 2 * 0.001411);
  CHECK(std::abs(expected_total_rotations(0.3, opt) - 0.816530) <= 2 * 0.002307);
  CHECK(std::abs(s_of_p(1.0 / 256, opt) - 4.726900) <= 2 * 0.010031);
  CHECK(std::abs(expected_total_rotations(1.0 / 256, opt) - 15.912120) <=
        2 * 0.035982);
}

TEST_CASE("series terms are nonnegative and grow as p shrinks") {
  double prev = 0.0;
  for (double p : {0.5, 0.1, 1e-2, 1e-3, 1e-4}) {
    const double s = s_of_p(p);
    CHECK(s >= 0.0);
    CHECK(s > prev);
    CHECK(expected_total_rotations(p) >= s);
    prev = s;
  }
}

TEST_CASE("trial cost weights by accepted samples") {
  const std::vector<IterationStat> its{{0, 2, 4}, {1, 1, 1}, {2, 3, 300}};
  const double expected = 2 * n_opt(0.5) + 0 + 3 * n_opt(0.01);
  CHECK(trial_cost(its) == doctest::Approx(expected));
  CHECK(trial_cost(its, false) == doctest::Approx(n_opt(0.5) + n_opt(0.01)));
}

TEST_CASE("estimate of a single certain sample costs nothing") {
  const std::vector<TrialRecord> t{synthetic(Outcome::Global, {{0, 1, 1}})};
  const auto rep = estimate_lower_bound(t);
  CHECK(rep.p_global == 1.0);
  CHECK(rep.o_lower == 0.0);
  CHECK(rep.o_total == 0.0);
  CHECK_FALSE(rep.unbounded);
}

TEST_CASE("estimate composes outcome averages") {
  // n_opt(1/4) = (pi/3) / (pi/3) = 1, so costs are 100 and 50 exactly.
  const double p = 0.25;
  REQUIRE(n_opt(p) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<TrialRecord> t{synthetic(Outcome::Global, {{0, 100, 400}}),
                             synthetic(Outcome::Local, {{0, 50, 200}})};
  const auto rep = estimate_lower_bound(t);
  CHECK(rep.p_global == 0.5);
  CHECK(rep.o_global == doctest::Approx(100));
  CHECK(rep.o_local == doctest::Approx(50));
  CHECK(rep.o_single == doctest::Approx(75));
  CHECK(rep.o_lower == doctest::Approx(150));
  CHECK(rep.o_total == kTotalCoefficient * rep.o_lower);
}

TEST_CASE("estimate without a global trial is unbounded") {
  std::vector<TrialRecord> t{synthetic(Outcome::Local, {{0, 2, 8}}),
                             synthetic(Outcome::Budget, {{0, 1, 3}})};
  const auto rep = estimate_lower_bound(t);
  CHECK(rep.unbounded);
  CHECK(std::isinf(rep.o_lower));
  CHECK(std::isinf(rep.o_total));
  CHECK(to_json(rep)["o_lower"] == "inf");
}

TEST_CASE("doubling accepted and attempts doubles only the weighting") {
  Rng rng(5);
  std::uniform_int_distribution<std::uint64_t> m(1, 20), extra(0, 500);
  std::vector<TrialRecord> base, doubled;
  for (int i = 0; i < 50; ++i) {
    std::vector<IterationStat> a, b;
    for (int g = 0; g < 6; ++g) {
      const auto acc = m(rng);
      const auto att = acc + extra(rng);
      a.push_back({g, acc, att});
      b.push_back({g, 2 * acc, 2 * att});
    }
    const Outcome o = i % 3 == 0 ? Outcome::Local : Outcome::Global;
    base.push_back(synthetic(o, a));
    doubled.push_back(synthetic(o, b));
  }
  const auto r1 = estimate_lower_bound(base);
  const auto r2 = estimate_lower_bound(doubled);
  CHECK(r2.o_lower == doctest::Approx(2 * r1.o_lower).epsilon(1e-12));
  const auto u1 = estimate_lower_bound(base, false);
  const auto u2 = estimate_lower_bound(doubled, false);
  CHECK(u2.o_lower == doctest::Approx(u1.o_lower).epsilon(1e-12));
}

TEST_CASE("surrogate method names") {
  CHECK(method_from_string("gas") == Method::Gas);
  CHECK(to_string(Method::Quads) == "quads");
  CHECK_THROWS_AS(method_from_string("cmaes"), std::invalid_argument);
}

TEST_CASE("surrogate accepts every draw when the threshold is above the maximum") {
  // The first evaluation reports a value above every later one, so the first
  // threshold lies above the grid maximum.
  auto calls = std::make_shared<int>(0);
  register_objective("test_high_start", [calls](int d) {
    ObjectiveSpec s;
    s.name = "test_high_start";
    s.dimension = d;
    s.raw_lower.assign(static_cast<std::size_t>(d), 0.0);
    s.raw_upper.assign(static_cast<std::size_t>(d), 1.0);
    s.raw_fn = [calls](std::span<const double> x) {
      return (*calls)++ == 0 ? 1e9 : -x[0];
    };
    return s;
  });
  const auto spec = make_objective("test_high_start", 1);
  const Grid g(1, 4);
  const auto opt = locate_global_optimum(spec, g);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (Method m : {Method::Gas, Method::Quads}) {
      *calls = 0;
      Rng rng(seed);
      const auto rec = run_classical_surrogate(m, spec, opt, g, {}, rng);
      if (rec.best_value_trace.front().second != 1e9) continue;
      REQUIRE_FALSE(rec.iterations.empty());
      CHECK(rec.iterations.front().acceptance() == 1.0);
    }
  }
}

TEST_CASE("gas surrogate attempts follow the geometric law") {
  const auto spec = make_objective("wavy", 1);
  const Grid g(1, 8);
  const auto opt = locate_global_optimum(spec, g);
  std::vector<double> values(g.total_points());
  for (std::uint64_t i = 0; i < g.total_points(); ++i) values[i] = spec.evaluate(g.point(i));
  // E[K p] = 1 for the first round, with p the good fraction under the
  // initial threshold.
  double sum = 0.0, sum_sq = 0.0;
  int n = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const auto rec = run_classical_surrogate(Method::Gas, spec, opt, g, {}, rng);
    if (rec.iterations.empty()) continue;
    const double theta = rec.best_value_trace.front().second;
    double good = 0;
    for (double v : values) good += v < theta;
    const double kp = static_cast<double>(rec.iterations.front().attempts) *
                      good / static_cast<double>(g.total_points());
    sum += kp;
    sum_sq += kp * kp;
    ++n;
  }
  REQUIRE(n > 900);
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) <= 3 * se);
}

TEST_CASE("gas surrogate records one acceptance per generation") {
  const auto spec = make_objective("rastrigin", 2);
  const Grid g(2, 6);
  const auto opt = locate_global_optimum(spec, g);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto rec = run_classical_surrogate(Method::Gas, spec, opt, g, {}, rng);
    CHECK(rec.counter.quantum_calls == 0);
    REQUIRE(rec.estimated_quantum_cost.has_value());
    CHECK(*rec.estimated_quantum_cost == doctest::Approx(trial_cost(rec.iterations)));
    for (const auto& it : rec.iterations) {
      CHECK(it.accepted == 1);
      CHECK(it.attempts >= 1);
    }
  }
}

TEST_CASE("quads surrogate runs where statevectors do not fit") {
  const auto spec = make_objective("rastrigin", 5);
  const Grid g(5, 8);
  const auto opt = locate_optimum(spec, g);
  SurrogateConfig cfg;
  cfg.budget = 2'000'000;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto rec = run_classical_surrogate(Method::Quads, spec, opt, g, cfg, rng);
    CHECK(rec.counter.quantum_calls == 0);
    CHECK(rec.estimated_quantum_cost.has_value());
    for (const auto& it : rec.iterations) {
      CHECK(it.accepted >= 1);
      CHECK(it.accepted <= it.attempts);
    }
  }
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(60));
}

TEST_CASE("surrogate is deterministic per seed") {
  const auto spec = make_objective("ackley", 2);
  const Grid g(2, 6);
  const auto opt = locate_global_optimum(spec, g);
  Rng a(77), b(77);
  CHECK(to_json(run_classical_surrogate(Method::Quads, spec, opt, g, {}, a)).dump() ==
        to_json(run_classical_surrogate(Method::Quads, spec, opt, g, {}, b)).dump());
}
