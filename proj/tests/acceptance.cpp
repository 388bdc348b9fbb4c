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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadsim/cma.hpp"
#include "quadsim/estimator.hpp"
#include "quadsim/harness.hpp"
#include "quadsim/optimizers.hpp"
#include "quadsim/quantum.hpp"

#ifndef QUADSIM_CLI_PATH
#define QUADSIM_CLI_PATH "quadsim"
#endif

using namespace quadsim;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() /
                     ("quadsim_accept_" + tag + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Success probability after r rotations from a uniform state.
Verdict grover_law() {
  double worst = 0.0;
  std::size_t cases = 0;
  std::mt19937_64 rng(1);
  for (int bits = 1; bits <= 12; ++bits) {
    const Grid grid(1, bits);
    const auto psi0 = quantum::prepare_uniform_state(grid);
    const std::uint64_t n = grid.total_points();
    for (std::uint64_t good = 1; good <= n / 2; good *= 2) {
      std::vector<double> f(n, 1.0);
      std::vector<std::uint64_t> idx(n);
      for (std::uint64_t i = 0; i < n; ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::uint64_t i = 0; i < good; ++i) f[idx[i]] = 0.0;
      const double angle = std::asin(std::sqrt(static_cast<double>(good) / n));
      for (std::uint64_t r = 0; r <= 10; ++r) {
        const auto s = quantum::grover_power(psi0, f, 0.5, r);
        const double expect = std::pow(std::sin((2.0 * r + 1.0) * angle), 2);
        worst = std::max(worst, std::abs(quantum::good_probability(s, f, 0.5) - expect));
        ++cases;
      }
    }
  }
  return {worst <= 1e-10, fmt("%zu cases, max deviation %.3g", cases, worst)};
}

Verdict series_ratio() {
  estimate::SeriesOptions opt;
  opt.growth = 1.25;
  bool ok = true;
  std::string detail;
  for (double p : {1e-6, 1e-5, 1e-4, 1e-3}) {
    const double ratio = estimate::s_of_p(p, opt) / estimate::n_opt(p);
    ok = ok && ratio >= 2.1 && ratio <= 2.5;
    detail += fmt("p=%g ratio=%.4f; ", p, ratio);
  }
  return {ok, detail + "band [2.1, 2.5]"};
}

Verdict lower_bound() {
  harness::ExperimentPlan plan;
  plan.tau = 6;
  plan.trials = 100;
  plan.seed = 0;
  bool ok = true;
  std::string detail;
  for (const std::string method : {"gas", "quads"}) {
    int inside = 0;
    for (const std::string fn : {"rastrigin", "ackley", "wavy"}) {
      const auto cal = harness::calibrate(plan, {method, fn, 2, 6});
      const double lower = cal.estimated.o_lower;
      const double total = cal.simulated.o_total;
      const double est = cal.estimated.o_total;
      ok = ok && lower <= total;
      const bool in_ci = est >= cal.simulated_ci.lo && est <= cal.simulated_ci.hi;
      inside += in_ci;
      detail += fmt("%s/%s lower=%.1f total=%.1f est=%.1f ci=[%.1f, %.1f]%s; ",
                    method.c_str(), fn.c_str(), lower, total, est,
                    cal.simulated_ci.lo, cal.simulated_ci.hi, in_ci ? " in" : "");
    }
    ok = ok && inside >= 2;
  }
  return {ok, detail};
}

Verdict method_ordering() {
  harness::ExperimentPlan plan;
  plan.methods = {"quads", "gas", "cmaes"};
  plan.functions = {"rastrigin", "schwefel"};
  plan.dims = {2};
  plan.tau = 6;
  plan.trials = 100;
  plan.seed = 0;
  plan.bootstrap_resamples = 200;
  plan.output_dir = scratch("ordering");
  const auto store = harness::run_experiment(plan);
  fs::remove_all(plan.output_dir);
  auto find = [&](const std::string& m, const std::string& f) {
    for (const auto& c : store.cells) {
      if (c.key.method == m && c.key.function == f) return c.stats;
    }
    throw std::runtime_error("missing cell");
  };
  bool ok = true;
  std::string detail;
  for (const std::string fn : {"rastrigin", "schwefel"}) {
    const auto q = find("quads", fn), g = find("gas", fn), c = find("cmaes", fn);
    ok = ok && q.o_total < g.o_total && q.p_global >= c.p_global;
    detail += fmt("%s o_total quads=%.1f gas=%.1f, p_global quads=%.2f cmaes=%.2f; ",
                  fn.c_str(), q.o_total, g.o_total, q.p_global, c.p_global);
  }
  return {ok, detail};
}

Verdict gas_completeness() {
  const auto spec = make_objective("wavy", 1);
  const Grid grid(1, 8);
  const auto opt = locate_optimum(spec, grid);
  GasConfig cfg;
  cfg.budget = 1'000'000;
  int global = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(trial_seed(0, "gas", "wavy", 1, t));
    global += run_gas(spec, opt, grid, cfg, rng).outcome == Outcome::Global;
  }
  return {global == 100, fmt("%d/100 global", global)};
}

Verdict cma_golden() {
  // tests/oracles/cma_step.py, case A.
  cma::DistributionState s = cma::DistributionState::initial(std::vector{0.4, 0.6}, 0.3);
  s.shape << 1.2, 0.3, 0.3, 0.8;
  s.path_c << 0.1, -0.2;
  s.path_sigma << 0.05, 0.15;
  s.generation = 3;
  const std::vector<Point> x{{0.5, 0.55}, {0.3, 0.7}};
  const auto n = cma::cma_update(s, x, cma::default_hyperparams(2, 2));
  const double got[] = {n.mean[0],      n.mean[1],       n.shape(0, 0),
                        n.shape(0, 1),  n.shape(1, 0),   n.shape(1, 1),
                        n.sigma,        n.path_c[0],     n.path_c[1],
                        n.path_sigma[0], n.path_sigma[1]};
  const double want[] = {0.46083257198654590105, 0.57937557101009057421,
                         0.99893928868396834389, 0.23888879257631952199,
                         0.23888879257631952199, 0.66157115840888415719,
                         0.23659424009710865191, 0.26459730634595063534,
                         -0.15049064145091776080, 0.22724351284712355084,
                         -0.021598418174010412193};
  double worst = 0.0;
  for (std::size_t i = 0; i < std::size(got); ++i) {
    worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  const bool ok = worst <= 1e-12 && n.generation == 4;
  return {ok, fmt("max field error %.3g", worst)};
}

Verdict normalization() {
  const Grid grid(2, 5);
  const auto spec = make_objective("rastrigin", 2);
  const auto values = quantum::grid_values(spec, grid);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lo = *std::min_element(values->begin(), values->end());
  const double hi = *std::max_element(values->begin(), values->end());
  double worst = 0.0;
  bool finite = true;
  for (int c = 0; c < 1000; ++c) {
    Eigen::MatrixXd a(2, 2);
    a << u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5;
    const double scale = std::pow(10.0, -3.0 + 3.0 * u(rng));
    const Eigen::MatrixXd cov =
        scale * (a * a.transpose() + 1e-3 * Eigen::MatrixXd::Identity(2, 2));
    const auto psi0 = quantum::prepare_gaussian_state(grid, std::vector{u(rng), u(rng)}, cov);
    const double theta = lo + (hi - lo) * u(rng);
    const auto r = static_cast<std::uint64_t>(u(rng) * 64);
    const auto s = quantum::grover_power(psi0, *values, theta, r);
    worst = std::max(worst, std::abs(psi0.norm() - 1.0));
    worst = std::max(worst, std::abs(s.norm() - 1.0));
    finite = finite && s.all_finite() && psi0.all_finite();
  }
  return {finite && worst <= 1e-9,
          fmt("max |norm - 1| %.3g, finite %s", worst, finite ? "yes" : "no")};
}

Verdict metric_arithmetic() {
  auto rec = [](Outcome o, std::uint64_t cost) {
    TrialRecord r;
    r.outcome = o;
    r.counter.classical_evals = cost;
    return r;
  };
  bool ok = true;
  {
    const std::vector<TrialRecord> t{rec(Outcome::Local, 100), rec(Outcome::Global, 200)};
    const auto s = harness::aggregate(t);
    ok = ok && s.p_global == 0.5 && s.o_single == 150.0 && s.o_total == 300.0;
  }
  {
    // p = 1/4: o_single = 3/4 * 40 + 1/4 * 80 = 50, o_total = 200.
    const std::vector<TrialRecord> t{rec(Outcome::Local, 20), rec(Outcome::Budget, 60),
                                     rec(Outcome::Local, 40), rec(Outcome::Global, 80)};
    const auto s = harness::aggregate(t);
    ok = ok && s.p_global == 0.25 && s.o_local == 40.0 && s.o_single == 50.0 &&
         s.o_total == 200.0;
  }
  {
    const std::vector<TrialRecord> t(4, rec(Outcome::Global, 64));
    const auto s = harness::aggregate(t);
    ok = ok && s.p_global == 1.0 && s.o_single == 64.0 && s.o_total == 64.0 && !s.unbounded;
  }
  {
    const std::vector<TrialRecord> t{rec(Outcome::Local, 3), rec(Outcome::Budget, 5)};
    const auto s = harness::aggregate(t);
    ok = ok && s.p_global == 0.0 && s.unbounded && std::isinf(s.o_total);
  }
  return {ok, "four synthetic sets"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict cli_determinism() {
  const fs::path root = scratch("determinism");
  auto run = [&](const std::string& sub) {
    const std::string cmd = std::string("\"") + QUADSIM_CLI_PATH +
                            "\" run --method quads gas pso --function wavy rastrigin"
                            " --dim 1 2 --tau 6 --trials 8 --seed 42 --resamples 100"
                            " --out \"" + (root / sub).string() + "\" > /dev/null";
    return std::system(cmd.c_str());
  };
  if (run("a") != 0 || run("b") != 0) {
    fs::remove_all(root);
    return {false, "cli run failed"};
  }
  std::size_t files = 0;
  bool same = true;
  for (const auto& e : fs::directory_iterator(root / "a" / "cells")) {
    const fs::path other = root / "b" / "cells" / e.path().filename();
    same = same && fs::exists(other) && slurp(e.path()) == slurp(other);
    ++files;
  }
  fs::remove_all(root);
  return {same && files == 12, fmt("%zu cell files compared", files)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no limit
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "grover law", 10, grover_law},
      {2, "series ratio", 5, series_ratio},
      {3, "estimator lower bound", 15 * 60, lower_bound},
      {4, "method ordering", 20 * 60, method_ordering},
      {5, "gas completeness", 120, gas_completeness},
      {6, "cma step oracle", 0, cma_golden},
      {7, "normalization", 0, normalization},
      {8, "metric arithmetic", 0, metric_arithmetic},
      {9, "determinism", 0, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_s == 0 || secs < c.limit_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("criterion %d %-22s %s  (%.1fs%s) %s\n", c.id, c.name,
                pass ? "PASS" : "FAIL", secs, in_time ? "" : ", over time limit",
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
