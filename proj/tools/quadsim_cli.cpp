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

// quadsim command-line driver.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid plan or arguments,
// 3 infeasible cell.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "quadsim/estimator.hpp"
#include "quadsim/harness.hpp"
#include "quadsim/testbed.hpp"

namespace {

using quadsim::harness::ExperimentPlan;
using nlohmann::json;

constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;

// Flag values; only options given on the command line override the config.
struct Flags {
  std::string config;
  std::vector<std::string> methods;
  std::vector<std::string> functions;
  std::vector<int> dims;
  int tau = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  std::uint64_t surrogate_budget = 0;
  std::uint64_t amplitude_cap = 0;
  bool fallback = false;
  int threads = 0;
  int resamples = 0;
  std::string output_dir;
  double alpha = 0, quantile = 0, growth = 0, eps = 0, eps_sigma = 0,
         sigma0 = 0;
};

struct Bound {
  CLI::Option* option;
  const char* key;
  std::function<json()> value;
};

std::vector<Bound> add_plan_options(CLI::App* app, Flags& f) {
  std::vector<Bound> b;
  app->add_option("--config", f.config, "JSON plan; flags override it");
  b.push_back({app->add_option("--method", f.methods,
                               "quads|gas|cmaes|pso|basinhopping"),
               "methods", [&f] { return json(f.methods); }});
  b.push_back({app->add_option("--function", f.functions, "objective name"),
               "functions", [&f] { return json(f.functions); }});
  b.push_back({app->add_option("--dim", f.dims, "dimension D"), "dims",
               [&f] { return json(f.dims); }});
  b.push_back({app->add_option("--tau", f.tau, "bits per axis"), "tau",
               [&f] { return json(f.tau); }});
  b.push_back({app->add_option("--trials", f.trials, "trials per cell"),
               "trials", [&f] { return json(f.trials); }});
  b.push_back({app->add_option("--seed", f.seed, "master seed"), "seed",
               [&f] { return json(f.seed); }});
  b.push_back({app->add_option("--budget", f.budget,
                               "per-trial oracle-call budget"),
               "budget", [&f] { return json(f.budget); }});
  b.push_back({app->add_option("--surrogate-budget", f.surrogate_budget,
                               "classical surrogate evaluation budget"),
               "surrogate_budget", [&f] { return json(f.surrogate_budget); }});
  b.push_back({app->add_option("--amplitude-cap", f.amplitude_cap,
                               "largest simulated statevector"),
               "amplitude_cap", [&f] { return json(f.amplitude_cap); }});
  b.push_back({app->add_flag("--estimator-fallback", f.fallback,
                             "route oversized cells to the surrogate"),
               "estimator_fallback", [&f] { return json(f.fallback); }});
  b.push_back({app->add_option("--threads", f.threads, "worker threads"),
               "threads", [&f] { return json(f.threads); }});
  b.push_back({app->add_option("--resamples", f.resamples,
                               "bootstrap resamples"),
               "bootstrap_resamples", [&f] { return json(f.resamples); }});
  b.push_back({app->add_option("--out", f.output_dir, "output directory"),
               "output_dir", [&f] { return json(f.output_dir); }});
  b.push_back({app->add_option("--alpha", f.alpha, "threshold smoothing"),
               "alpha", [&f] { return json(f.alpha); }});
  b.push_back({app->add_option("--quantile", f.quantile, "threshold quantile"),
               "quantile", [&f] { return json(f.quantile); }});
  b.push_back({app->add_option("--growth", f.growth, "schedule factor"),
               "growth", [&f] { return json(f.growth); }});
  b.push_back({app->add_option("--eps", f.eps, "global-hit radius"), "eps",
               [&f] { return json(f.eps); }});
  b.push_back({app->add_option("--eps-sigma", f.eps_sigma,
                               "local-convergence step size"),
               "eps_sigma", [&f] { return json(f.eps_sigma); }});
  b.push_back({app->add_option("--sigma0", f.sigma0, "initial step size"),
               "sigma0", [&f] { return json(f.sigma0); }});
  return b;
}

ExperimentPlan build_plan(const Flags& f, const std::vector<Bound>& bound) {
  json j = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw quadsim::harness::PlanError("cannot read " + f.config);
    j = json::parse(in, nullptr);
    if (j.is_discarded() || !j.is_object()) {
      throw quadsim::harness::PlanError("config is not a JSON object");
    }
  }
  for (const auto& b : bound) {
    if (b.option->count() > 0) j[b.key] = b.value();
  }
  try {
    return quadsim::harness::plan_from_json(j);
  } catch (const json::exception& e) {
    throw quadsim::harness::PlanError(std::string("config: ") + e.what());
  }
}

json stats_json(const quadsim::harness::RunStats& s,
                const quadsim::harness::Interval& ci) {
  auto num = [](double v) -> json {
    return std::isfinite(v) ? json(v) : json("inf");
  };
  return {{"n_trials", s.n_trials}, {"n_global", s.n_global},
          {"n_budget", s.n_budget}, {"p_global", s.p_global},
          {"o_local", s.o_local},   {"o_global", s.o_global},
          {"o_single", s.o_single}, {"o_total", num(s.o_total)},
          {"ci_lo", num(ci.lo)},    {"ci_hi", num(ci.hi)},
          {"ci_unbounded", ci.unbounded}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amplitude-amplification optimizer simulator"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "run an experiment plan");
  const auto run_bound = add_plan_options(run, run_flags);

  Flags est_flags;
  auto* est = app.add_subcommand(
      "estimate", "classical surrogate lower bound and 2.3x point estimate");
  const auto est_bound = add_plan_options(est, est_flags);

  Flags cal_flags;
  auto* cal = app.add_subcommand(
      "calibrate", "paired statevector and surrogate runs per cell");
  const auto cal_bound = add_plan_options(cal, cal_flags);

  std::string report_in;
  std::string report_out;
  auto* rep = app.add_subcommand("report", "emit CSV and SVG reports");
  rep->add_option("--in", report_in, "result directory")->required();
  rep->add_option("--out", report_out, "report directory (default <in>/report)");

  auto* list = app.add_subcommand("list-functions", "list objectives");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*list) {
      for (const auto& name : quadsim::objective_names()) {
        std::cout << quadsim::describe(quadsim::make_objective(name, 1)).dump()
                  << "\n";
      }
      return 0;
    }
    if (*rep) {
      const auto store = quadsim::harness::load_results(report_in);
      const std::filesystem::path out =
          report_out.empty() ? std::filesystem::path(report_in) / "report"
                             : std::filesystem::path(report_out);
      quadsim::harness::emit_reports(store, out);
      std::cout << "wrote reports for " << store.cells.size() << " cells to "
                << out.string() << "\n";
      return 0;
    }
    if (*run) {
      const auto plan = build_plan(run_flags, run_bound);
      const auto store = quadsim::harness::run_experiment(plan);
      for (const auto& c : store.cells) {
        json line = stats_json(c.stats, c.ci);
        line["cell"] = c.key.id();
        line["cached"] = c.from_cache;
        if (c.estimate) line["estimate"] = quadsim::estimate::to_json(*c.estimate);
        std::cout << line.dump() << "\n";
      }
      return 0;
    }
    if (*est) {
      auto plan = build_plan(est_flags, est_bound);
      plan.estimator_fallback = true;
      plan.amplitude_cap = 0;  // force the surrogate
      if (plan.methods.empty()) plan.methods = {"quads"};
      for (const auto& m : plan.methods) {
        if (!quadsim::harness::is_statevector_method(m)) {
          throw quadsim::harness::PlanError("estimate supports quads and gas");
        }
      }
      const auto store = quadsim::harness::run_experiment(plan);
      for (const auto& c : store.cells) {
        json line = quadsim::estimate::to_json(*c.estimate);
        line["cell"] = c.key.id();
        std::cout << line.dump() << "\n";
      }
      return 0;
    }
    if (*cal) {
      auto plan = build_plan(cal_flags, cal_bound);
      if (plan.methods.empty()) plan.methods = {"quads", "gas"};
      quadsim::harness::validate(plan);
      for (const auto& m : plan.methods) {
        for (const auto& f : plan.functions) {
          for (int d : plan.dims) {
            const auto c = quadsim::harness::calibrate(plan, {m, f, d, plan.tau});
            json line = stats_json(c.simulated, c.simulated_ci);
            line["cell"] = c.key.id();
            line["estimate"] = quadsim::estimate::to_json(c.estimated);
            line["ratio"] = std::isfinite(c.ratio) ? json(c.ratio) : json("inf");
            std::cout << line.dump() << "\n";
          }
        }
      }
      return 0;
    }
  } catch (const quadsim::harness::PlanError& e) {
    std::cerr << "invalid plan: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const quadsim::harness::InfeasibleCell& e) {
    std::cerr << "infeasible cell: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
