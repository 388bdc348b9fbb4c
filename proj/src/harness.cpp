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

#include "quadsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "quadsim/baselines.hpp"
#include "quadsim/cma.hpp"
#include "quadsim/errors.hpp"
#include "quadsim/optimizers.hpp"
#include "quadsim/testbed.hpp"

namespace quadsim::harness {
namespace fs = std::filesystem;
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

// o_total of a resample given per-trial costs and global flags.
double total_of(const std::vector<double>& cost,
                const std::vector<char>& global,
                const std::vector<std::size_t>& pick) {
  double sum_g = 0.0;
  double sum_l = 0.0;
  std::size_t n_g = 0;
  for (std::size_t i : pick) {
    if (global[i]) {
      sum_g += cost[i];
      ++n_g;
    } else {
      sum_l += cost[i];
    }
  }
  if (n_g == 0) return kInf;
  const std::size_t n = pick.size();
  const double p = static_cast<double>(n_g) / static_cast<double>(n);
  const double o_g = sum_g / static_cast<double>(n_g);
  const double o_l =
      n_g == n ? 0.0 : sum_l / static_cast<double>(n - n_g);
  return (o_l * (1.0 - p) + o_g * p) / p;
}

std::string key_fingerprint(const ExperimentPlan& plan, const CellKey& key) {
  nlohmann::json j = to_json(plan);
  j.erase("methods");
  j.erase("functions");
  j.erase("dims");
  j.erase("threads");
  j.erase("output_dir");
  j.erase("bootstrap_resamples");
  j["cell"] = key.id();
  return j.dump();
}

std::optional<CellKey> parse_cell_id(const std::string& id) {
  CellKey k;
  const auto a = id.find("__");
  if (a == std::string::npos) return std::nullopt;
  const auto b = id.find("__", a + 2);
  if (b == std::string::npos) return std::nullopt;
  const auto c = id.find("__", b + 2);
  if (c == std::string::npos) return std::nullopt;
  k.method = id.substr(0, a);
  k.function = id.substr(a + 2, b - a - 2);
  const std::string d = id.substr(b + 2, c - b - 2);
  const std::string t = id.substr(c + 2);
  if (d.size() < 2 || d[0] != 'd' || t.size() < 2 || t[0] != 't') {
    return std::nullopt;
  }
  k.dim = std::stoi(d.substr(1));
  k.tau = std::stoi(t.substr(1));
  return k;
}

OptimumRecord cell_optimum(const ObjectiveSpec& spec, const Grid& grid,
                           std::uint64_t cap, bool statevector) {
  if (statevector && grid.indexable() && grid.total_points() <= cap) {
    const auto values = quantum::grid_values(spec, grid, cap);
    return optimum_from_values(*values, spec, grid);
  }
  return locate_optimum(spec, grid);
}

// Runs fn(i) for i in [0, n) on a small pool; rethrows the first error.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  std::size_t workers = threads > 0
                            ? static_cast<std::size_t>(threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

void finish_cell(CellResult& cell, int resamples, std::uint64_t seed) {
  cell.stats = aggregate(cell.records);
  Rng rng(mix64(seed ^ hash_string(cell.key.id())));
  cell.ci = bootstrap_ci(cell.records, rng, resamples);
  const bool estimated =
      !cell.records.empty() && cell.records.front().estimated_quantum_cost;
  if (estimated) cell.estimate = estimate::estimate_lower_bound(cell.records);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

RunStats aggregate(std::span<const TrialRecord> trials) {
  RunStats s;
  s.n_trials = trials.size();
  double sum_g = 0.0;
  double sum_l = 0.0;
  for (const auto& t : trials) {
    const auto c = static_cast<double>(t.cost());
    if (t.outcome == Outcome::Global) {
      ++s.n_global;
      sum_g += c;
    } else {
      if (t.outcome == Outcome::Budget) ++s.n_budget;
      sum_l += c;
    }
  }
  const std::size_t n_local = s.n_trials - s.n_global;
  s.o_global = s.n_global ? sum_g / static_cast<double>(s.n_global) : 0.0;
  s.o_local = n_local ? sum_l / static_cast<double>(n_local) : 0.0;
  s.p_global = s.n_trials ? static_cast<double>(s.n_global) /
                                static_cast<double>(s.n_trials)
                          : 0.0;
  s.o_single = s.o_local * (1.0 - s.p_global) + s.o_global * s.p_global;
  if (s.n_global == 0) {
    s.unbounded = true;
    s.o_total = kInf;
  } else {
    s.o_total = s.o_single / s.p_global;
  }
  return s;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of nothing");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) return values[lo];
  if (std::isinf(values[hi])) return values[hi];
  return values[lo] + frac * (values[hi] - values[lo]);
}

Interval bootstrap_ci(std::span<const TrialRecord> trials, Rng& rng,
                      int resamples, double lower, double upper) {
  if (trials.empty()) throw std::invalid_argument("bootstrap of no trials");
  if (resamples < 1) throw std::invalid_argument("resamples must be >= 1");
  const std::size_t n = trials.size();
  std::vector<double> cost(n);
  std::vector<char> global(n);
  for (std::size_t i = 0; i < n; ++i) {
    cost[i] = static_cast<double>(trials[i].cost());
    global[i] = trials[i].outcome == Outcome::Global;
  }
  std::uniform_int_distribution<std::size_t> pick_one(0, n - 1);
  std::vector<std::size_t> pick(n);
  std::vector<double> totals(static_cast<std::size_t>(resamples));
  for (auto& t : totals) {
    for (auto& p : pick) p = pick_one(rng);
    t = total_of(cost, global, pick);
  }
  Interval iv;
  iv.lo = percentile(totals, lower);
  iv.hi = percentile(std::move(totals), upper);
  iv.unbounded = std::isinf(iv.hi);
  return iv;
}

Regression scaling_regression(std::span<const std::pair<int, double>> points) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& [d, o] : points) {
    if (std::isfinite(o) && o > 0.0) {
      xy.emplace_back(static_cast<double>(d), std::log10(o));
    }
  }
  std::vector<double> distinct;
  for (const auto& p : xy) distinct.push_back(p.first);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    throw std::invalid_argument(
        "scaling regression needs two distinct dimensions with finite cost");
  }
  const auto n = static_cast<double>(xy.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  Regression r;
  r.points = xy.size();
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : xy) {
    const double e = y - (r.slope * x + r.intercept);
    ss_res += e * e;
  }
  r.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return r;
}

bool is_statevector_method(const std::string& method) {
  return method == "quads" || method == "gas";
}

void validate(const ExperimentPlan& plan) {
  if (plan.methods.empty()) throw PlanError("plan has no methods");
  if (plan.functions.empty()) throw PlanError("plan has no functions");
  if (plan.dims.empty()) throw PlanError("plan has no dimensions");
  const auto& known = known_methods();
  for (const auto& m : plan.methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw PlanError("unknown method: " + m);
    }
  }
  const auto names = objective_names();
  for (const auto& f : plan.functions) {
    if (std::find(names.begin(), names.end(), f) == names.end()) {
      throw PlanError("unknown function: " + f);
    }
  }
  for (int d : plan.dims) {
    if (d < 1) throw PlanError("dimension must be >= 1");
  }
  if (plan.tau < 1 || plan.tau > 31) throw PlanError("tau must be in 1..31");
  if (plan.trials < 1) throw PlanError("trials must be >= 1");
  if (plan.bootstrap_resamples < 1) throw PlanError("resamples must be >= 1");
  if (!(plan.growth > 1.0 && plan.growth < 4.0 / 3.0)) {
    throw PlanError("growth must lie in (1, 4/3)");
  }
  if (!(plan.alpha >= 0.0 && plan.alpha <= 1.0)) {
    throw PlanError("alpha must lie in [0, 1]");
  }
  if (!(plan.quantile >= 0.0 && plan.quantile <= 1.0)) {
    throw PlanError("quantile must lie in [0, 1]");
  }
  if (!(plan.eps > 0.0) || !(plan.eps_sigma > 0.0) || !(plan.sigma0 > 0.0)) {
    throw PlanError("eps, eps_sigma and sigma0 must be positive");
  }
}

nlohmann::json to_json(const ExperimentPlan& p) {
  return {{"methods", p.methods},
          {"functions", p.functions},
          {"dims", p.dims},
          {"tau", p.tau},
          {"trials", p.trials},
          {"seed", p.seed},
          {"budget", p.budget},
          {"surrogate_budget", p.surrogate_budget},
          {"amplitude_cap", p.amplitude_cap},
          {"estimator_fallback", p.estimator_fallback},
          {"threads", p.threads},
          {"bootstrap_resamples", p.bootstrap_resamples},
          {"output_dir", p.output_dir.string()},
          {"alpha", p.alpha},
          {"quantile", p.quantile},
          {"growth", p.growth},
          {"eps", p.eps},
          {"eps_sigma", p.eps_sigma},
          {"sigma0", p.sigma0}};
}

ExperimentPlan plan_from_json(const nlohmann::json& j, ExperimentPlan p) {
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("methods", p.methods);
  get("functions", p.functions);
  get("dims", p.dims);
  get("tau", p.tau);
  get("trials", p.trials);
  get("seed", p.seed);
  get("budget", p.budget);
  get("surrogate_budget", p.surrogate_budget);
  get("amplitude_cap", p.amplitude_cap);
  get("estimator_fallback", p.estimator_fallback);
  get("threads", p.threads);
  get("bootstrap_resamples", p.bootstrap_resamples);
  if (j.contains("output_dir")) {
    p.output_dir = j.at("output_dir").get<std::string>();
  }
  get("alpha", p.alpha);
  get("quantile", p.quantile);
  get("growth", p.growth);
  get("eps", p.eps);
  get("eps_sigma", p.eps_sigma);
  get("sigma0", p.sigma0);
  return p;
}

std::string CellKey::id() const {
  return method + "__" + function + "__d" + std::to_string(dim) + "__t" +
         std::to_string(tau);
}

TrialRecord run_trial(const ExperimentPlan& plan, const CellKey& key,
                      std::uint64_t trial_index) {
  const ObjectiveSpec spec = make_objective(key.function, key.dim);
  const Grid grid(key.dim, key.tau);
  const bool statevector = is_statevector_method(key.method);
  const std::uint64_t seed =
      trial_seed(plan.seed, key.method, key.function, key.dim, trial_index);
  Rng rng(seed);

  bool surrogate = false;
  if (statevector) {
    try {
      quantum::check_capacity(grid, plan.amplitude_cap);
    } catch (const CapacityError& e) {
      if (!plan.estimator_fallback) {
        throw InfeasibleCell(key.id() + ": " + e.what());
      }
      surrogate = true;
    }
  }
  const OptimumRecord opt =
      cell_optimum(spec, grid, plan.amplitude_cap, statevector && !surrogate);

  TrialRecord rec;
  if (surrogate) {
    estimate::SurrogateConfig c;
    c.alpha = plan.alpha;
    c.quantile = plan.quantile;
    c.eps = plan.eps;
    c.eps_sigma = plan.eps_sigma;
    c.sigma0 = plan.sigma0;
    c.budget = plan.surrogate_budget;
    c.tau = key.tau;
    rec = estimate::run_classical_surrogate(
        estimate::method_from_string(key.method), spec, opt, grid, c, rng);
  } else if (key.method == "quads") {
    QuadsConfig c;
    c.alpha = plan.alpha;
    c.quantile = plan.quantile;
    c.growth = plan.growth;
    c.eps = plan.eps;
    c.eps_sigma = plan.eps_sigma;
    c.sigma0 = plan.sigma0;
    c.budget = plan.budget;
    c.tau = key.tau;
    c.amplitude_cap = plan.amplitude_cap;
    rec = run_quads(spec, opt, grid, c, rng);
  } else if (key.method == "gas") {
    GasConfig c;
    c.growth = plan.growth;
    c.eps = plan.eps;
    c.budget = plan.budget;
    c.tau = key.tau;
    c.amplitude_cap = plan.amplitude_cap;
    rec = run_gas(spec, opt, grid, c, rng);
  } else if (key.method == "cmaes") {
    cma::CmaesConfig c;
    c.sigma0 = plan.sigma0;
    c.eps = plan.eps;
    c.eps_sigma = plan.eps_sigma;
    c.budget = plan.budget;
    rec = cma::run_cmaes(spec, opt, c, rng);
  } else if (key.method == "pso") {
    baselines::PsoConfig c;
    c.eps = plan.eps;
    c.budget = plan.budget;
    rec = baselines::run_pso(spec, opt, c, rng);
  } else if (key.method == "basinhopping") {
    baselines::BasinHoppingConfig c;
    c.eps = plan.eps;
    c.budget = plan.budget;
    rec = baselines::run_basinhopping(spec, opt, c, rng);
  } else {
    throw PlanError("unknown method: " + key.method);
  }
  rec.method = key.method;
  rec.function = key.function;
  rec.dim = key.dim;
  rec.tau = key.tau;
  rec.trial = trial_index;
  rec.seed = seed;
  return rec;
}

void write_jsonl(const fs::path& path, std::span<const TrialRecord> records) {
  std::string text;
  for (const auto& r : records) {
    text += to_json(r).dump();
    text += '\n';
  }
  write_text(path, text);
}

std::vector<TrialRecord> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<TrialRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(trial_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

ResultStore run_experiment(const ExperimentPlan& plan) {
  validate(plan);
  ResultStore store;
  store.dir = plan.output_dir;
  fs::create_directories(store.dir / "cells");
  const fs::path manifest_path = store.dir / "manifest.json";
  nlohmann::json manifest = nlohmann::json::object();
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    manifest = nlohmann::json::parse(in, nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object()) {
      manifest = nlohmann::json::object();
    }
  }

  // Reject infeasible cells before any work is done.
  if (!plan.estimator_fallback) {
    for (const auto& m : plan.methods) {
      if (!is_statevector_method(m)) continue;
      for (int d : plan.dims) {
        try {
          quantum::check_capacity(Grid(d, plan.tau), plan.amplitude_cap);
        } catch (const CapacityError& e) {
          throw InfeasibleCell(m + " at D=" + std::to_string(d) + ", tau=" +
                               std::to_string(plan.tau) + ": " + e.what());
        }
      }
    }
  }

  for (const auto& m : plan.methods) {
    for (const auto& f : plan.functions) {
      for (int d : plan.dims) {
        CellResult cell;
        cell.key = {m, f, d, plan.tau};
        const std::string id = cell.key.id();
        const fs::path file = store.dir / "cells" / (id + ".jsonl");
        const std::string fp = key_fingerprint(plan, cell.key);
        if (manifest.contains(id) && manifest[id].value("config", "") == fp &&
            fs::exists(file)) {
          cell.records = read_jsonl(file);
          cell.from_cache = true;
        } else {
          cell.records.resize(static_cast<std::size_t>(plan.trials));
          parallel_for(cell.records.size(), plan.threads, [&](std::size_t i) {
            cell.records[i] = run_trial(plan, cell.key, i);
          });
          write_jsonl(file, cell.records);
          manifest[id] = {{"config", fp},
                          {"file", "cells/" + id + ".jsonl"},
                          {"trials", plan.trials}};
          write_text(manifest_path, manifest.dump(2) + "\n");
        }
        finish_cell(cell, plan.bootstrap_resamples, plan.seed);
        store.cells.push_back(std::move(cell));
      }
    }
  }
  const auto rows = stats_rows(store);
  write_stats_csv(store.dir / "summary.csv", rows);
  return store;
}

ResultStore load_results(const fs::path& dir, int bootstrap_resamples,
                         std::uint64_t seed) {
  ResultStore store;
  store.dir = dir;
  const fs::path cells = dir / "cells";
  if (!fs::exists(cells)) return store;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cells)) {
    if (e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const auto key = parse_cell_id(path.stem().string());
    if (!key) continue;
    CellResult cell;
    cell.key = *key;
    cell.records = read_jsonl(path);
    cell.from_cache = true;
    if (cell.records.empty()) continue;
    finish_cell(cell, bootstrap_resamples, seed);
    store.cells.push_back(std::move(cell));
  }
  return store;
}

std::vector<StatsRow> stats_rows(const ResultStore& store) {
  std::vector<StatsRow> rows;
  for (const auto& c : store.cells) {
    StatsRow r;
    r.key = c.key;
    r.stats = c.stats;
    r.ci = c.ci;
    if (c.estimate) {
      r.estimated = true;
      r.o_lower = c.estimate->o_lower;
      r.o_total_est = c.estimate->o_total;
    }
    rows.push_back(r);
  }
  return rows;
}

namespace {

constexpr const char* kStatsHeader =
    "method,function,dim,tau,n_trials,n_global,n_budget,p_global,o_local,"
    "o_global,o_single,o_total,ci_lo,ci_hi,ci_unbounded,estimated,o_lower,"
    "o_total_est";

}  // namespace

void write_stats_csv(const fs::path& path, std::span<const StatsRow> rows) {
  std::string text = std::string(kStatsHeader) + "\n";
  for (const auto& r : rows) {
    const auto& s = r.stats;
    text += r.key.method + "," + r.key.function + "," +
            std::to_string(r.key.dim) + "," + std::to_string(r.key.tau) + "," +
            std::to_string(s.n_trials) + "," + std::to_string(s.n_global) +
            "," + std::to_string(s.n_budget) + "," + format_double(s.p_global) +
            "," + format_double(s.o_local) + "," + format_double(s.o_global) +
            "," + format_double(s.o_single) + "," + format_double(s.o_total) +
            "," + format_double(r.ci.lo) + "," + format_double(r.ci.hi) + "," +
            (r.ci.unbounded ? "1" : "0") + "," + (r.estimated ? "1" : "0") +
            "," + format_double(r.o_lower) + "," +
            format_double(r.o_total_est) + "\n";
  }
  write_text(path, text);
}

std::vector<StatsRow> read_stats_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kStatsHeader) throw std::runtime_error("unexpected CSV header");
  std::vector<StatsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 18) throw std::runtime_error("malformed CSV row");
    StatsRow r;
    r.key = {f[0], f[1], std::stoi(f[2]), std::stoi(f[3])};
    r.stats.n_trials = std::stoull(f[4]);
    r.stats.n_global = std::stoull(f[5]);
    r.stats.n_budget = std::stoull(f[6]);
    r.stats.p_global = parse_double(f[7]);
    r.stats.o_local = parse_double(f[8]);
    r.stats.o_global = parse_double(f[9]);
    r.stats.o_single = parse_double(f[10]);
    r.stats.o_total = parse_double(f[11]);
    r.stats.unbounded = std::isinf(r.stats.o_total);
    r.ci.lo = parse_double(f[12]);
    r.ci.hi = parse_double(f[13]);
    r.ci.unbounded = f[14] == "1";
    r.estimated = f[15] == "1";
    r.o_lower = parse_double(f[16]);
    r.o_total_est = parse_double(f[17]);
    rows.push_back(r);
  }
  return rows;
}

namespace {

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Bar chart of log10(o_total) with 5-95% whiskers.
std::string bar_chart(std::span<const StatsRow> rows) {
  const double width = 80.0 + 60.0 * static_cast<double>(rows.size());
  const double height = 360.0;
  const double top = 20.0;
  const double bottom = 280.0;
  double ymax = 1.0;
  for (const auto& r : rows) {
    for (double v : {r.stats.o_total, r.ci.hi, r.o_total_est}) {
      if (std::isfinite(v) && v > 1.0) ymax = std::max(ymax, std::log10(v));
    }
  }
  ymax = std::ceil(ymax);
  auto y_of = [&](double v) {
    const double l = v > 1.0 ? std::log10(v) : 0.0;
    return bottom - (bottom - top) * l / ymax;
  };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
    << "\" height=\"" << height << "\" font-family=\"sans-serif\" "
    << "font-size=\"10\">\n";
  s << "<line x1=\"60\" y1=\"" << top << "\" x2=\"60\" y2=\"" << bottom
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= static_cast<int>(ymax); ++k) {
    const double y = y_of(std::pow(10.0, k));
    s << "<text x=\"55\" y=\"" << y + 3 << "\" text-anchor=\"end\">1e" << k
      << "</text>\n";
  }
  double x = 70.0;
  for (const auto& r : rows) {
    const double v = r.estimated ? r.o_total_est : r.stats.o_total;
    if (std::isfinite(v)) {
      const double y = y_of(v);
      s << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << y
        << "\" width=\"40\" height=\"" << bottom - y << "\" fill=\""
        << (r.estimated ? "#bbbbbb" : "#4477aa") << "\"/>\n";
    }
    if (!r.estimated && std::isfinite(r.ci.lo)) {
      const double ylo = y_of(r.ci.lo);
      const double yhi = r.ci.unbounded ? top : y_of(r.ci.hi);
      s << "<line class=\"whisker\" x1=\"" << x + 20 << "\" y1=\"" << ylo
        << "\" x2=\"" << x + 20 << "\" y2=\"" << yhi
        << "\" stroke=\"black\"/>\n";
    }
    s << "<text x=\"" << x + 20 << "\" y=\"" << bottom + 12
      << "\" text-anchor=\"end\" transform=\"rotate(-60 " << x + 20 << " "
      << bottom + 12 << ")\">"
      << svg_escape(r.key.method + " " + r.key.function + " D=" +
                    std::to_string(r.key.dim))
      << "</text>\n";
    x += 60.0;
  }
  s << "</svg>\n";
  return s.str();
}

// One polyline per (method, function) of log10(o_total) against D.
std::string scaling_chart(
    const std::map<std::pair<std::string, std::string>,
                   std::vector<std::pair<int, double>>>& series) {
  int dmax = 1;
  double ymax = 1.0;
  for (const auto& [k, pts] : series) {
    for (const auto& [d, v] : pts) {
      dmax = std::max(dmax, d);
      if (std::isfinite(v) && v > 1.0) ymax = std::max(ymax, std::log10(v));
    }
  }
  ymax = std::ceil(ymax);
  const double left = 60.0;
  const double right = 460.0;
  const double top = 20.0;
  const double bottom = 280.0;
  auto x_of = [&](int d) {
    return left + (right - left) * (d - 1) / std::max(1, dmax - 1);
  };
  auto y_of = [&](double v) {
    return bottom - (bottom - top) * std::log10(std::max(v, 1.0)) / ymax;
  };
  static const char* colors[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                                 "#66ccee", "#aa3377", "#bbbbbb"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" "
       "height=\"320\" font-family=\"sans-serif\" font-size=\"10\">\n";
  s << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
    << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
    << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  for (int d = 1; d <= dmax; ++d) {
    s << "<text x=\"" << x_of(d) << "\" y=\"" << bottom + 12
      << "\" text-anchor=\"middle\">" << d << "</text>\n";
  }
  std::size_t i = 0;
  for (const auto& [k, pts] : series) {
    const char* color = colors[i % 7];
    std::string path;
    for (const auto& [d, v] : pts) {
      if (!std::isfinite(v)) continue;
      path += std::to_string(x_of(d)) + "," + std::to_string(y_of(v)) + " ";
    }
    s << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color
      << "\" points=\"" << path << "\"/>\n";
    s << "<text x=\"" << right + 10 << "\" y=\"" << top + 12.0 * i
      << "\" fill=\"" << color << "\">"
      << svg_escape(k.first + " " + k.second) << "</text>\n";
    ++i;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

void emit_reports(const ResultStore& store, const fs::path& out) {
  fs::create_directories(out);
  const auto rows = stats_rows(store);
  write_stats_csv(out / "stats.csv", rows);

  for (const auto& c : store.cells) {
    const std::string id = c.key.id();
    std::string trace = "trial,calls,best_value\n";
    std::vector<double> solved_at;
    for (const auto& r : c.records) {
      for (const auto& [calls, v] : r.best_value_trace) {
        trace += std::to_string(r.trial) + "," + std::to_string(calls) + "," +
                 format_double(v) + "\n";
      }
      if (r.outcome == Outcome::Global) {
        solved_at.push_back(static_cast<double>(r.cost()));
      }
    }
    write_text(out / "traces" / (id + ".csv"), trace);

    std::sort(solved_at.begin(), solved_at.end());
    std::string frac = "calls,fraction_solved\n";
    const auto n = static_cast<double>(c.records.size());
    for (std::size_t i = 0; i < solved_at.size(); ++i) {
      if (i + 1 < solved_at.size() && solved_at[i + 1] == solved_at[i]) {
        continue;
      }
      frac += format_double(solved_at[i]) + "," +
              format_double(static_cast<double>(i + 1) / n) + "\n";
    }
    write_text(out / "fraction_solved" / (id + ".csv"), frac);
  }

  std::map<std::pair<std::string, std::string>,
           std::vector<std::pair<int, double>>>
      series;
  std::string scaling = "method,function,dim,tau,o_total,estimated\n";
  for (const auto& r : rows) {
    const double v = r.estimated ? r.o_total_est : r.stats.o_total;
    series[{r.key.method, r.key.function}].emplace_back(r.key.dim, v);
    scaling += r.key.method + "," + r.key.function + "," +
               std::to_string(r.key.dim) + "," + std::to_string(r.key.tau) +
               "," + format_double(v) + "," + (r.estimated ? "1" : "0") + "\n";
  }
  write_text(out / "scaling.csv", scaling);

  std::string reg = "method,function,slope,intercept,r2,points\n";
  for (auto& [k, pts] : series) {
    std::sort(pts.begin(), pts.end());
    try {
      const Regression r = scaling_regression(pts);
      reg += k.first + "," + k.second + "," + format_double(r.slope) + "," +
             format_double(r.intercept) + "," + format_double(r.r2) + "," +
             std::to_string(r.points) + "\n";
    } catch (const std::invalid_argument&) {
      // fewer than two finite dimensions: no fit
    }
  }
  write_text(out / "regression.csv", reg);

  write_text(out / "oracle_calls.svg", bar_chart(rows));
  write_text(out / "scaling.svg", scaling_chart(series));
}

Calibration calibrate(const ExperimentPlan& plan, const CellKey& key) {
  if (!is_statevector_method(key.method)) {
    throw PlanError("calibration needs a statevector method");
  }
  Calibration cal;
  cal.key = key;
  const ObjectiveSpec spec = make_objective(key.function, key.dim);
  const Grid grid(key.dim, key.tau);
  try {
    quantum::check_capacity(grid, plan.amplitude_cap);
  } catch (const CapacityError& e) {
    throw InfeasibleCell(key.id() + ": " + e.what());
  }
  const OptimumRecord opt = cell_optimum(spec, grid, plan.amplitude_cap, true);

  const auto n = static_cast<std::size_t>(plan.trials);
  std::vector<TrialRecord> sim(n);
  std::vector<TrialRecord> est(n);
  ExperimentPlan p = plan;
  p.estimator_fallback = false;
  parallel_for(n, plan.threads, [&](std::size_t i) {
    sim[i] = run_trial(p, key, i);
  });

  estimate::SurrogateConfig c;
  c.alpha = plan.alpha;
  c.quantile = plan.quantile;
  c.eps = plan.eps;
  c.eps_sigma = plan.eps_sigma;
  c.sigma0 = plan.sigma0;
  c.budget = plan.surrogate_budget;
  c.tau = key.tau;
  const auto method = estimate::method_from_string(key.method);
  parallel_for(n, plan.threads, [&](std::size_t i) {
    const std::uint64_t seed = trial_seed(plan.seed, key.method + "/surrogate",
                                          key.function, key.dim, i);
    Rng rng(seed);
    est[i] = estimate::run_classical_surrogate(method, spec, opt, grid, c, rng);
    est[i].method = key.method;
    est[i].function = key.function;
    est[i].dim = key.dim;
    est[i].trial = i;
    est[i].seed = seed;
  });

  cal.simulated = aggregate(sim);
  Rng rng(mix64(plan.seed ^ hash_string(key.id())));
  cal.simulated_ci = bootstrap_ci(sim, rng, plan.bootstrap_resamples);
  cal.estimated = estimate::estimate_lower_bound(est);
  cal.ratio = cal.simulated.o_total / cal.estimated.o_lower;
  return cal;
}

}  // namespace quadsim::harness
