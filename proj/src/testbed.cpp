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

#include "quadsim/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "quadsim/errors.hpp"

namespace quadsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Raw-coordinate formulas. These follow the benchmark table literally,
// including the variants without the usual textbook offsets.

double rastrigin(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v - 10.0 * std::cos(kTwoPi * v);
  return s;
}

double ackley(std::span<const double> x) {
  const double d = static_cast<double>(x.size());
  double sq = 0.0;
  double cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(kTwoPi * v);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d);
}

double styblinski_tang(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v * v * v - 16.0 * v * v + 5.0 * v;
  return 0.5 * s;
}

double schwefel(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * std::sin(std::sqrt(std::abs(v)));
  return s;
}

// cos(sqrt(x)) is evaluated as cos(sqrt(|x|)) so the domain's negative half
// stays real.
double griewank(std::span<const double> x) {
  double sq = 0.0;
  double prod = 1.0;
  for (double v : x) {
    sq += v * v;
    prod *= std::cos(std::sqrt(std::abs(v)));
  }
  return sq / 4000.0 - prod;
}

double alpine01(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v * std::sin(v) + 0.1 * v);
  return s;
}

double alpine02(std::span<const double> x) {
  double prod = 1.0;
  for (double v : x) prod *= std::sqrt(v) * std::sin(v);
  return -prod;
}

double deflected_corrugated_spring(std::span<const double> x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double c = std::cos(5.0 * std::sqrt(r2));
  double s = 0.0;
  for (double v : x) s += v * v - c;
  return 0.1 * s;
}

double wavy(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::cos(10.0 * v) * std::exp(-v * v / 2.0);
  return -s;
}

ObjectiveSpec box(std::string name, int d, double lo, double hi,
                  double (*fn)(std::span<const double>),
                  std::function<double(double)> score) {
  ObjectiveSpec spec;
  spec.name = std::move(name);
  spec.dimension = d;
  spec.raw_lower.assign(static_cast<std::size_t>(d), lo);
  spec.raw_upper.assign(static_cast<std::size_t>(d), hi);
  spec.raw_fn = fn;
  spec.coordinate_score = std::move(score);
  return spec;
}

struct Registry {
  std::mutex mu;
  std::vector<std::pair<std::string, ObjectiveFactory>> entries;
};

Registry& registry() {
  static Registry* r = [] {
    auto* reg = new Registry;
    auto add = [reg](std::string name, double lo, double hi,
                     double (*fn)(std::span<const double>),
                     std::function<double(double)> score) {
      reg->entries.emplace_back(name, [=](int d) {
        return box(name, d, lo, hi, fn, score);
      });
    };
    const double pi = std::numbers::pi;
    add("rastrigin", -5.12, 5.12, rastrigin,
        [](double v) { return v * v - 10.0 * std::cos(kTwoPi * v); });
    // Both ackley terms improve as |x_i| shrinks on every axis at once.
    add("ackley", -4.0, 4.0, ackley, [](double v) { return std::abs(v); });
    add("styblinski_tang", -5.0, 5.0, styblinski_tang, [](double v) {
      return v * v * v * v - 16.0 * v * v + 5.0 * v;
    });
    add("schwefel", -500.0, 500.0, schwefel,
        [](double v) { return v * std::sin(std::sqrt(std::abs(v))); });
    // The cosine product couples the axes; no per-axis locator.
    add("griewank", -512.0, 512.0, griewank, nullptr);
    add("alpine01", -10.0, 10.0, alpine01,
        [](double v) { return std::abs(v * std::sin(v) + 0.1 * v); });
    // The largest positive factor dominates any negative pair.
    add("alpine02", 0.0, 10.0, alpine02,
        [](double v) { return -(std::sqrt(v) * std::sin(v)); });
    add("deflected_corrugated_spring", 0.0, 10.0, deflected_corrugated_spring,
        [](double v) { return std::abs(v); });
    add("wavy", -pi, pi, wavy,
        [](double v) { return -std::cos(10.0 * v) * std::exp(-v * v / 2.0); });
    return reg;
  }();
  return *r;
}

}  // namespace

double ObjectiveSpec::evaluate(std::span<const double> scaled) const {
  const std::size_t d = scaled.size();
  constexpr std::size_t kInline = 32;
  if (d <= kInline) {
    double raw[kInline];
    for (std::size_t i = 0; i < d; ++i) {
      raw[i] = raw_lower[i] + scaled[i] * (raw_upper[i] - raw_lower[i]);
    }
    return raw_fn(std::span<const double>(raw, d));
  }
  return raw_fn(to_raw(scaled));
}

std::vector<double> ObjectiveSpec::to_raw(std::span<const double> scaled) const {
  std::vector<double> raw(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    raw[i] = raw_lower[i] + scaled[i] * (raw_upper[i] - raw_lower[i]);
  }
  return raw;
}

std::vector<double> ObjectiveSpec::to_scaled(std::span<const double> raw) const {
  std::vector<double> scaled(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    scaled[i] = (raw[i] - raw_lower[i]) / (raw_upper[i] - raw_lower[i]);
  }
  return scaled;
}

ObjectiveSpec make_objective(const std::string& name, int dimension) {
  if (dimension < 1) {
    throw std::invalid_argument("dimension must be >= 1");
  }
  Registry& reg = registry();
  ObjectiveFactory factory;
  {
    std::lock_guard lock(reg.mu);
    for (const auto& [n, f] : reg.entries) {
      if (n == name) factory = f;
    }
  }
  if (!factory) throw std::invalid_argument("unknown function: " + name);
  return factory(dimension);
}

std::vector<std::string> objective_names() {
  Registry& reg = registry();
  std::lock_guard lock(reg.mu);
  std::vector<std::string> names;
  for (const auto& entry : reg.entries) names.push_back(entry.first);
  return names;
}

void register_objective(const std::string& name, ObjectiveFactory factory) {
  Registry& reg = registry();
  std::lock_guard lock(reg.mu);
  for (auto& entry : reg.entries) {
    if (entry.first == name) {
      entry.second = std::move(factory);
      return;
    }
  }
  reg.entries.emplace_back(name, std::move(factory));
}

nlohmann::json describe(const ObjectiveSpec& spec) {
  nlohmann::json domain = nlohmann::json::array();
  for (std::size_t i = 0; i < spec.raw_lower.size(); ++i) {
    domain.push_back({spec.raw_lower[i], spec.raw_upper[i]});
  }
  return {{"name", spec.name}, {"dim", spec.dimension}, {"domain", domain}};
}

Grid::Grid(int dims, int bits) : dims_(dims), bits_(bits) {
  if (dims < 1 || bits < 1 || bits > 31) {
    throw std::invalid_argument("grid needs dims >= 1 and 1 <= bits <= 31");
  }
}

std::uint64_t Grid::total_points() const {
  if (!indexable()) {
    throw CapacityError("grid index space exceeds 62 bits");
  }
  return std::uint64_t{1} << (dims_ * bits_);
}

std::uint64_t Grid::digit_of(double x) const noexcept {
  const double cells = static_cast<double>(cells_per_axis());
  const double scaled = std::floor(x * cells);
  if (!(scaled > 0.0)) return 0;
  if (scaled >= cells) return cells_per_axis() - 1;
  return static_cast<std::uint64_t>(scaled);
}

void Grid::point_into(std::uint64_t index, std::span<double> out) const {
  const std::uint64_t mask = cells_per_axis() - 1;
  for (int d = dims_ - 1; d >= 0; --d) {
    out[static_cast<std::size_t>(d)] = coordinate(index & mask);
    index >>= bits_;
  }
}

std::vector<double> Grid::point(std::uint64_t index) const {
  if (index >= total_points()) {
    throw std::out_of_range("grid index out of range");
  }
  std::vector<double> out(static_cast<std::size_t>(dims_));
  point_into(index, out);
  return out;
}

std::uint64_t Grid::index_of(std::span<const double> scaled) const {
  if (scaled.size() != static_cast<std::size_t>(dims_)) {
    throw std::invalid_argument("point dimension does not match grid");
  }
  total_points();
  std::uint64_t index = 0;
  for (double x : scaled) index = (index << bits_) | digit_of(x);
  return index;
}

std::vector<double> Grid::snap(std::span<const double> scaled) const {
  std::vector<double> out(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    out[i] = coordinate(digit_of(scaled[i]));
  }
  return out;
}

std::vector<double> tabulate(const ObjectiveSpec& spec, const Grid& grid,
                             std::uint64_t cap) {
  if (!grid.indexable() || grid.total_points() > cap) {
    throw CapacityError("grid too large to tabulate: " +
                        std::to_string(grid.dims() * grid.bits()) + " bits");
  }
  const std::uint64_t n = grid.total_points();
  std::vector<double> values(n);
  std::vector<double> x(static_cast<std::size_t>(grid.dims()));
  for (std::uint64_t j = 0; j < n; ++j) {
    grid.point_into(j, x);
    values[j] = spec.evaluate(x);
  }
  return values;
}

OptimumRecord optimum_from_values(std::span<const double> values,
                                  const ObjectiveSpec& spec,
                                  const Grid& grid) {
  (void)spec;
  std::uint64_t best = 0;
  for (std::uint64_t j = 1; j < values.size(); ++j) {
    if (values[j] < values[best]) best = j;
  }
  OptimumRecord rec;
  rec.argmin_index = best;
  rec.argmin_scaled = grid.point(best);
  rec.min_value = values[best];
  for (std::uint64_t j = best + 1; j < values.size(); ++j) {
    if (values[j] != rec.min_value) continue;
    if (rec.tied_scaled.size() == kMaxTiedOptima) break;
    rec.tied_scaled.push_back(grid.point(j));
  }
  return rec;
}

OptimumRecord locate_global_optimum(const ObjectiveSpec& spec,
                                    const Grid& grid, std::uint64_t cap) {
  const std::vector<double> values = tabulate(spec, grid, cap);
  return optimum_from_values(values, spec, grid);
}

OptimumRecord locate_global_optimum_by_axis(const ObjectiveSpec& spec,
                                            const Grid& grid) {
  if (!spec.coordinate_score) {
    throw std::invalid_argument(spec.name + " has no per-axis locator");
  }
  OptimumRecord rec;
  rec.argmin_scaled.resize(static_cast<std::size_t>(grid.dims()));
  std::vector<std::vector<std::uint64_t>> tied(
      static_cast<std::size_t>(grid.dims()));
  for (int d = 0; d < grid.dims(); ++d) {
    const auto i = static_cast<std::size_t>(d);
    const double lo = spec.raw_lower[i];
    const double width = spec.raw_upper[i] - lo;
    std::uint64_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < grid.cells_per_axis(); ++k) {
      const double s = spec.coordinate_score(lo + grid.coordinate(k) * width);
      if (s < best_score) {
        best_score = s;
        best = k;
        tied[i].clear();
      } else if (s == best_score) {
        tied[i].push_back(k);
      }
    }
    rec.argmin_scaled[i] = grid.coordinate(best);
    tied[i].insert(tied[i].begin(), best);
  }
  // Every combination of per-axis tied digits, skipping the argmin itself.
  std::size_t combos = 1;
  for (const auto& t : tied) {
    combos = combos > kMaxTiedOptima ? combos : combos * t.size();
  }
  if (combos > 1 && combos <= kMaxTiedOptima + 1) {
    std::vector<std::size_t> pick(tied.size(), 0);
    for (std::size_t c = 1; c < combos; ++c) {
      for (std::size_t a = tied.size(); a-- > 0;) {
        if (++pick[a] < tied[a].size()) break;
        pick[a] = 0;
      }
      std::vector<double> x(tied.size());
      for (std::size_t a = 0; a < tied.size(); ++a) {
        x[a] = grid.coordinate(tied[a][pick[a]]);
      }
      rec.tied_scaled.push_back(std::move(x));
    }
  }
  if (grid.indexable()) rec.argmin_index = grid.index_of(rec.argmin_scaled);
  rec.min_value = spec.evaluate(rec.argmin_scaled);
  return rec;
}

OptimumRecord locate_optimum(const ObjectiveSpec& spec, const Grid& grid,
                             std::uint64_t cap) {
  if (grid.indexable() && grid.total_points() <= cap) {
    return locate_global_optimum(spec, grid, cap);
  }
  if (!spec.coordinate_score) {
    throw CapacityError("grid too large for an exhaustive scan of " +
                        spec.name);
  }
  return locate_global_optimum_by_axis(spec, grid);
}

namespace {

bool within(std::span<const double> x, const std::vector<double>& c,
            double eps) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - c[i];
    s += d * d;
  }
  return std::sqrt(s) <= eps;
}

}  // namespace

bool is_global_hit(std::span<const double> x, const OptimumRecord& opt,
                   double eps) {
  if (within(x, opt.argmin_scaled, eps)) return true;
  for (const auto& c : opt.tied_scaled) {
    if (within(x, c, eps)) return true;
  }
  return false;
}

}  // namespace quadsim
