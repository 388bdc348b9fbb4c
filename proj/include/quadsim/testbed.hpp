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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace quadsim {

// A benchmark function over a box, exposed on the unit cube [0,1]^D.
struct ObjectiveSpec {
  std::string name;
  int dimension = 0;
  std::vector<double> raw_lower;
  std::vector<double> raw_upper;
  // Objective in raw (unscaled) coordinates.
  std::function<double(std::span<const double>)> raw_fn;
  // Optional per-coordinate score: when set, minimizing it independently on
  // every axis yields a global minimizer of raw_fn over any product grid.
  // Used to locate optima on grids too large to scan.
  std::function<double(double)> coordinate_score;

  double evaluate(std::span<const double> scaled) const;
  std::vector<double> to_raw(std::span<const double> scaled) const;
  std::vector<double> to_scaled(std::span<const double> raw) const;
};

// Builds a registered function by name ("rastrigin", "styblinski_tang", ...).
// Throws std::invalid_argument for unknown names or dimension < 1.
ObjectiveSpec make_objective(const std::string& name, int dimension);

// Names in registration order; the built-in nine come first.
std::vector<std::string> objective_names();

using ObjectiveFactory = std::function<ObjectiveSpec(int dimension)>;

// In-process extension point. Replaces an existing entry of the same name.
void register_objective(const std::string& name, ObjectiveFactory factory);

nlohmann::json describe(const ObjectiveSpec& spec);

// Fixed-point discretization of [0,1]^D with `bits` bits per axis. Axis
// digits are packed dimension-major, axis 0 in the most significant bits;
// digit k maps to the cell midpoint (k + 0.5) / 2^bits.
class Grid {
 public:
  Grid(int dims, int bits);

  int dims() const noexcept { return dims_; }
  int bits() const noexcept { return bits_; }
  std::uint64_t cells_per_axis() const noexcept {
    return std::uint64_t{1} << bits_;
  }
  // Total number of points; only valid when dims * bits <= 62.
  std::uint64_t total_points() const;
  bool indexable() const noexcept { return dims_ * bits_ <= 62; }

  double coordinate(std::uint64_t digit) const noexcept {
    return (static_cast<double>(digit) + 0.5) /
           static_cast<double>(cells_per_axis());
  }
  // Digit of the cell containing x (clamped to the axis range).
  std::uint64_t digit_of(double x) const noexcept;

  std::vector<double> point(std::uint64_t index) const;
  void point_into(std::uint64_t index, std::span<double> out) const;
  std::uint64_t index_of(std::span<const double> scaled) const;
  // Midpoint of the cell containing x; works for any dims * bits.
  std::vector<double> snap(std::span<const double> scaled) const;

 private:
  int dims_;
  int bits_;
};

struct OptimumRecord {
  std::optional<std::uint64_t> argmin_index;
  std::vector<double> argmin_scaled;
  double min_value = 0.0;
  // Other grid points attaining min_value (symmetric objectives tie on
  // midpoint grids). At most kMaxTiedOptima entries.
  std::vector<std::vector<double>> tied_scaled;
};

inline constexpr std::size_t kMaxTiedOptima = 4096;

inline constexpr std::uint64_t kDefaultScanCap = std::uint64_t{1} << 26;

// f at every grid point, in index order. Throws CapacityError above `cap`.
std::vector<double> tabulate(const ObjectiveSpec& spec, const Grid& grid,
                             std::uint64_t cap = kDefaultScanCap);

// Exhaustive scan; ties go to the smallest index. Throws CapacityError when
// the grid has more than `cap` points.
OptimumRecord locate_global_optimum(const ObjectiveSpec& spec,
                                    const Grid& grid,
                                    std::uint64_t cap = kDefaultScanCap);

// Same record from tabulated values.
OptimumRecord optimum_from_values(std::span<const double> values,
                                  const ObjectiveSpec& spec, const Grid& grid);

// Per-axis scan using spec.coordinate_score. Throws std::invalid_argument if
// the objective has no coordinate score.
OptimumRecord locate_global_optimum_by_axis(const ObjectiveSpec& spec,
                                            const Grid& grid);

// Exhaustive when the grid fits under the cap, per-axis otherwise.
OptimumRecord locate_optimum(const ObjectiveSpec& spec, const Grid& grid,
                             std::uint64_t cap = kDefaultScanCap);

// Closed Euclidean eps-ball test in scaled coordinates, around argmin_scaled
// or any tied optimum.
bool is_global_hit(std::span<const double> x, const OptimumRecord& opt,
                   double eps);

}  // namespace quadsim
