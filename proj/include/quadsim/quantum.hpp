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
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "quadsim/rng.hpp"
#include "quadsim/testbed.hpp"
#include "quadsim/trial.hpp"

namespace quadsim::quantum {

inline constexpr std::uint64_t kDefaultAmplitudeCap = std::uint64_t{1} << 26;

// Real amplitudes over every point of a grid. All operators used here are
// real orthogonal and the prepared states are real, so no imaginary part is
// stored.
class Statevector {
 public:
  Statevector(Grid grid, std::vector<double> amplitudes);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return amps_.size(); }
  std::span<double> amplitudes() noexcept { return amps_; }
  std::span<const double> amplitudes() const noexcept { return amps_; }
  double operator[](std::size_t i) const noexcept { return amps_[i]; }

  double norm() const;
  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> amps_;
};

// Throws CapacityError when the grid has more than `cap` points.
void check_capacity(const Grid& grid, std::uint64_t cap);

// Amplitude at x proportional to sqrt(exp(-1/2 (x-mu)^T cov^-1 (x-mu))),
// normalized. cov is inverted through its eigen-decomposition with the
// eigenvalues floored at 1e-12.
Statevector prepare_gaussian_state(const Grid& grid,
                                   std::span<const double> mean,
                                   const Eigen::MatrixXd& covariance,
                                   std::uint64_t cap = kDefaultAmplitudeCap);

Statevector prepare_uniform_state(const Grid& grid,
                                  std::uint64_t cap = kDefaultAmplitudeCap);

// f over the grid in index order, computed once per (name, dims, bits) and
// shared between trials.
std::shared_ptr<const std::vector<double>> grid_values(
    const ObjectiveSpec& spec, const Grid& grid,
    std::uint64_t cap = kDefaultAmplitudeCap);

// Negates the amplitude of every point with f < threshold.
void oracle_sign_flip(Statevector& state, std::span<const double> values,
                      double threshold);

// state <- 2 <state, psi0> psi0 - state
void reflect_about_initial(Statevector& state, const Statevector& psi0);

// Applies (reflect . flip)^rotations to psi0; adds `rotations` to
// counter->quantum_calls when a counter is given.
Statevector grover_power(const Statevector& psi0,
                         std::span<const double> values, double threshold,
                         std::uint64_t rotations,
                         OracleCounter* counter = nullptr);

// Probability mass on {x : f(x) < threshold}.
double good_probability(const Statevector& state,
                        std::span<const double> values, double threshold);

// Samples an index with probability amplitude^2. Uses one uniform draw.
std::uint64_t measure(const Statevector& state, Rng& rng);

struct AaEvent {
  std::uint64_t round = 0;
  std::uint64_t rotations = 0;
  std::uint64_t index = 0;
  double value = 0.0;
  bool accepted = false;
  double threshold = 0.0;
};

enum class AaStatus { Accepted, Stopped, BudgetExhausted };

struct AaResult {
  AaStatus status = AaStatus::BudgetExhausted;
  std::uint64_t index = 0;
  double value = 0.0;
};

struct AaOptions {
  double growth = 1.2;  // lambda in (1, 4/3)
  std::uint64_t budget = 10'000'000;  // cap on counter.combined()
  std::function<void(const AaEvent&)> trace;
};

// Randomized-rotation amplitude amplification: r uniform in {0..floor(m)},
// measure, test f < threshold (one classical evaluation), grow m by lambda
// after each rejection. `observe` sees every measured candidate and may end
// the search early by returning true (status Stopped).
AaResult aa_sample(const Statevector& psi0, std::span<const double> values,
                   double threshold, const AaOptions& options, Rng& rng,
                   OracleCounter& counter,
                   const std::function<bool(std::uint64_t, double)>& observe);

// Little-endian uint64 length followed by that many little-endian doubles.
void write_statevector(std::ostream& out, const Statevector& state);
std::vector<double> read_amplitudes(std::istream& in);

}  // namespace quadsim::quantum
