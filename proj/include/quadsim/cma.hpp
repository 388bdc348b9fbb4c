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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "quadsim/rng.hpp"
#include "quadsim/testbed.hpp"
#include "quadsim/trial.hpp"

namespace quadsim::cma {

inline constexpr double kEigenFloor = 1e-12;

// Search distribution N(mean, sigma^2 * shape) plus its evolution paths.
struct DistributionState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd shape;
  double sigma = 0.5;
  Eigen::VectorXd path_c;
  Eigen::VectorXd path_sigma;
  int generation = 0;

  // shape = I, zero paths, generation 0.
  static DistributionState initial(std::span<const double> mean,
                                   double sigma);
  int dims() const noexcept { return static_cast<int>(mean.size()); }
  Eigen::MatrixXd covariance() const { return sigma * sigma * shape; }
};

nlohmann::json to_json(const DistributionState& state);
DistributionState state_from_json(const nlohmann::json& j);

struct CmaHyperparams {
  std::vector<double> weights;  // positive, descending, sum 1
  double mu_eff = 1.0;
  double c1 = 0.0;
  double c_sigma = 0.0;
  double c_c = 0.0;
  double c_mu = 0.0;
  double d_sigma = 1.0;
};

struct PopulationConfig {
  int population = 4;  // M
  int selected = 2;    // K
};

// M = 4 + 3 floor(ln D), K = floor(M / 2).
PopulationConfig default_population(int dims);

CmaHyperparams default_hyperparams(int dims, int selected);

// sqrt(D) (1 - 1/(4D) + 1/(21 D^2)), approximating E||N(0, I)||.
double chi_mean(int dims);

// Eigen-decomposition of a symmetric matrix with eigenvalues floored at
// `floor`. Throws NumericalError on non-finite input.
struct SymmetricFactor {
  Eigen::MatrixXd basis;
  Eigen::VectorXd eigenvalues;

  Eigen::MatrixXd inverse() const;
  Eigen::MatrixXd inverse_sqrt() const;
  Eigen::MatrixXd sqrt() const;
};
SymmetricFactor factor_symmetric(const Eigen::MatrixXd& m,
                                 double floor = kEigenFloor);

inline constexpr int kMaxRejections = 1000;

// Draws from N(mean, sigma^2 C) truncated to [0,1]^D by rejection; after
// kMaxRejections failed draws the last one is clamped to the cube.
class TruncatedGaussianSampler {
 public:
  explicit TruncatedGaussianSampler(const DistributionState& state);
  Point draw(Rng& rng);

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd transform_;  // sigma * B * diag(sqrt(eigenvalues))
  Eigen::VectorXd z_;
  Eigen::VectorXd x_;
};

std::vector<Point> sample_population(const DistributionState& state,
                                     int count, Rng& rng);

// Indices of the `count` smallest values in ascending order; equal values
// keep sample order.
std::vector<std::size_t> select_best(std::span<const double> values,
                                     int count);

// One CMA-ES update from `selected` ordered by ascending f. Throws
// NumericalError on a non-finite result.
DistributionState cma_update(const DistributionState& state,
                             std::span<const Point> selected,
                             const CmaHyperparams& hp);

struct CmaesConfig {
  std::optional<PopulationConfig> population;  // default_population if unset
  double sigma0 = 0.5;
  double eps = 0.01;
  double eps_sigma = 0.01;
  std::uint64_t budget = 10'000'000;  // classical evaluations
};

// Standalone CMA-ES with the global-hit / local-convergence / budget stops.
TrialRecord run_cmaes(const ObjectiveSpec& spec, const OptimumRecord& opt,
                      const CmaesConfig& config, Rng& rng);

}  // namespace quadsim::cma
