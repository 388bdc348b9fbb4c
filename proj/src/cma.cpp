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

#include "quadsim/cma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "quadsim/errors.hpp"

namespace quadsim::cma {
namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

Eigen::VectorXd to_vector(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(),
                                           static_cast<Eigen::Index>(x.size()));
}

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd json_vec(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return to_vector(v);
}

}  // namespace

DistributionState DistributionState::initial(std::span<const double> mean,
                                             double sigma) {
  const auto d = static_cast<Eigen::Index>(mean.size());
  DistributionState s;
  s.mean = to_vector(mean);
  s.shape = Eigen::MatrixXd::Identity(d, d);
  s.sigma = sigma;
  s.path_c = Eigen::VectorXd::Zero(d);
  s.path_sigma = Eigen::VectorXd::Zero(d);
  s.generation = 0;
  return s;
}

nlohmann::json to_json(const DistributionState& s) {
  nlohmann::json shape = nlohmann::json::array();
  for (Eigen::Index r = 0; r < s.shape.rows(); ++r) {
    shape.push_back(vec_json(s.shape.row(r).transpose()));
  }
  return {{"mean", vec_json(s.mean)},     {"shape", shape},
          {"sigma", s.sigma},             {"path_c", vec_json(s.path_c)},
          {"path_sigma", vec_json(s.path_sigma)},
          {"generation", s.generation}};
}

DistributionState state_from_json(const nlohmann::json& j) {
  DistributionState s;
  s.mean = json_vec(j.at("mean"));
  const auto d = s.mean.size();
  s.shape.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    s.shape.row(r) = json_vec(j.at("shape").at(r)).transpose();
  }
  s.sigma = j.at("sigma").get<double>();
  s.path_c = json_vec(j.at("path_c"));
  s.path_sigma = json_vec(j.at("path_sigma"));
  s.generation = j.at("generation").get<int>();
  return s;
}

PopulationConfig default_population(int dims) {
  if (dims < 1) throw std::invalid_argument("dims must be >= 1");
  const int m = 4 + 3 * static_cast<int>(std::floor(std::log(dims)));
  return {m, m / 2};
}

CmaHyperparams default_hyperparams(int dims, int selected) {
  if (dims < 1 || selected < 1) {
    throw std::invalid_argument("dims and selected must be >= 1");
  }
  CmaHyperparams hp;
  const double k = selected;
  hp.weights.resize(static_cast<std::size_t>(selected));
  for (int i = 0; i < selected; ++i) {
    hp.weights[static_cast<std::size_t>(i)] =
        std::log(k + 0.5) - std::log(static_cast<double>(i + 1));
  }
  const double total = std::accumulate(hp.weights.begin(), hp.weights.end(), 0.0);
  double sq = 0.0;
  for (double& w : hp.weights) {
    w /= total;
    sq += w * w;
  }
  hp.mu_eff = 1.0 / sq;
  const double d = dims;
  const double mu = hp.mu_eff;
  hp.c1 = 2.0 / ((d + 1.3) * (d + 1.3) + mu);
  hp.c_sigma = (mu + 2.0) / (d + mu + 5.0);
  hp.c_c = (4.0 + mu / d) / (d + 4.0 + 2.0 * mu / d);
  hp.c_mu = std::min(1.0 - hp.c1,
                     2.0 * (mu - 2.0 + 1.0 / mu) / ((d + 2.0) * (d + 2.0) + mu));
  hp.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu - 1.0) / (d + 1.0)) - 1.0) +
               hp.c_sigma;
  return hp;
}

double chi_mean(int dims) {
  const double d = dims;
  return std::sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));
}

Eigen::MatrixXd SymmetricFactor::inverse() const {
  return basis * eigenvalues.cwiseInverse().asDiagonal() * basis.transpose();
}

Eigen::MatrixXd SymmetricFactor::inverse_sqrt() const {
  return basis * eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
         basis.transpose();
}

Eigen::MatrixXd SymmetricFactor::sqrt() const {
  return basis * eigenvalues.cwiseSqrt().asDiagonal() * basis.transpose();
}

SymmetricFactor factor_symmetric(const Eigen::MatrixXd& m, double floor) {
  if (!all_finite(m)) throw NumericalError("non-finite symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition failed");
  }
  SymmetricFactor f{solver.eigenvectors(), solver.eigenvalues()};
  for (Eigen::Index i = 0; i < f.eigenvalues.size(); ++i) {
    f.eigenvalues[i] = std::max(f.eigenvalues[i], floor);
  }
  if (!f.basis.allFinite() || !f.eigenvalues.allFinite()) {
    throw NumericalError("non-finite eigen factor");
  }
  return f;
}

TruncatedGaussianSampler::TruncatedGaussianSampler(
    const DistributionState& state)
    : mean_(state.mean),
      z_(state.mean.size()),
      x_(state.mean.size()) {
  const SymmetricFactor f = factor_symmetric(state.shape);
  transform_ = state.sigma * (f.basis * f.eigenvalues.cwiseSqrt().asDiagonal());
  if (!transform_.allFinite()) throw NumericalError("non-finite sampling factor");
}

Point TruncatedGaussianSampler::draw(Rng& rng) {
  std::normal_distribution<double> normal;
  bool inside = false;
  for (int attempt = 0; attempt < kMaxRejections && !inside; ++attempt) {
    for (Eigen::Index i = 0; i < z_.size(); ++i) z_[i] = normal(rng);
    x_ = mean_ + transform_ * z_;
    inside = (x_.array() >= 0.0).all() && (x_.array() <= 1.0).all();
  }
  if (!x_.allFinite()) throw NumericalError("non-finite sample");
  if (!inside) x_ = x_.cwiseMax(0.0).cwiseMin(1.0);
  return Point(x_.data(), x_.data() + x_.size());
}

std::vector<Point> sample_population(const DistributionState& state,
                                     int count, Rng& rng) {
  TruncatedGaussianSampler sampler(state);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) out.push_back(sampler.draw(rng));
  return out;
}

std::vector<std::size_t> select_best(std::span<const double> values,
                                     int count) {
  if (count < 0 || static_cast<std::size_t>(count) > values.size()) {
    throw std::invalid_argument("select_best: count out of range");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  order.resize(static_cast<std::size_t>(count));
  return order;
}

DistributionState cma_update(const DistributionState& state,
                             std::span<const Point> selected,
                             const CmaHyperparams& hp) {
  if (selected.size() != hp.weights.size()) {
    throw std::invalid_argument("cma_update: weight count != sample count");
  }
  const Eigen::Index d = state.mean.size();
  const double dd = static_cast<double>(d);
  const std::size_t k = selected.size();

  std::vector<Eigen::VectorXd> z(k);
  Eigen::VectorXd z_w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::VectorXd x = to_vector(selected[i]);
    z[i] = (x - state.mean) / state.sigma;
    z_w += hp.weights[i] * z[i];
    mean += hp.weights[i] * x;
    weight_sum += hp.weights[i];
  }

  DistributionState next;
  next.mean = mean;

  const Eigen::MatrixXd c_inv_sqrt = factor_symmetric(state.shape).inverse_sqrt();
  const double cs = hp.c_sigma;
  next.path_sigma = (1.0 - cs) * state.path_sigma +
                    std::sqrt(cs * (2.0 - cs) * hp.mu_eff) * (c_inv_sqrt * z_w);

  const double chi = chi_mean(static_cast<int>(d));
  const double ps_norm = next.path_sigma.norm();
  next.sigma = state.sigma * std::exp((cs / hp.d_sigma) * (ps_norm / chi - 1.0));

  const double decay =
      std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (state.generation + 1)));
  const double h_sigma =
      ps_norm / decay < (1.4 + 2.0 / (dd + 1.0)) * chi ? 1.0 : 0.0;

  const double cc = hp.c_c;
  next.path_c = (1.0 - cc) * state.path_c +
                h_sigma * std::sqrt(cc * (2.0 - cc) * hp.mu_eff) * z_w;

  const double delta = (1.0 - h_sigma) * cc * (2.0 - cc);
  Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < k; ++i) {
    rank_mu += hp.weights[i] * (z[i] * z[i].transpose());
  }
  Eigen::MatrixXd shape =
      (1.0 + hp.c1 * delta - hp.c1 - hp.c_mu * weight_sum) * state.shape +
      hp.c1 * (next.path_c * next.path_c.transpose()) + hp.c_mu * rank_mu;
  shape = 0.5 * (shape + shape.transpose()).eval();

  if (!shape.allFinite() || !next.mean.allFinite() ||
      !next.path_sigma.allFinite() || !std::isfinite(next.sigma)) {
    throw NumericalError("non-finite CMA-ES update");
  }
  const SymmetricFactor f = factor_symmetric(shape, 0.0);
  if (f.eigenvalues.minCoeff() < kEigenFloor) {
    Eigen::VectorXd ev = f.eigenvalues.cwiseMax(kEigenFloor);
    shape = f.basis * ev.asDiagonal() * f.basis.transpose();
    shape = 0.5 * (shape + shape.transpose()).eval();
  }
  next.shape = shape;
  next.generation = state.generation + 1;
  return next;
}

TrialRecord run_cmaes(const ObjectiveSpec& spec, const OptimumRecord& opt,
                      const CmaesConfig& config, Rng& rng) {
  const int d = spec.dimension;
  const PopulationConfig pop = config.population.value_or(default_population(d));
  if (pop.selected < 1 || pop.selected > pop.population) {
    throw std::invalid_argument("population needs 1 <= K <= M");
  }
  const CmaHyperparams hp = default_hyperparams(d, pop.selected);

  TrialRecord rec;
  Point mu0(static_cast<std::size_t>(d));
  for (double& v : mu0) v = uniform01(rng);

  // Returns true when the trial is finished.
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

  DistributionState state = DistributionState::initial(mu0, config.sigma0);
  auto finish = [&] {
    rec.generations = state.generation;
    rec.final_state = to_json(state);
    return rec;
  };

  double value = 0.0;
  if (evaluate(mu0, value)) return finish();
  if (state.sigma < config.eps_sigma) {
    rec.outcome = Outcome::Local;
    return finish();
  }

  std::vector<double> values(static_cast<std::size_t>(pop.population));
  std::vector<Point> chosen(static_cast<std::size_t>(pop.selected));
  for (;;) {
    std::vector<Point> samples;
    try {
      samples = sample_population(state, pop.population, rng);
    } catch (const NumericalError&) {
      rec.outcome = Outcome::Local;
      rec.covariance_failure = true;
      return finish();
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (evaluate(samples[i], values[i])) return finish();
    }
    const auto best = select_best(values, pop.selected);
    for (std::size_t i = 0; i < best.size(); ++i) chosen[i] = samples[best[i]];
    try {
      state = cma_update(state, chosen, hp);
    } catch (const NumericalError&) {
      rec.outcome = Outcome::Local;
      rec.covariance_failure = true;
      return finish();
    }
    if (state.sigma < config.eps_sigma) {
      rec.outcome = Outcome::Local;
      return finish();
    }
  }
}

}  // namespace quadsim::cma
