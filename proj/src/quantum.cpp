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

#include "quadsim/quantum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>

#include "quadsim/cma.hpp"
#include "quadsim/errors.hpp"
#include "quadsim/simd/kernels.hpp"

namespace quadsim::quantum {
namespace {

constexpr double kNormTolerance = 1e-9;

void normalize(std::vector<double>& amps) {
  const auto& k = simd::active_kernels();
  const double n2 = k.dot(amps.data(), amps.data(), amps.size());
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw NumericalError("cannot normalize statevector");
  }
  k.scale(amps.data(), 1.0 / std::sqrt(n2), amps.size());
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | ((v >> (8 * i)) & 0xff);
  return out;
}

}  // namespace

Statevector::Statevector(Grid grid, std::vector<double> amplitudes)
    : grid_(grid), amps_(std::move(amplitudes)) {
  if (amps_.size() != grid_.total_points()) {
    throw std::invalid_argument("amplitude count does not match grid");
  }
}

double Statevector::norm() const { return std::sqrt(simd::sum_squares(amps_)); }

bool Statevector::all_finite() const {
  return std::all_of(amps_.begin(), amps_.end(),
                     [](double a) { return std::isfinite(a); });
}

void check_capacity(const Grid& grid, std::uint64_t cap) {
  if (!grid.indexable() || grid.total_points() > cap) {
    throw CapacityError("statevector of 2^" +
                        std::to_string(grid.dims() * grid.bits()) +
                        " amplitudes exceeds the cap");
  }
}

Statevector prepare_gaussian_state(const Grid& grid,
                                   std::span<const double> mean,
                                   const Eigen::MatrixXd& covariance,
                                   std::uint64_t cap) {
  check_capacity(grid, cap);
  const int d = grid.dims();
  if (mean.size() != static_cast<std::size_t>(d) || covariance.rows() != d ||
      covariance.cols() != d) {
    throw std::invalid_argument("gaussian state: dimension mismatch");
  }
  const Eigen::MatrixXd precision = cma::factor_symmetric(covariance).inverse();
  if (!precision.allFinite()) throw NumericalError("non-finite precision");

  const std::uint64_t n = grid.total_points();
  std::vector<double> quad(n);
  std::vector<double> x(static_cast<std::size_t>(d));
  std::vector<double> diff(static_cast<std::size_t>(d));
  double q_min = std::numeric_limits<double>::infinity();
  for (std::uint64_t j = 0; j < n; ++j) {
    grid.point_into(j, x);
    for (int a = 0; a < d; ++a) diff[a] = x[a] - mean[a];
    double q = 0.0;
    for (int a = 0; a < d; ++a) {
      double row = 0.0;
      for (int b = 0; b < d; ++b) row += precision(a, b) * diff[b];
      q += diff[a] * row;
    }
    quad[j] = q;
    q_min = std::min(q_min, q);
  }
  if (!std::isfinite(q_min)) throw NumericalError("non-finite quadratic form");
  // sqrt(exp(-q/2)) = exp(-q/4); shifting by q_min only changes the
  // normalization constant and keeps the peak away from underflow.
  for (double& q : quad) q = std::exp(-0.25 * (q - q_min));
  normalize(quad);
  return Statevector(grid, std::move(quad));
}

Statevector prepare_uniform_state(const Grid& grid, std::uint64_t cap) {
  check_capacity(grid, cap);
  const int bits = grid.dims() * grid.bits();
  const double amp = bits % 2 == 0
                         ? std::ldexp(1.0, -bits / 2)
                         : 1.0 / std::sqrt(std::ldexp(1.0, bits));
  return Statevector(grid, std::vector<double>(grid.total_points(), amp));
}

std::shared_ptr<const std::vector<double>> grid_values(
    const ObjectiveSpec& spec, const Grid& grid, std::uint64_t cap) {
  using Key = std::tuple<std::string, int, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  const Key key{spec.name, grid.dims(), grid.bits()};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto values =
      std::make_shared<const std::vector<double>>(tabulate(spec, grid, cap));
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(values)).first->second;
}

void oracle_sign_flip(Statevector& state, std::span<const double> values,
                      double threshold) {
  if (values.size() != state.size()) {
    throw std::invalid_argument("oracle: value table size mismatch");
  }
  simd::active_kernels().flip_below(state.amplitudes().data(), values.data(),
                                    threshold, state.size());
}

void reflect_about_initial(Statevector& state, const Statevector& psi0) {
  if (psi0.size() != state.size()) {
    throw std::invalid_argument("reflection: size mismatch");
  }
  const auto& k = simd::active_kernels();
  const double overlap = k.dot(state.amplitudes().data(),
                               psi0.amplitudes().data(), state.size());
  k.reflect(state.amplitudes().data(), psi0.amplitudes().data(),
            2.0 * overlap, state.size());
}

Statevector grover_power(const Statevector& psi0,
                         std::span<const double> values, double threshold,
                         std::uint64_t rotations, OracleCounter* counter) {
  if (values.size() != psi0.size()) {
    throw std::invalid_argument("grover_power: value table size mismatch");
  }
  Statevector state = psi0;
  const auto& k = simd::active_kernels();
  double* amps = state.amplitudes().data();
  const double* ref = psi0.amplitudes().data();
  const std::size_t n = state.size();
  for (std::uint64_t i = 0; i < rotations; ++i) {
    const double overlap = k.flip_below_dot(amps, values.data(), threshold, ref, n);
    k.reflect(amps, ref, 2.0 * overlap, n);
  }
  if (counter != nullptr) counter->quantum_calls += rotations;
  if (rotations > 0 && std::abs(state.norm() - 1.0) > kNormTolerance) {
    throw NumericalError("statevector norm drifted beyond tolerance");
  }
  return state;
}

double good_probability(const Statevector& state,
                        std::span<const double> values, double threshold) {
  return simd::active_kernels().mass_below(state.amplitudes().data(),
                                           values.data(), threshold,
                                           state.size());
}

std::uint64_t measure(const Statevector& state, Rng& rng) {
  const auto amps = state.amplitudes();
  const double total = simd::sum_squares(amps);
  const double target = uniform01(rng) * total;
  double cumulative = 0.0;
  std::uint64_t last_nonzero = 0;
  for (std::size_t j = 0; j < amps.size(); ++j) {
    const double p = amps[j] * amps[j];
    if (p == 0.0) continue;
    cumulative += p;
    last_nonzero = j;
    if (cumulative > target) return j;
  }
  return last_nonzero;
}

AaResult aa_sample(const Statevector& psi0, std::span<const double> values,
                   double threshold, const AaOptions& options, Rng& rng,
                   OracleCounter& counter,
                   const std::function<bool(std::uint64_t, double)>& observe) {
  if (!(options.growth > 1.0 && options.growth < 4.0 / 3.0)) {
    throw std::invalid_argument("growth rate must lie in (1, 4/3)");
  }
  double m = 1.0;
  for (std::uint64_t round = 0;; ++round) {
    if (counter.combined() > options.budget) return {};
    const auto max_r = static_cast<std::uint64_t>(std::floor(m));
    std::uint64_t r = std::uniform_int_distribution<std::uint64_t>(0, max_r)(rng);
    const std::uint64_t remaining = options.budget - counter.combined();
    if (r > remaining) {
      // The round cannot finish inside the budget; spend what is left.
      counter.quantum_calls += remaining + 1;
      return {};
    }
    const Statevector state = grover_power(psi0, values, threshold, r, &counter);
    const std::uint64_t j = measure(state, rng);
    const double v = values[j];
    ++counter.classical_evals;
    const bool accepted = v < threshold;
    if (options.trace) options.trace({round, r, j, v, accepted, threshold});
    if (observe && observe(j, v)) return {AaStatus::Stopped, j, v};
    if (accepted) return {AaStatus::Accepted, j, v};
    if (counter.combined() > options.budget) return {};
    m *= options.growth;
  }
}

void write_statevector(std::ostream& out, const Statevector& state) {
  const std::uint64_t n = to_le(state.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (double a : state.amplitudes()) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(a));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

std::vector<double> read_amplitudes(std::istream& in) {
  std::uint64_t n = 0;
  if (!in.read(reinterpret_cast<char*>(&n), sizeof n)) {
    throw std::runtime_error("statevector dump: missing length");
  }
  n = to_le(n);
  std::vector<double> amps;
  amps.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 20)));
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
      throw std::runtime_error("statevector dump: truncated");
    }
    amps.push_back(std::bit_cast<double>(to_le(bits)));
  }
  return amps;
}

}  // namespace quadsim::quantum
