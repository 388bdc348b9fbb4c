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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "quadsim/simd/kernels.hpp"

using namespace quadsim::simd;

namespace {

const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17,
                                31, 33, 64, 255, 1000, 1027};

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * 8) == 0);
}

// Values with repeats and a NaN so threshold ties are exercised.
std::vector<double> values_for(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::vector<double> v(n);
  for (double& x : v) x = pick(rng) * 0.5;
  if (n > 3) v[3] = std::numeric_limits<double>::quiet_NaN();
  return v;
}

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
  const auto levels = available_levels();
  REQUIRE_FALSE(levels.empty());
  CHECK(levels.front() == Level::Scalar);
  CHECK(kernels_for(Level::Scalar).level == Level::Scalar);
  CHECK(level_name(Level::Scalar) == "scalar");
}

TEST_CASE("requesting a level that is not available throws") {
  const auto levels = available_levels();
  for (Level l : {Level::Avx2, Level::Neon}) {
    const bool present =
        std::find(levels.begin(), levels.end(), l) != levels.end();
    if (!present) CHECK_THROWS_AS(kernels_for(l), std::invalid_argument);
  }
}

TEST_CASE("every level matches the scalar reference bit for bit") {
  std::mt19937_64 rng(7);
  const KernelTable& ref = scalar_kernels();
  for (Level level : available_levels()) {
    const KernelTable& k = kernels_for(level);
    CAPTURE(level_name(level));
    for (std::size_t n : kLengths) {
      CAPTURE(n);
      const auto a = random_vector(n, rng);
      const auto b = random_vector(n, rng);
      const auto values = values_for(n, rng);
      CHECK(same_bits(k.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)));

      auto x1 = a;
      auto x2 = a;
      k.flip_below(x1.data(), values.data(), 2.0, n);
      ref.flip_below(x2.data(), values.data(), 2.0, n);
      CHECK(same_bits(x1, x2));

      x1 = a;
      x2 = a;
      const double d1 = k.flip_below_dot(x1.data(), values.data(), 2.5, b.data(), n);
      const double d2 = ref.flip_below_dot(x2.data(), values.data(), 2.5, b.data(), n);
      CHECK(same_bits(d1, d2));
      CHECK(same_bits(x1, x2));

      x1 = a;
      x2 = a;
      k.reflect(x1.data(), b.data(), 0.37, n);
      ref.reflect(x2.data(), b.data(), 0.37, n);
      CHECK(same_bits(x1, x2));

      x1 = a;
      x2 = a;
      k.scale(x1.data(), 1.0 / 3.0, n);
      ref.scale(x2.data(), 1.0 / 3.0, n);
      CHECK(same_bits(x1, x2));

      CHECK(same_bits(k.mass_below(a.data(), values.data(), 3.0, n),
                      ref.mass_below(a.data(), values.data(), 3.0, n)));
    }
  }
}

TEST_CASE("reference kernels agree with extended-precision sums") {
  std::mt19937_64 rng(11);
  const KernelTable& ref = scalar_kernels();
  for (std::size_t n : kLengths) {
    const auto a = random_vector(n, rng);
    const auto b = random_vector(n, rng);
    long double exact = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      exact += static_cast<long double>(a[i]) * b[i];
    }
    CHECK(ref.dot(a.data(), b.data(), n) ==
          doctest::Approx(static_cast<double>(exact)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("flip is strict and never flips NaN") {
  const KernelTable& ref = scalar_kernels();
  for (Level level : available_levels()) {
    const KernelTable& k = kernels_for(level);
    std::vector<double> amps(9, 1.0);
    std::vector<double> values{1, 2, 3, 2, 1,
                               std::numeric_limits<double>::quiet_NaN(), 0, 5, 2};
    k.flip_below(amps.data(), values.data(), 2.0, amps.size());
    const std::vector<double> expect{-1, 1, 1, 1, -1, 1, -1, 1, 1};
    CHECK(amps == expect);
  }
  std::vector<double> one{0.5};
  std::vector<double> v{-1.0};
  ref.flip_below(one.data(), v.data(), -1.0, 1);
  CHECK(one[0] == 0.5);
}

TEST_CASE("span helpers use the active table") {
  const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(dot(a, a) == 285.0);
  CHECK(sum_squares(a) == 285.0);
}
