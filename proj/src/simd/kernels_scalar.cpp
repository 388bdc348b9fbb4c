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

// Reference kernels. These define the numerical contract the vector variants
// must reproduce bit for bit; keep the lane layout in sync with kernels.hpp.

#include "quadsim/simd/kernels.hpp"

#include <cstddef>

namespace quadsim::simd {
namespace {

constexpr std::size_t kLanes = 8;

double fold_lanes(const double (&acc)[kLanes]) {
  const double s0 = acc[0] + acc[4];
  const double s1 = acc[1] + acc[5];
  const double s2 = acc[2] + acc[6];
  const double s3 = acc[3] + acc[7];
  return (s0 + s1) + (s2 + s3);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[kLanes] = {};
  const std::size_t body = n - n % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double p = a[i + l] * b[i + l];
      acc[l] = acc[l] + p;
    }
  }
  double total = fold_lanes(acc);
  for (std::size_t i = body; i < n; ++i) {
    const double p = a[i] * b[i];
    total = total + p;
  }
  return total;
}

void flip_below_scalar(double* amps, const double* values, double threshold,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] < threshold) amps[i] = -amps[i];
  }
}

double flip_below_dot_scalar(double* amps, const double* values,
                             double threshold, const double* ref,
                             std::size_t n) {
  double acc[kLanes] = {};
  const std::size_t body = n - n % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const std::size_t k = i + l;
      if (values[k] < threshold) amps[k] = -amps[k];
      const double p = amps[k] * ref[k];
      acc[l] = acc[l] + p;
    }
  }
  double total = fold_lanes(acc);
  for (std::size_t i = body; i < n; ++i) {
    if (values[i] < threshold) amps[i] = -amps[i];
    const double p = amps[i] * ref[i];
    total = total + p;
  }
  return total;
}

void reflect_scalar(double* amps, const double* ref, double coeff,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double p = coeff * ref[i];
    amps[i] = p - amps[i];
  }
}

void scale_scalar(double* amps, double factor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) amps[i] = amps[i] * factor;
}

double mass_below_scalar(const double* amps, const double* values,
                         double threshold, std::size_t n) {
  double acc[kLanes] = {};
  const std::size_t body = n - n % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const std::size_t k = i + l;
      const double p = values[k] < threshold ? amps[k] * amps[k] : 0.0;
      acc[l] = acc[l] + p;
    }
  }
  double total = fold_lanes(acc);
  for (std::size_t i = body; i < n; ++i) {
    const double p = values[i] < threshold ? amps[i] * amps[i] : 0.0;
    total = total + p;
  }
  return total;
}

constexpr KernelTable kScalarTable{
    Level::Scalar,       dot_scalar,     flip_below_scalar,
    flip_below_dot_scalar, reflect_scalar, scale_scalar,
    mass_below_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalarTable; }

}  // namespace quadsim::simd
