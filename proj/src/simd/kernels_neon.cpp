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

// NEON kernels for AArch64. Four float64x2 accumulators cover lanes
// (0,1) (2,3) (4,5) (6,7) of the reference layout.

#include "kernels_internal.hpp"

#if QUADSIM_HAVE_NEON

#include <arm_neon.h>

#include <cstddef>

namespace quadsim::simd {
namespace {

inline double fold(float64x2_t v01, float64x2_t v23, float64x2_t v45,
                   float64x2_t v67) {
  const float64x2_t s01 = vaddq_f64(v01, v45);
  const float64x2_t s23 = vaddq_f64(v23, v67);
  const double a = vgetq_lane_f64(s01, 0) + vgetq_lane_f64(s01, 1);
  const double b = vgetq_lane_f64(s23, 0) + vgetq_lane_f64(s23, 1);
  return a + b;
}

inline float64x2_t flip(float64x2_t amps, float64x2_t values,
                        float64x2_t threshold) {
  const uint64x2_t lt = vcltq_f64(values, threshold);
  const uint64x2_t sign = vandq_u64(lt, vdupq_n_u64(0x8000000000000000ULL));
  return vreinterpretq_f64_u64(veorq_u64(vreinterpretq_u64_f64(amps), sign));
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0),
                        vdupq_n_f64(0.0)};
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    for (int v = 0; v < 4; ++v) {
      acc[v] = vaddq_f64(acc[v], vmulq_f64(vld1q_f64(a + i + 2 * v),
                                           vld1q_f64(b + i + 2 * v)));
    }
  }
  double total = fold(acc[0], acc[1], acc[2], acc[3]);
  for (std::size_t i = body; i < n; ++i) {
    const double p = a[i] * b[i];
    total = total + p;
  }
  return total;
}

void flip_below_neon(double* amps, const double* values, double threshold,
                     std::size_t n) {
  const float64x2_t t = vdupq_n_f64(threshold);
  const std::size_t body = n - n % 2;
  for (std::size_t i = 0; i < body; i += 2) {
    vst1q_f64(amps + i, flip(vld1q_f64(amps + i), vld1q_f64(values + i), t));
  }
  for (std::size_t i = body; i < n; ++i) {
    if (values[i] < threshold) amps[i] = -amps[i];
  }
}

double flip_below_dot_neon(double* amps, const double* values,
                           double threshold, const double* ref,
                           std::size_t n) {
  const float64x2_t t = vdupq_n_f64(threshold);
  float64x2_t acc[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0),
                        vdupq_n_f64(0.0)};
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    for (int v = 0; v < 4; ++v) {
      const std::size_t k = i + 2 * v;
      const float64x2_t a = flip(vld1q_f64(amps + k), vld1q_f64(values + k), t);
      vst1q_f64(amps + k, a);
      acc[v] = vaddq_f64(acc[v], vmulq_f64(a, vld1q_f64(ref + k)));
    }
  }
  double total = fold(acc[0], acc[1], acc[2], acc[3]);
  for (std::size_t i = body; i < n; ++i) {
    if (values[i] < threshold) amps[i] = -amps[i];
    const double p = amps[i] * ref[i];
    total = total + p;
  }
  return total;
}

void reflect_neon(double* amps, const double* ref, double coeff,
                  std::size_t n) {
  const float64x2_t c = vdupq_n_f64(coeff);
  const std::size_t body = n - n % 2;
  for (std::size_t i = 0; i < body; i += 2) {
    const float64x2_t p = vmulq_f64(c, vld1q_f64(ref + i));
    vst1q_f64(amps + i, vsubq_f64(p, vld1q_f64(amps + i)));
  }
  for (std::size_t i = body; i < n; ++i) {
    const double p = coeff * ref[i];
    amps[i] = p - amps[i];
  }
}

void scale_neon(double* amps, double factor, std::size_t n) {
  const float64x2_t f = vdupq_n_f64(factor);
  const std::size_t body = n - n % 2;
  for (std::size_t i = 0; i < body; i += 2) {
    vst1q_f64(amps + i, vmulq_f64(vld1q_f64(amps + i), f));
  }
  for (std::size_t i = body; i < n; ++i) amps[i] = amps[i] * factor;
}

double mass_below_neon(const double* amps, const double* values,
                       double threshold, std::size_t n) {
  const float64x2_t t = vdupq_n_f64(threshold);
  float64x2_t acc[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0),
                        vdupq_n_f64(0.0)};
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    for (int v = 0; v < 4; ++v) {
      const std::size_t k = i + 2 * v;
      const float64x2_t a = vld1q_f64(amps + k);
      const uint64x2_t lt = vcltq_f64(vld1q_f64(values + k), t);
      const float64x2_t sq = vreinterpretq_f64_u64(
          vandq_u64(lt, vreinterpretq_u64_f64(vmulq_f64(a, a))));
      acc[v] = vaddq_f64(acc[v], sq);
    }
  }
  double total = fold(acc[0], acc[1], acc[2], acc[3]);
  for (std::size_t i = body; i < n; ++i) {
    const double p = values[i] < threshold ? amps[i] * amps[i] : 0.0;
    total = total + p;
  }
  return total;
}

constexpr KernelTable kNeonTable{
    Level::Neon,   dot_neon,   flip_below_neon, flip_below_dot_neon,
    reflect_neon,  scale_neon, mass_below_neon,
};

}  // namespace

const KernelTable* neon_kernels() noexcept { return &kNeonTable; }

}  // namespace quadsim::simd

#else

namespace quadsim::simd {
const KernelTable* neon_kernels() noexcept { return nullptr; }
}  // namespace quadsim::simd

#endif
