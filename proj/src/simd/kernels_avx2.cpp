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

// AVX2 kernels. Compiled with -mavx2 only (no FMA) so products and sums round
// exactly like the scalar reference.

#include "kernels_internal.hpp"

#if QUADSIM_HAVE_AVX2

#include <immintrin.h>

#include <cstddef>

namespace quadsim::simd {
namespace {

// lo holds lanes 0..3, hi lanes 4..7.
inline double fold(__m256d lo, __m256d hi) {
  const __m256d s = _mm256_add_pd(lo, hi);  // s0..s3
  alignas(32) double v[4];
  _mm256_store_pd(v, s);
  return (v[0] + v[1]) + (v[2] + v[3]);
}

inline __m256d flip_mask(__m256d values, __m256d threshold) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_and_pd(_mm256_cmp_pd(values, threshold, _CMP_LT_OQ), sign);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    lo = _mm256_add_pd(lo, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                         _mm256_loadu_pd(b + i)));
    hi = _mm256_add_pd(hi, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                         _mm256_loadu_pd(b + i + 4)));
  }
  double total = fold(lo, hi);
  for (std::size_t i = body; i < n; ++i) {
    const double p = a[i] * b[i];
    total = total + p;
  }
  return total;
}

void flip_below_avx2(double* amps, const double* values, double threshold,
                     std::size_t n) {
  const __m256d t = _mm256_set1_pd(threshold);
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d m = flip_mask(_mm256_loadu_pd(values + i), t);
    _mm256_storeu_pd(amps + i, _mm256_xor_pd(_mm256_loadu_pd(amps + i), m));
  }
  for (std::size_t i = body; i < n; ++i) {
    if (values[i] < threshold) amps[i] = -amps[i];
  }
}

double flip_below_dot_avx2(double* amps, const double* values,
                           double threshold, const double* ref,
                           std::size_t n) {
  const __m256d t = _mm256_set1_pd(threshold);
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    const __m256d a0 = _mm256_xor_pd(
        _mm256_loadu_pd(amps + i), flip_mask(_mm256_loadu_pd(values + i), t));
    const __m256d a1 =
        _mm256_xor_pd(_mm256_loadu_pd(amps + i + 4),
                      flip_mask(_mm256_loadu_pd(values + i + 4), t));
    _mm256_storeu_pd(amps + i, a0);
    _mm256_storeu_pd(amps + i + 4, a1);
    lo = _mm256_add_pd(lo, _mm256_mul_pd(a0, _mm256_loadu_pd(ref + i)));
    hi = _mm256_add_pd(hi, _mm256_mul_pd(a1, _mm256_loadu_pd(ref + i + 4)));
  }
  double total = fold(lo, hi);
  for (std::size_t i = body; i < n; ++i) {
    if (values[i] < threshold) amps[i] = -amps[i];
    const double p = amps[i] * ref[i];
    total = total + p;
  }
  return total;
}

void reflect_avx2(double* amps, const double* ref, double coeff,
                  std::size_t n) {
  const __m256d c = _mm256_set1_pd(coeff);
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d p = _mm256_mul_pd(c, _mm256_loadu_pd(ref + i));
    _mm256_storeu_pd(amps + i, _mm256_sub_pd(p, _mm256_loadu_pd(amps + i)));
  }
  for (std::size_t i = body; i < n; ++i) {
    const double p = coeff * ref[i];
    amps[i] = p - amps[i];
  }
}

void scale_avx2(double* amps, double factor, std::size_t n) {
  const __m256d f = _mm256_set1_pd(factor);
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    _mm256_storeu_pd(amps + i, _mm256_mul_pd(_mm256_loadu_pd(amps + i), f));
  }
  for (std::size_t i = body; i < n; ++i) amps[i] = amps[i] * factor;
}

double mass_below_avx2(const double* amps, const double* values,
                       double threshold, std::size_t n) {
  const __m256d t = _mm256_set1_pd(threshold);
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    const __m256d a0 = _mm256_loadu_pd(amps + i);
    const __m256d a1 = _mm256_loadu_pd(amps + i + 4);
    const __m256d m0 =
        _mm256_cmp_pd(_mm256_loadu_pd(values + i), t, _CMP_LT_OQ);
    const __m256d m1 =
        _mm256_cmp_pd(_mm256_loadu_pd(values + i + 4), t, _CMP_LT_OQ);
    lo = _mm256_add_pd(lo, _mm256_and_pd(m0, _mm256_mul_pd(a0, a0)));
    hi = _mm256_add_pd(hi, _mm256_and_pd(m1, _mm256_mul_pd(a1, a1)));
  }
  double total = fold(lo, hi);
  for (std::size_t i = body; i < n; ++i) {
    const double p = values[i] < threshold ? amps[i] * amps[i] : 0.0;
    total = total + p;
  }
  return total;
}

constexpr KernelTable kAvx2Table{
    Level::Avx2,       dot_avx2,     flip_below_avx2, flip_below_dot_avx2,
    reflect_avx2,      scale_avx2,   mass_below_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() noexcept { return &kAvx2Table; }

}  // namespace quadsim::simd

#else

namespace quadsim::simd {
const KernelTable* avx2_kernels() noexcept { return nullptr; }
}  // namespace quadsim::simd

#endif
