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

#include <span>
#include <string_view>
#include <vector>

namespace quadsim::simd {

// Instruction-set level a kernel table was compiled for.
enum class Level { Scalar, Avx2, Neon };

std::string_view level_name(Level level) noexcept;

// Element-wise kernels used by the statevector simulator.
//
// Every reduction accumulates into eight interleaved lanes (element i goes to
// lane i % 8), folds the lanes as ((l0+l4)+(l1+l5)) + ((l2+l6)+(l3+l7)) and
// then adds the tail sequentially. The vector variants follow the same order
// and never contract multiply-add, so all levels return bit-identical results
// for identical inputs.
struct KernelTable {
  Level level;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // amps[i] = -amps[i] where values[i] < threshold (strict, NaN never flips).
  void (*flip_below)(double* amps, const double* values, double threshold,
                     std::size_t n);

  // Fused flip_below followed by dot(amps, ref). Returns the dot product of
  // the flipped vector.
  double (*flip_below_dot)(double* amps, const double* values,
                           double threshold, const double* ref, std::size_t n);

  // amps[i] = coeff * ref[i] - amps[i]
  void (*reflect)(double* amps, const double* ref, double coeff,
                  std::size_t n);

  // amps[i] *= factor
  void (*scale)(double* amps, double factor, std::size_t n);

  // sum over i with values[i] < threshold of amps[i]^2
  double (*mass_below)(const double* amps, const double* values,
                       double threshold, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

// Kernel table selected at startup: the widest level supported by the CPU,
// unless QUADSIM_SIMD=scalar|avx2|neon requests a specific (supported) one.
const KernelTable& active_kernels() noexcept;

// Levels compiled into this binary and supported by the running CPU.
std::vector<Level> available_levels();

// Throws std::invalid_argument when the level is unavailable.
const KernelTable& kernels_for(Level level);

// Span conveniences over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);

}  // namespace quadsim::simd
