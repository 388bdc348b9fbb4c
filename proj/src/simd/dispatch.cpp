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

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace quadsim::simd {
namespace {

bool cpu_supports(Level level) noexcept {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
#if QUADSIM_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Level::Neon:
      return neon_kernels() != nullptr;
  }
  return false;
}

const KernelTable* table_for(Level level) noexcept {
  switch (level) {
    case Level::Scalar:
      return &scalar_kernels();
    case Level::Avx2:
      return avx2_kernels();
    case Level::Neon:
      return neon_kernels();
  }
  return nullptr;
}

const KernelTable& select() noexcept {
  if (const char* env = std::getenv("QUADSIM_SIMD")) {
    const std::string want(env);
    for (Level level : {Level::Scalar, Level::Avx2, Level::Neon}) {
      if (want == level_name(level) && cpu_supports(level)) {
        return *table_for(level);
      }
    }
  }
  for (Level level : {Level::Avx2, Level::Neon}) {
    if (cpu_supports(level)) return *table_for(level);
  }
  return scalar_kernels();
}

}  // namespace

std::string_view level_name(Level level) noexcept {
  switch (level) {
    case Level::Scalar:
      return "scalar";
    case Level::Avx2:
      return "avx2";
    case Level::Neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = select();
  return table;
}

std::vector<Level> available_levels() {
  std::vector<Level> out;
  for (Level level : {Level::Scalar, Level::Avx2, Level::Neon}) {
    if (cpu_supports(level)) out.push_back(level);
  }
  return out;
}

const KernelTable& kernels_for(Level level) {
  if (!cpu_supports(level)) {
    throw std::invalid_argument("SIMD level not available: " +
                                std::string(level_name(level)));
  }
  return *table_for(level);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return active_kernels().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) {
  return active_kernels().dot(a.data(), a.data(), a.size());
}

}  // namespace quadsim::simd
