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
#include <random>
#include <string_view>

namespace quadsim {

using Rng = std::mt19937_64;

// Stateless 64-bit finalizer (SplitMix64 output function).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for one trial; depends only on its coordinates in the plan, so trials
// can run in any order or in parallel.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::string_view method,
                                   std::string_view function, int dim,
                                   std::uint64_t trial) noexcept {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ hash_string(method));
  h = mix64(h ^ hash_string(function));
  h = mix64(h ^ static_cast<std::uint64_t>(dim));
  return mix64(h ^ trial);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace quadsim
