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

#include "quadsim/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define QUADSIM_HAVE_AVX2 1
#else
#define QUADSIM_HAVE_AVX2 0
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define QUADSIM_HAVE_NEON 1
#else
#define QUADSIM_HAVE_NEON 0
#endif

namespace quadsim::simd {

// nullptr when the variant was not compiled for this architecture.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

}  // namespace quadsim::simd
