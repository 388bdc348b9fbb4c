#!/usr/bin/env python3
# Copyright 2026 The quadsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference percentile bootstrap for a two-cost, all-global trial set.

50 trials cost 100 and 50 cost 300. With every trial global, o_total of a
resample is its mean cost, i.e. 100 + 2 B with B ~ Binomial(100, 1/2). Prints
the 5th/95th percentiles from 10^5 resamples and the exact binomial
quantiles; the values are frozen into tests/test_harness.cpp.
"""

import numpy as np
from scipy.stats import binom

costs = np.array([100.0] * 50 + [300.0] * 50)
rng = np.random.default_rng(20261016)
idx = rng.integers(0, len(costs), size=(100_000, len(costs)))
means = costs[idx].mean(axis=1)
print("resampled 5%%: %.4f  95%%: %.4f" % tuple(np.percentile(means, [5, 95])))
print("binomial  5%%: %.4f  95%%: %.4f" % (100 + 2 * binom.ppf(0.05, 100, 0.5),
                                           100 + 2 * binom.ppf(0.95, 100, 0.5)))
