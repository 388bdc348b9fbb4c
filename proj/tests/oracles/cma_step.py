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
"""Golden CMA-ES update steps, evaluated in 50-digit arithmetic.

The printed values are frozen into tests/test_cma.cpp. Re-run only when the
update rule itself changes.
"""

import mpmath as mp

mp.mp.dps = 50


def hyper(d, k):
    raw = [mp.log(k + mp.mpf(1) / 2) - mp.log(i) for i in range(1, k + 1)]
    w = [r / mp.fsum(raw) for r in raw]
    mu = 1 / mp.fsum([x * x for x in w])
    c1 = 2 / ((d + mp.mpf("1.3")) ** 2 + mu)
    cs = (mu + 2) / (d + mu + 5)
    cc = (4 + mu / d) / (d + 4 + 2 * mu / d)
    cmu = min(1 - c1, 2 * (mu - 2 + 1 / mu) / ((d + 2) ** 2 + mu))
    ds = 1 + 2 * max(0, mp.sqrt((mu - 1) / (d + 1)) - 1) + cs
    return w, mu, c1, cs, cc, cmu, ds


def step(mean, c, sigma, pc, ps, g, xs):
    d = len(mean)
    k = len(xs)
    w, mu, c1, cs, cc, cmu, ds = hyper(d, k)
    mean = mp.matrix(mean)
    c = mp.matrix(c)
    pc = mp.matrix(pc)
    ps = mp.matrix(ps)
    xs = [mp.matrix(x) for x in xs]
    z = [(x - mean) / sigma for x in xs]
    zw = sum((w[i] * z[i] for i in range(1, k)), w[0] * z[0])
    new_mean = sum((w[i] * xs[i] for i in range(1, k)), w[0] * xs[0])
    ev, q = mp.eigsy(c)
    inv_sqrt = q * mp.diag([1 / mp.sqrt(e) for e in ev]) * q.T
    ps = (1 - cs) * ps + mp.sqrt(cs * (2 - cs) * mu) * (inv_sqrt * zw)
    chi = mp.sqrt(d) * (1 - mp.mpf(1) / (4 * d) + mp.mpf(1) / (21 * d * d))
    norm = mp.norm(ps)
    new_sigma = sigma * mp.exp((cs / ds) * (norm / chi - 1))
    decay = mp.sqrt(1 - (1 - cs) ** (2 * (g + 1)))
    h = 1 if norm / decay < (mp.mpf("1.4") + mp.mpf(2) / (d + 1)) * chi else 0
    pc = (1 - cc) * pc + h * mp.sqrt(cc * (2 - cc) * mu) * zw
    delta = (1 - h) * cc * (2 - cc)
    rank_mu = sum((w[i] * z[i] * z[i].T for i in range(1, k)),
                  w[0] * z[0] * z[0].T)
    c = (1 + c1 * delta - c1 - cmu * mp.fsum(w)) * c + c1 * pc * pc.T \
        + cmu * rank_mu
    return new_mean, c, new_sigma, pc, ps, h


def fmt(v):
    return mp.nstr(v, 20, strip_zeros=False, min_fixed=-30, max_fixed=30)


def emit(name, args):
    mean, c, sigma, pc, ps, h = step(*args)
    print(f"// {name}: h_sigma = {h}")
    print(f"mean = {{{fmt(mean[0])}, {fmt(mean[1])}}}")
    print(f"shape = {{{fmt(c[0, 0])}, {fmt(c[0, 1])}, {fmt(c[1, 0])}, "
          f"{fmt(c[1, 1])}}}")
    print(f"sigma = {fmt(sigma)}")
    print(f"path_c = {{{fmt(pc[0])}, {fmt(pc[1])}}}")
    print(f"path_sigma = {{{fmt(ps[0])}, {fmt(ps[1])}}}")


S = mp.mpf
CASE_A = (
    [S("0.4"), S("0.6")],
    [[S("1.2"), S("0.3")], [S("0.3"), S("0.8")]],
    S("0.3"),
    [S("0.1"), S("-0.2")],
    [S("0.05"), S("0.15")],
    3,
    [[S("0.5"), S("0.55")], [S("0.3"), S("0.7")]],
)
# Large conjugate path at g = 0 so the stall indicator switches off.
CASE_B = (
    [S("0.25"), S("0.75")],
    [[S("0.9"), S("-0.2")], [S("-0.2"), S("1.1")]],
    S("0.2"),
    [S("0.3"), S("0.1")],
    [S("2.5"), S("-1.5")],
    0,
    [[S("0.45"), S("0.6")], [S("0.1"), S("0.95")]],
)

if __name__ == "__main__":
    w, mu, c1, cs, cc, cmu, ds = hyper(2, 2)
    print("// hyperparameters D=2 K=2")
    print(f"w = {{{fmt(w[0])}, {fmt(w[1])}}} mu_eff = {fmt(mu)}")
    print(f"c1 = {fmt(c1)} c_sigma = {fmt(cs)} c_c = {fmt(cc)} "
          f"c_mu = {fmt(cmu)} d_sigma = {fmt(ds)}")
    emit("case A", CASE_A)
    emit("case B", CASE_B)
