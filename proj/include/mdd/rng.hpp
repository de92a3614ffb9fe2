// Copyright 2026 The MDD Toolkit Authors
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
#include <initializer_list>
#include <cmath>
#include <random>

namespace mdd {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation. Every Monte-Carlo trial gets its own stream
/// keyed by (base, counters...), so results never depend on how trials are
/// distributed over workers.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> counters) {
    std::uint64_t h = splitmix64(base);
    for (auto c : counters) {
        h = splitmix64(h ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> counters = {}) {
    return Rng(derive_seed(base, counters));
}

/// Uniform double in [0, 1) built from the raw 64-bit stream (53 mantissa bits),
/// identical across standard library implementations.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal deviate via Box-Muller on `uniform01`.
inline double standard_normal(Rng &rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Binomial(n, p) by direct Bernoulli summation; n stays at shot-count scale.
inline std::uint64_t binomial(Rng &rng, std::uint64_t n, double p) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        k += uniform01(rng) < p ? 1 : 0;
    }
    return k;
}

}  // namespace mdd
