// SPDX-License-Identifier: Apache-2.0
//
// trsim: multiuser time-reversal precoding simulator for discrete multipath channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <random>

#include "trsim/common.hpp"

namespace trsim {

// Derives an independent stream seed from a base seed (splitmix64 mix).
// Distinct streams of the same base never collide in practice, and the
// mapping is a pure function, so ensembles are reproducible element-wise.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic random source. std::mt19937_64 has a fully specified output
// sequence; the distribution methods below are hand-rolled because the
// std::*_distribution classes are implementation-defined and would break
// cross-platform reproducibility.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound). bound must be > 0. Rejection sampling,
    // so the result is exactly uniform and platform-independent.
    std::uint64_t uniform_below(std::uint64_t bound);

    // Pair of independent standard normals (Box-Muller).
    void normal_pair(double &z0, double &z1);

    // Circularly symmetric complex normal with E|g|^2 = 1.
    cdouble complex_normal();

  private:
    std::mt19937_64 engine_;
};

}  // namespace trsim
