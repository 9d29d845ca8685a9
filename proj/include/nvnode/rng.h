// Copyright 2026 The nvnode Authors
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

#ifndef NVNODE_RNG_H
#define NVNODE_RNG_H

#include <cstdint>
#include <random>

namespace nvnode {

/// SplitMix64 finalizer. Used to turn (seed, stream, index) triples into
/// well-separated engine seeds.
constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based seed split. The seed of sub-stream `index` depends only on
/// (seed, stream, index), so any single shot can be replayed in isolation.
constexpr uint64_t derive_seed(uint64_t seed, uint64_t stream, uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) + index);
}

/// Well-known stream tags so that different experiment kinds never share
/// random sequences for the same master seed.
namespace streams {
constexpr uint64_t kGhz = 0x6768;
constexpr uint64_t kQec = 0x716563;
constexpr uint64_t kBootstrap = 0x626f6f74;
constexpr uint64_t kFit = 0x666974;
constexpr uint64_t kTest = 0x74657374;
constexpr uint64_t kSweep = 0x7377;
constexpr uint64_t kInject = 0x696e6a;
}  // namespace streams

class Rng {
   public:
    explicit Rng(uint64_t seed) : engine_(seed) {}
    Rng(uint64_t seed, uint64_t stream, uint64_t index) : engine_(derive_seed(seed, stream, index)) {}

    /// Uniform double in [0, 1).
    double uniform() {
        // 53 random mantissa bits; avoids implementation-defined distributions.
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() { return std::normal_distribution<double>{}(engine_); }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return n == 0 ? 0 : static_cast<uint64_t>(uniform() * static_cast<double>(n)) % n; }

    std::mt19937_64 &engine() { return engine_; }

   private:
    std::mt19937_64 engine_;
};

}  // namespace nvnode

#endif
