#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace taco {

// All randomness goes through these helpers. std::mt19937_64 output is
// pinned by the standard, and the derivations below avoid the
// implementation-defined std::*_distribution classes, so every sample is
// bit-identical across platforms and toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next() { return gen_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Modulo bias is irrelevant here; what matters
    // is that the mapping is fixed.
    uint64_t below(uint64_t n) { return gen_() % n; }

    // Standard normal via Box-Muller. Two uniforms per sample, no cached
    // second value, so the generator state advance is predictable.
    double normal();

    // Fisher-Yates. Deterministic replacement for std::shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace taco
