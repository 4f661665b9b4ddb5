#pragma once

#include <cstdint>
#include <random>

namespace dpci {

// Deterministic random stream. All sampling goes through explicit streams;
// normals are produced by inverse-CDF so a draw consumes exactly one
// engine output regardless of platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1); never returns an endpoint.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via inverse CDF (defined in linalg.cpp).
    double normal();

    bool bernoulli(double p) { return uniform() < p; }

    // 64-bit hash combine for deriving sub-streams, splitmix64 based.
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

private:
    std::mt19937_64 engine_;
};

}  // namespace dpci
