#pragma once

#include <cstdint>
#include <random>

namespace liketally {

// Seedable random source with samplers whose output depends only on the
// mt19937_64 bit stream, which the C++ standard pins exactly. The standard
// library's distribution objects are implementation-defined, so every
// transform here is spelled out; identical seeds give identical draws on
// any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform on [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1), never exactly zero (safe to take logs).
    double uniform_open01();

    bool bernoulli(double p) { return uniform01() < p; }

    // Marsaglia polar method.
    double normal();

    double exponential() { return -std::log(uniform_open01()); }

    // Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
    double gamma(double shape, double scale);

    // Knuth's product method below lambda = 30, Hormann's PTRS above.
    long long poisson(double lambda);

    // Uniform integer in [lo, hi] by scaling (lo <= hi).
    long long uniform_int(long long lo, long long hi);

private:
    std::mt19937_64 engine_;
};

}  // namespace liketally
