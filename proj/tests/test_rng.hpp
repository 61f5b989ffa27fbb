#pragma once

#include <cstdint>
#include <random>

// Platform-stable uniforms: map the raw 64-bit stream ourselves instead of
// relying on std::uniform_real_distribution.
struct TestRng {
    std::mt19937_64 gen;
    explicit TestRng(uint64_t seed) : gen(seed) {}
    double uniform() { return (gen() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};
