#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

namespace dsmr {

// Deterministic random source. All sampling helpers are implemented on top of
// the raw 64-bit stream so that results do not depend on the standard
// library's distribution internals; a given seed reproduces the same sequence
// on any platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    // Independent child stream, e.g. one per epoch or per scene.
    static Rng derive(uint64_t seed, uint64_t stream) {
        return Rng(mix(mix(seed) ^ mix(stream ^ 0x9e3779b97f4a7c15ull)));
    }

    uint64_t next() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [lo, hi], inclusive. Bitmask rejection keeps the
    // draw unbiased.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        const uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
        if (range == 0) return static_cast<int64_t>(next()); // full 64-bit span
        const uint64_t mask = (range <= 1) ? 0 : (~0ull >> std::countl_zero(range - 1));
        uint64_t v;
        do {
            v = next() & mask;
        } while (v >= range);
        return lo + static_cast<int64_t>(v);
    }

    // Standard normal via Box-Muller. The second variate of the pair is
    // discarded to keep the state a pure function of the draw count.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static uint64_t mix(uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
};

} // namespace dsmr
