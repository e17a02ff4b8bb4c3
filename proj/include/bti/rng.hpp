#pragma once

#include <cmath>
#include <cstdint>

namespace bti {

/**
 * Counter-based 64-bit generator (splitmix64 finalizer over seed + counter).
 *
 * Draw k of stream `seed` is mix64(seed + (k+1)*PHI64), so any draw can be
 * produced without generating the ones before it and the stream is identical
 * on every platform with 64-bit integers. Consumers document their counter
 * layout; gen_ensemble uses counters 4*i .. 4*i+2 for trap i (tau_c, tau_e,
 * field threshold), leaving 4*i+3 reserved.
 */
struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t mix64(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix64(seed + (counter + 1) * 0x9E3779B97F4A7C15ULL);
    }

    // Uniform in [0, 1), 53 significant bits.
    double uniform01(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform01(counter);
    }

    // Log-uniform over [lo, hi], lo > 0. Degenerate ranges collapse to lo.
    double log_uniform(std::uint64_t counter, double lo, double hi) const {
        if (!(hi > lo)) return lo;
        const double llo = std::log(lo);
        return std::exp(llo + (std::log(hi) - llo) * uniform01(counter));
    }

    // Standard normal via Box-Muller; consumes counters 2k and 2k+1.
    double normal(std::uint64_t pair_index) const {
        const double u1 = uniform01(2 * pair_index);
        const double u2 = uniform01(2 * pair_index + 1);
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(6.283185307179586 * u2);
    }
};

}
