#pragma once

// Seeded generators for the property tests. Every test draws from its own
// fixed seed so failures reproduce.

#include <cstdint>
#include <cmath>
#include <random>

#include "optocav/rational.hpp"

namespace gen {

class Source {
public:
    explicit Source(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    /// p/q with q in [1, max_den] and value in [lo, hi].
    optocav::Rational rational(double lo, double hi, int max_den = 24) {
        const int q = integer(1, max_den);
        const int p_lo = static_cast<int>(std::ceil(lo * q));
        const int p_hi = static_cast<int>(std::floor(hi * q));
        if (p_hi < p_lo)
            return optocav::exact_rational(lo);
        return optocav::make_rational(integer(p_lo, p_hi), q);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace gen
