// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_CORE_RNG_H
#define FEELAB_CORE_RNG_H

#include <cmath>
#include <cstdint>
#include <random>

namespace feelab {

/**
 * Deterministic random source. mt19937_64 is bit-specified by the standard;
 * the samplers below are inverse-CDF / Box-Muller so that a seed reproduces
 * the same stream on every platform (std::*_distribution is
 * implementation-defined and would not).
 */
class Rng {
public:
    explicit Rng(uint64_t seed) : m_gen(seed) {}

    uint64_t next_u64() { return m_gen(); }

    /** Uniform in [0, 1). */
    double uniform() { return static_cast<double>(m_gen() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /** Uniform integer in [lo, hi], inclusive. */
    int64_t uniform_int(int64_t lo, int64_t hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        // rejection sampling keeps the draw unbiased
        const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t x;
        do {
            x = m_gen();
        } while (x >= limit);
        return lo + static_cast<int64_t>(x % span);
    }

    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    double normal() {
        if (m_has_spare) {
            m_has_spare = false;
            return m_spare;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        m_spare = radius * std::sin(angle);
        m_has_spare = true;
        return radius * std::cos(angle);
    }

    double lognormal(double log_mu, double log_sigma) {
        return std::exp(log_mu + log_sigma * normal());
    }

    /** Knuth-style Poisson draw; fine for the small means used here. */
    int64_t poisson(double mean) {
        const double limit = std::exp(-mean);
        int64_t count = -1;
        double prod = 1.0;
        do {
            ++count;
            prod *= uniform();
        } while (prod > limit);
        return count;
    }

private:
    std::mt19937_64 m_gen;
    bool m_has_spare{false};
    double m_spare{0.0};
};

} // namespace feelab

#endif // FEELAB_CORE_RNG_H
