// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_INGEST_SYNTH_H
#define FEELAB_INGEST_SYNTH_H

#include <core/types.h>

#include <cstdint>

namespace feelab {

/**
 * Synthetic chain generator. Blocks arrive with exponential intervals; txs
 * arrive as a (optionally bursty, optionally drifting) Poisson stream with
 * log-normal feerates; each block greedily packs the highest-feerate pending
 * txs and stops at the first one that does not fit, so strict feerate
 * priority holds within every block. A fixed seed reproduces the chain byte
 * for byte.
 */
struct SynthConfig {
    uint64_t seed{1};
    int64_t n_blocks{225};
    double mean_block_interval{600.0}; // seconds
    WeightUnits block_weight_limit{4'000'000};
    double tx_arrival_rate{20.0}; // txs per minute, before burst modulation

    // feerate ~ exp(N(log_mu + drift * height_elapsed, log_sigma)), sat/vB
    double feerate_log_mu{3.0};
    double feerate_log_sigma{0.8};
    double feerate_drift_per_block{0.0};

    // tx weight ~ exp(N(mu, sigma)), clamped to [400, block_weight_limit/10]
    double weight_log_mu{7.6};
    double weight_log_sigma{0.6};

    // arrival-rate modulation: rate * (1 + amplitude * sin(2*pi*t/period))
    double burst_amplitude{0.0}; // in [0, 1)
    double burst_period_blocks{20.0};

    BlockHeight start_height{1};
    int64_t genesis_time{1'600'000'000};

    void validate() const; // throws InvalidInput
};

ChainView synth_generate(const SynthConfig& config);

} // namespace feelab

#endif // FEELAB_INGEST_SYNTH_H
