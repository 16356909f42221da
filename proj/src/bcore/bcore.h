// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_BCORE_BCORE_H
#define FEELAB_BCORE_BCORE_H

#include <core/bucket.h>
#include <core/mempool.h>
#include <core/types.h>

#include <vector>

namespace feelab::bcore {

/**
 * Exponentially decayed per-bucket confirmation statistics for one tracked
 * horizon. Replaying a block multiplies every decayed quantity by the decay
 * and adds the block's confirmations with weight one, so a tx confirmed at
 * h_c carries decay^(tip - h_c). Confirmations slower than max_target are
 * ignored. Unconfirmed counts are plain (undecayed) tallies recomputed from
 * the tip mempool.
 */
struct HorizonStats {
    int max_target{24};  // longest tracked confirmation interval (blocks)
    double decay{0.998}; // per-block multiplier

    std::vector<double> tx_ct_avg;              // decayed confirmed count, per bucket
    std::vector<double> fee_sum_avg;            // decayed feerate sum, per bucket
    std::vector<std::vector<double>> conf_avg;  // [target-1][bucket]: confirmed within target
    std::vector<std::vector<double>> tx_un_ct;  // [target-1][bucket]: waiting >= target at tip

    void reset(size_t buckets);
    void decay_once();

    /** 0 <= confAvg <= txCtAvg per bucket/target, confAvg non-decreasing in target. */
    void check_invariants() const;
};

enum class Era {
    Pre15,  // single horizon, decay 0.998, targets up to 24 blocks
    Post15, // short/medium/long horizons, 5% buckets, evictions tracked
};

enum class ResultMode {
    Conservative, // max across applicable horizons
    Economical,   // shortest applicable horizon
};

struct BCoreConfig {
    Era era{Era::Post15};
    ResultMode mode{ResultMode::Conservative};
    double sufficiency{10.0};   // p1: decayed count that makes a bucket set testable
    double success_ratio{0.95}; // p2: required within-target confirmation ratio
    BucketScheme scheme = BucketScheme::geometric();
};

/** Horizon layout for a config: {(max_target, decay), ...} shortest first. */
std::vector<std::pair<int, double>> horizon_layout(const BCoreConfig& config);

/**
 * The threshold scan over one horizon's stats: walk buckets from the highest
 * feerate down, batching until the decayed count reaches p1; keep extending
 * while each batch's success ratio clears p2; answer from the median-count
 * bucket of the last passing batch. Throws EstimationError(InsufficientData)
 * when no batch ever both fills and passes.
 */
double estimate_from_stats(const HorizonStats& stats, int target, const BCoreConfig& config);

/**
 * Replay accumulator plus result-mode logic across horizons. Feed blocks in
 * ascending height order via advance_to(); set_tip_mempool() refreshes the
 * unconfirmed counts before estimating.
 */
class Estimator {
public:
    explicit Estimator(BCoreConfig config = {});

    /** Replay confirmations of blocks in (current, tip]; first call starts at the chain base. */
    void advance_to(const ChainView& chain, BlockHeight tip);

    /** Recompute txUnCt from the mempool (plus evictions, post-v0.15) at the current tip. */
    void set_tip_mempool(const ChainView& chain, const MempoolSnapshot& mempool);

    /** Convenience: advance to chain tip and take its reconstructed mempool. */
    void fit(const ChainView& chain, const MempoolSnapshot& tip_mempool);

    double estimate(int target) const; // throws EstimationError(InsufficientData)

    const std::vector<HorizonStats>& horizons() const { return m_horizons; }
    const BCoreConfig& config() const { return m_config; }
    BlockHeight tip() const { return m_tip; }

private:
    BCoreConfig m_config;
    std::vector<HorizonStats> m_horizons; // shortest first
    BlockHeight m_tip{-1};
    bool m_started{false};
};

} // namespace feelab::bcore

#endif // FEELAB_BCORE_BCORE_H
