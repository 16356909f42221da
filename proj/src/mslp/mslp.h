// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_MSLP_MSLP_H
#define FEELAB_MSLP_MSLP_H

#include <core/mempool.h>
#include <core/types.h>
#include <ingest/reconstruct.h>

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

namespace feelab::mslp {

/**
 * Queue position of a feerate in the mempool: the weight queued at or above
 * it, packed into BLOCK-sized virtual blocks and SLICE-sized slices. Both
 * indices are 1-based; a queue that exactly fills k blocks positions the next
 * transaction in block k+1.
 */
struct VirtualPosition {
    int64_t block{1};
    int64_t slice{1};
};

/** One labeled observation: did the tx confirm no later than its virtual block said. */
struct Instance {
    double feerate{0.0};
    int64_t loc_b{1};
    int64_t loc_s{1};
    int hit{0};
};

struct MslpConfig {
    WeightUnits block_capacity{4'000'000};
    WeightUnits slice_capacity{400'000}; // must divide block_capacity
    int epochs{200};
    double learning_rate{0.05};
    uint64_t seed{7};
    double search_step{0.1};
    int max_search_steps{10'000};

    void validate() const; // throws InvalidInput
};

VirtualPosition virtual_position(const ChainView& chain, const MempoolSnapshot& mempool, double feerate,
                                 const MslpConfig& config);

/**
 * One instance per (tx, height) pair while the tx waits: position taken from
 * the snapshot at that height, hit = 1 iff loc_b >= confirm_height - height.
 * Only txs whose confirmation is visible by last_height are labeled.
 */
std::vector<Instance> build_training_instances(const ChainView& chain, const MempoolTimeline& timeline,
                                               BlockHeight first_height, BlockHeight last_height,
                                               const MslpConfig& config);

/** Range index for a virtual-block position: [1-4], [5-8], [9-12], [13+]. */
int range_of(int64_t loc_b);
inline constexpr int kRangeCount = 4;

/**
 * Four single-layer perceptrons over [feerate, loc_b, loc_s] (standardized per
 * range), thresholded at activation >= 0. estimate() walks the 0.1 feerate
 * grid upward from the seed position until the routed model accepts.
 */
class Model {
public:
    static Model train(const std::vector<Instance>& instances, const MslpConfig& config);

    /** Throws EstimationError: OutOfBoundary, UntrainedModel or MaxFeerateReached. */
    double estimate(const ChainView& chain, const MempoolSnapshot& mempool, int theta,
                    const MslpConfig& config) const;

    bool range_trained(int range) const { return m_ranges.at(static_cast<size_t>(range)).trained; }

    /** Raw activation of one range's perceptron on [feerate, loc_b, loc_s]. */
    double activation(int range, double feerate, double loc_b, double loc_s) const;
    bool predicts_hit(int range, double feerate, double loc_b, double loc_s) const
    {
        return activation(range, feerate, loc_b, loc_s) >= 0.0;
    }

    void save(const std::filesystem::path& path) const;
    static Model load(const std::filesystem::path& path);

private:
    struct RangeModel {
        bool trained{false};
        std::array<double, 3> weights{};
        double bias{0.0};
        std::array<double, 3> mean{};
        std::array<double, 3> scale{1.0, 1.0, 1.0};
    };
    std::array<RangeModel, kRangeCount> m_ranges;
};

} // namespace feelab::mslp

#endif // FEELAB_MSLP_MSLP_H
