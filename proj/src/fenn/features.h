// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_FENN_FEATURES_H
#define FEELAB_FENN_FEATURES_H

#include <core/bucket.h>
#include <core/mempool.h>
#include <core/types.h>
#include <ingest/reconstruct.h>
#include <nn/tensor.h>

#include <array>
#include <vector>

namespace feelab::fenn {

inline constexpr size_t kTxFeatureDim = 6;      // inputs, outputs, size, weight, version, theta
inline constexpr size_t kNetworkFeatureDim = 6; // interval, size, difficulty, weight, count, mean feerate

/** Raw (unstandardized) features for one estimate. */
struct FeatureSet {
    std::array<double, kTxFeatureDim> tx{};
    std::vector<double> mempool;          // per-bucket counts
    std::vector<double> sequence;         // seq_len × kNetworkFeatureDim, oldest first
    size_t seq_len{0};
};

/**
 * Features as of the snapshot's height: the tx skeleton plus horizon, the
 * bucketed mempool counts, and the trailing seq_len blocks ending at that
 * height. Throws EstimationError(InsufficientHistory) when fewer blocks
 * exist.
 */
FeatureSet extract_features(const ChainView& chain, const MempoolSnapshot& mempool, const Transaction& tx,
                            int theta, size_t seq_len);

/** Column-major training matrices plus fee targets, one row per instance. */
struct TrainingSet {
    nn::Tensor tx;                 // n × kTxFeatureDim
    nn::Tensor mem;                // n × buckets
    std::vector<nn::Tensor> seq;   // seq_len tensors, each n × kNetworkFeatureDim
    std::vector<double> fee;       // satoshi
    std::vector<uint32_t> tx_index; // provenance, aligned with rows

    size_t size() const { return fee.size(); }
};

/**
 * One instance per confirmed transaction entering in [first_entry,
 * last_entry] whose confirmation is visible by last_entry's view
 * (confirm_height <= label_tip) and whose entry height has a full block
 * sequence. theta is the realized interval, the target is the paid fee.
 */
TrainingSet build_training_set(const ChainView& chain, const MempoolTimeline& timeline,
                               BlockHeight first_entry, BlockHeight last_entry, BlockHeight label_tip,
                               size_t seq_len);

} // namespace feelab::fenn

#endif // FEELAB_FENN_FEATURES_H
