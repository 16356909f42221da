// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <fenn/features.h>

#include <core/errors.h>

#include <algorithm>

namespace feelab::fenn {

namespace {

/** Index of the block at `height` in chain.blocks(); -1 when absent. */
ptrdiff_t block_index_of(const ChainView& chain, BlockHeight height)
{
    const auto& blocks = chain.blocks();
    const auto it = std::lower_bound(blocks.begin(), blocks.end(), height,
                                     [](const Block& b, BlockHeight h) { return b.height < h; });
    if (it == blocks.end() || it->height != height) return -1;
    return it - blocks.begin();
}

void fill_network_row(const Block& block, double* row)
{
    row[0] = static_cast<double>(block.interval);
    row[1] = static_cast<double>(block.size);
    row[2] = block.difficulty;
    row[3] = static_cast<double>(block.total_weight);
    row[4] = static_cast<double>(block.tx_count);
    row[5] = block.mean_feerate;
}

} // namespace

FeatureSet extract_features(const ChainView& chain, const MempoolSnapshot& mempool, const Transaction& tx,
                            int theta, size_t seq_len)
{
    const ptrdiff_t tip_index = block_index_of(chain, mempool.height);
    if (tip_index < 0 || static_cast<size_t>(tip_index) + 1 < seq_len)
        throw EstimationError(EstimationError::Kind::InsufficientHistory,
                              "fenn: no " + std::to_string(seq_len) + "-block sequence ending at height " +
                                  std::to_string(mempool.height));

    FeatureSet features;
    features.tx = {static_cast<double>(tx.input_count), static_cast<double>(tx.output_count),
                   static_cast<double>(tx.size),        static_cast<double>(tx.weight),
                   static_cast<double>(tx.version),     static_cast<double>(theta)};
    features.mempool.assign(mempool.bucket_counts.begin(), mempool.bucket_counts.end());
    features.seq_len = seq_len;
    features.sequence.resize(seq_len * kNetworkFeatureDim);
    for (size_t s = 0; s < seq_len; ++s) {
        const Block& block = chain.blocks()[static_cast<size_t>(tip_index) - seq_len + 1 + s];
        fill_network_row(block, features.sequence.data() + s * kNetworkFeatureDim);
    }
    return features;
}

TrainingSet build_training_set(const ChainView& chain, const MempoolTimeline& timeline,
                               BlockHeight first_entry, BlockHeight last_entry, BlockHeight label_tip,
                               size_t seq_len)
{
    // Collect eligible rows first so the matrices can be sized once.
    std::vector<uint32_t> rows;
    for (uint32_t i = 0; i < chain.transactions().size(); ++i) {
        const Transaction& tx = chain.transactions()[i];
        if (!tx.confirm_height || *tx.confirm_height > label_tip) continue;
        if (tx.entry_height < first_entry || tx.entry_height > last_entry) continue;
        const ptrdiff_t tip_index = block_index_of(chain, tx.entry_height);
        if (tip_index < 0 || static_cast<size_t>(tip_index) + 1 < seq_len) continue; // lacks history
        rows.push_back(i);
    }

    const size_t buckets = timeline.at(first_entry).scheme.bucket_count();
    TrainingSet set;
    set.tx = nn::Tensor(rows.size(), kTxFeatureDim);
    set.mem = nn::Tensor(rows.size(), buckets);
    set.seq.assign(seq_len, nn::Tensor(rows.size(), kNetworkFeatureDim));
    set.fee.resize(rows.size());
    set.tx_index = rows;

    for (size_t r = 0; r < rows.size(); ++r) {
        const Transaction& tx = chain.transactions()[rows[r]];
        const int theta = static_cast<int>(*tx.confirm_height - tx.entry_height);
        const FeatureSet features =
            extract_features(chain, timeline.at(tx.entry_height), tx, theta, seq_len);
        for (size_t k = 0; k < kTxFeatureDim; ++k) set.tx(r, k) = features.tx[k];
        for (size_t k = 0; k < buckets; ++k) set.mem(r, k) = features.mempool[k];
        for (size_t s = 0; s < seq_len; ++s)
            for (size_t k = 0; k < kNetworkFeatureDim; ++k)
                set.seq[s](r, k) = features.sequence[s * kNetworkFeatureDim + k];
        set.fee[r] = static_cast<double>(tx.fee);
    }
    return set;
}

} // namespace feelab::fenn
