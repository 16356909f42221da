// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_CORE_MEMPOOL_H
#define FEELAB_CORE_MEMPOOL_H

#include <core/bucket.h>
#include <core/types.h>

#include <cstdint>
#include <vector>

namespace feelab {

/**
 * The unconfirmed transaction set as of a block height, with per-bucket
 * aggregates under the scheme it was built with. Members are indices into the
 * owning ChainView's transaction table, kept sorted for determinism.
 */
struct MempoolSnapshot {
    BlockHeight height{-1};
    BucketScheme scheme;
    std::vector<uint32_t> members;       // ascending tx indices
    std::vector<int64_t> bucket_counts;  // per bucket
    std::vector<double> bucket_weights;  // per bucket, weight units

    size_t size() const { return members.size(); }
    bool contains(const ChainView& chain, std::string_view txid) const;

    /** Recompute aggregates from members; throws ValidationError on mismatch. */
    void check_aggregates(const ChainView& chain) const;
};

} // namespace feelab

#endif // FEELAB_CORE_MEMPOOL_H
