// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_INGEST_RECONSTRUCT_H
#define FEELAB_INGEST_RECONSTRUCT_H

#include <core/mempool.h>
#include <core/types.h>

#include <unordered_map>

namespace feelab {

/**
 * Mempool membership at a height: transactions that have entered (h_e <=
 * height) and have neither confirmed nor left at or before it. Direct filter
 * over the whole transaction table; the authoritative definition.
 * Throws InvalidInput when height exceeds the chain tip.
 */
MempoolSnapshot reconstruct_mempool(const ChainView& chain, BlockHeight height,
                                    const BucketScheme& scheme = BucketScheme::geometric());

/**
 * Snapshots for every height in [first, last], built in one incremental sweep.
 * Same contents as reconstruct_mempool at each height (tested against it),
 * without the per-height full-table scan.
 */
class MempoolTimeline {
public:
    MempoolTimeline(const ChainView& chain, BlockHeight first, BlockHeight last,
                    const BucketScheme& scheme = BucketScheme::geometric());

    const MempoolSnapshot& at(BlockHeight height) const;
    BlockHeight first_height() const { return m_first; }
    BlockHeight last_height() const { return m_last; }

private:
    BlockHeight m_first;
    BlockHeight m_last;
    std::vector<MempoolSnapshot> m_snapshots;
};

} // namespace feelab

#endif // FEELAB_INGEST_RECONSTRUCT_H
