// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <ingest/reconstruct.h>

#include <core/errors.h>

#include <algorithm>
#include <limits>
#include <map>

namespace feelab {

namespace {

bool in_mempool_at(const Transaction& tx, BlockHeight height)
{
    if (tx.entry_height > height) return false;
    if (tx.confirm_height && *tx.confirm_height <= height) return false;
    if (tx.leave_height && *tx.leave_height <= height) return false;
    return true;
}

MempoolSnapshot make_snapshot(const ChainView& chain, BlockHeight height, const BucketScheme& scheme,
                              std::vector<uint32_t> members)
{
    MempoolSnapshot snap;
    snap.height = height;
    snap.scheme = scheme;
    snap.members = std::move(members);
    snap.bucket_counts.assign(scheme.bucket_count(), 0);
    snap.bucket_weights.assign(scheme.bucket_count(), 0.0);
    for (uint32_t i : snap.members) {
        const Transaction& tx = chain.transactions()[i];
        const size_t b = scheme.index_of(tx.feerate);
        snap.bucket_counts[b] += 1;
        snap.bucket_weights[b] += static_cast<double>(tx.weight);
    }
    return snap;
}

} // namespace

MempoolSnapshot reconstruct_mempool(const ChainView& chain, BlockHeight height, const BucketScheme& scheme)
{
    if (height > chain.tip_height())
        throw InvalidInput("reconstruct_mempool: height " + std::to_string(height) +
                           " beyond tip " + std::to_string(chain.tip_height()));
    std::vector<uint32_t> members;
    for (uint32_t i = 0; i < chain.transactions().size(); ++i) {
        if (in_mempool_at(chain.transactions()[i], height)) members.push_back(i);
    }
    return make_snapshot(chain, height, scheme, std::move(members));
}

MempoolTimeline::MempoolTimeline(const ChainView& chain, BlockHeight first, BlockHeight last,
                                 const BucketScheme& scheme)
    : m_first(first), m_last(last)
{
    if (last > chain.tip_height())
        throw InvalidInput("MempoolTimeline: last height beyond tip");
    if (first > last) throw InvalidInput("MempoolTimeline: empty height range");

    // Sweep heights once: activate txs by entry height, retire by confirm/leave.
    std::map<BlockHeight, std::vector<uint32_t>> entering;
    std::map<BlockHeight, std::vector<uint32_t>> leaving;
    std::vector<uint32_t> active;
    for (uint32_t i = 0; i < chain.transactions().size(); ++i) {
        const Transaction& tx = chain.transactions()[i];
        BlockHeight gone = std::numeric_limits<BlockHeight>::max();
        if (tx.confirm_height) gone = std::min(gone, *tx.confirm_height);
        if (tx.leave_height) gone = std::min(gone, *tx.leave_height);
        if (gone <= first) continue; // retired before the window
        if (tx.entry_height <= first) {
            active.push_back(i);
        } else if (tx.entry_height <= last) {
            entering[tx.entry_height].push_back(i);
        } else {
            continue;
        }
        if (gone <= last) leaving[gone].push_back(i);
    }

    m_snapshots.reserve(static_cast<size_t>(last - first + 1));
    std::vector<uint32_t> scratch;
    for (BlockHeight h = first; h <= last; ++h) {
        if (h > first) {
            if (auto it = entering.find(h); it != entering.end())
                active.insert(active.end(), it->second.begin(), it->second.end());
            if (auto it = leaving.find(h); it != leaving.end()) {
                scratch.assign(it->second.begin(), it->second.end());
                std::sort(scratch.begin(), scratch.end());
                std::erase_if(active, [&](uint32_t i) {
                    return std::binary_search(scratch.begin(), scratch.end(), i);
                });
            }
        }
        std::vector<uint32_t> members = active;
        std::sort(members.begin(), members.end());
        m_snapshots.push_back(make_snapshot(chain, h, scheme, std::move(members)));
    }
}

const MempoolSnapshot& MempoolTimeline::at(BlockHeight height) const
{
    if (height < m_first || height > m_last)
        throw InvalidInput("MempoolTimeline: height " + std::to_string(height) + " outside window");
    return m_snapshots[static_cast<size_t>(height - m_first)];
}

} // namespace feelab
