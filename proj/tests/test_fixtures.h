// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_TESTS_FIXTURES_H
#define FEELAB_TESTS_FIXTURES_H

#include <core/types.h>

#include <string>
#include <vector>

namespace feelab::test {

/** A consistent transaction; feerate derived from fee and weight. */
inline Transaction make_tx(const std::string& txid, WeightUnits weight, double feerate_target,
                           BlockHeight entry, std::optional<BlockHeight> confirm = std::nullopt,
                           int64_t first_seen = 0)
{
    Transaction tx;
    tx.txid = txid;
    tx.weight = weight;
    tx.size = (weight + 3) / 4;
    tx.fee = static_cast<Satoshi>(feerate_target * static_cast<double>(weight) / 4.0 + 0.5);
    tx.feerate = compute_feerate(tx.fee, tx.weight);
    tx.entry_height = entry;
    tx.first_seen_time = first_seen;
    if (confirm) {
        tx.confirm_height = confirm;
        tx.leave_height = confirm;
    }
    return tx;
}

inline Block make_block(BlockHeight height, int64_t timestamp, int64_t interval = 600)
{
    Block b;
    b.height = height;
    b.timestamp = timestamp;
    b.interval = interval;
    b.size = 1000;
    b.difficulty = 1.0e12;
    b.total_weight = 4000;
    b.tx_count = 1;
    b.mean_feerate = 10.0;
    return b;
}

/** n consecutive blocks from start_height, 600 s apart, starting at t0. */
inline std::vector<Block> make_blocks(BlockHeight start_height, size_t n, int64_t t0 = 1'600'000'000)
{
    std::vector<Block> blocks;
    for (size_t i = 0; i < n; ++i)
        blocks.push_back(make_block(start_height + static_cast<BlockHeight>(i),
                                    t0 + static_cast<int64_t>(i) * 600));
    return blocks;
}

} // namespace feelab::test

#endif // FEELAB_TESTS_FIXTURES_H
