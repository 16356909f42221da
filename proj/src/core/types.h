// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_CORE_TYPES_H
#define FEELAB_CORE_TYPES_H

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace feelab {

using BlockHeight = int64_t;
using Satoshi = int64_t;
using WeightUnits = int64_t;

/** feerate (sat/vByte) = fee / (weight / 4). Throws InvalidInput on weight <= 0. */
double compute_feerate(Satoshi fee, WeightUnits weight);

/** fee (satoshi) = (weight / 4) * feerate. Throws InvalidInput on weight <= 0. */
double feerate_to_fee(WeightUnits weight, double feerate);

/**
 * One transfer record with its mempool lifecycle. entry_height is the height
 * of the chain tip when the transaction was first seen; confirm_height /
 * leave_height stay empty while it waits. leave_height without confirm_height
 * marks an eviction.
 */
struct Transaction {
    std::string txid;
    int32_t version{1};
    int64_t size{0}; // bytes
    WeightUnits weight{0};
    int32_t input_count{1};
    int32_t output_count{1};
    Satoshi fee{0};
    double feerate{0.0}; // sat/vByte
    BlockHeight entry_height{0};
    std::optional<BlockHeight> leave_height;
    std::optional<BlockHeight> confirm_height;
    int64_t first_seen_time{0}; // unix seconds
    std::optional<int64_t> confirm_time;

    bool confirmed() const { return confirm_height.has_value(); }
    bool evicted() const { return leave_height.has_value() && !confirm_height.has_value(); }

    /** Throws ValidationError on any invariant breach; context prefixes the message. */
    void validate(const std::string& context = {}) const;
};

/** Per-block network features. interval is seconds since the previous block. */
struct Block {
    BlockHeight height{0};
    int64_t timestamp{0}; // unix seconds
    int64_t interval{0};  // q, seconds
    int64_t size{0};      // bytes
    double difficulty{0.0};
    WeightUnits total_weight{0};
    int64_t tx_count{0};
    double mean_feerate{0.0}; // sat/vByte

    void validate(const std::string& context = {}) const;
};

/**
 * Ordered blocks plus the transaction table; the ground-truth replay source.
 * Immutable after build(); lookup indexes are prepared once.
 */
class ChainView {
public:
    ChainView() = default;

    /** Validates every invariant (throws ValidationError) and builds indexes. */
    static ChainView build(std::vector<Block> blocks, std::vector<Transaction> txs);

    const std::vector<Block>& blocks() const { return m_blocks; }
    const std::vector<Transaction>& transactions() const { return m_txs; }
    bool empty() const { return m_blocks.empty(); }
    BlockHeight tip_height() const { return m_blocks.empty() ? -1 : m_blocks.back().height; }

    const Block* block_at(BlockHeight height) const;
    const Transaction* find_tx(std::string_view txid) const;

    /** Indices of transactions confirmed exactly at the given height. */
    const std::vector<uint32_t>& confirmed_at(BlockHeight height) const;

    /** Indices of transactions with first_seen_time in (from, to], ascending by time. */
    std::vector<uint32_t> first_seen_between(int64_t from, int64_t to) const;

    /** New view truncated to blocks with height <= tip; drops txs entering later. */
    ChainView truncated(BlockHeight tip) const;

private:
    std::vector<Block> m_blocks; // ascending height
    std::vector<Transaction> m_txs;
    std::unordered_map<std::string, uint32_t> m_tx_index;
    std::unordered_map<BlockHeight, uint32_t> m_block_index;
    std::unordered_map<BlockHeight, std::vector<uint32_t>> m_confirmed_at;
    std::vector<uint32_t> m_by_first_seen; // tx indices sorted by (first_seen_time, index)

    void build_indexes();
    void validate() const;
};

/** Target transaction skeleton plus the expected confirmation horizon. */
struct EstimateRequest {
    Transaction tx_skeleton;                 // fee/feerate/confirmation fields unset
    std::optional<int> horizon_blocks;       // theta: BCore / MSLP / FENN
    std::optional<double> horizon_minutes;   // vartheta: BtcFlow

    void validate() const; // exactly one horizon set
};

} // namespace feelab

#endif // FEELAB_CORE_TYPES_H
