// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <core/types.h>

#include <core/errors.h>

#include <algorithm>
#include <cmath>

namespace feelab {

double compute_feerate(Satoshi fee, WeightUnits weight)
{
    if (weight <= 0) throw InvalidInput("compute_feerate: weight must be positive, got " + std::to_string(weight));
    return static_cast<double>(fee) / (static_cast<double>(weight) / 4.0);
}

double feerate_to_fee(WeightUnits weight, double feerate)
{
    if (weight <= 0) throw InvalidInput("feerate_to_fee: weight must be positive, got " + std::to_string(weight));
    return static_cast<double>(weight) / 4.0 * feerate;
}

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& message)
{
    throw ValidationError(context.empty() ? message : context + ": " + message);
}

} // namespace

void Transaction::validate(const std::string& context) const
{
    if (weight <= 0) fail(context, "tx " + txid + ": weight must be positive");
    if (size <= 0) fail(context, "tx " + txid + ": size must be positive");
    if (fee < 0) fail(context, "tx " + txid + ": fee must be non-negative");
    if (input_count < 1) fail(context, "tx " + txid + ": input_count must be >= 1");
    if (output_count < 1) fail(context, "tx " + txid + ": output_count must be >= 1");
    const double expected = compute_feerate(fee, weight);
    const double scale = std::max({1.0, std::abs(expected), std::abs(feerate)});
    if (std::abs(feerate - expected) > 1e-9 * scale) {
        fail(context, "tx " + txid + ": feerate " + std::to_string(feerate) +
                          " inconsistent with fee/(weight/4) = " + std::to_string(expected));
    }
    if (confirm_height) {
        if (*confirm_height < entry_height)
            fail(context, "tx " + txid + ": confirm_height below entry_height");
        if (leave_height && *leave_height != *confirm_height)
            fail(context, "tx " + txid + ": leave_height differs from confirm_height");
    }
}

void Block::validate(const std::string& context) const
{
    if (interval < 0) fail(context, "block " + std::to_string(height) + ": interval must be >= 0");
    if (tx_count < 0) fail(context, "block " + std::to_string(height) + ": tx_count must be >= 0");
    if (size < 0) fail(context, "block " + std::to_string(height) + ": size must be >= 0");
    if (total_weight < 0) fail(context, "block " + std::to_string(height) + ": total_weight must be >= 0");
}

ChainView ChainView::build(std::vector<Block> blocks, std::vector<Transaction> txs)
{
    ChainView view;
    view.m_blocks = std::move(blocks);
    view.m_txs = std::move(txs);
    view.validate();
    view.build_indexes();
    return view;
}

void ChainView::validate() const
{
    for (size_t i = 0; i < m_blocks.size(); ++i) {
        m_blocks[i].validate("chain");
        if (i > 0 && m_blocks[i].height <= m_blocks[i - 1].height)
            throw ValidationError("chain: block heights not strictly increasing at height " +
                                  std::to_string(m_blocks[i].height));
    }
    for (const Transaction& tx : m_txs) {
        tx.validate("chain");
        if (tx.confirm_height) {
            const bool present = std::any_of(m_blocks.begin(), m_blocks.end(), [&](const Block& b) {
                return b.height == *tx.confirm_height;
            });
            if (!present)
                throw ValidationError("chain: tx " + tx.txid + " confirmed at height " +
                                      std::to_string(*tx.confirm_height) + " with no such block");
        }
    }
}

void ChainView::build_indexes()
{
    m_tx_index.reserve(m_txs.size());
    for (uint32_t i = 0; i < m_txs.size(); ++i) {
        auto [it, inserted] = m_tx_index.emplace(m_txs[i].txid, i);
        if (!inserted) throw ValidationError("chain: duplicate txid " + m_txs[i].txid);
        if (m_txs[i].confirm_height) m_confirmed_at[*m_txs[i].confirm_height].push_back(i);
    }
    for (uint32_t i = 0; i < m_blocks.size(); ++i) m_block_index.emplace(m_blocks[i].height, i);
    m_by_first_seen.resize(m_txs.size());
    for (uint32_t i = 0; i < m_txs.size(); ++i) m_by_first_seen[i] = i;
    std::sort(m_by_first_seen.begin(), m_by_first_seen.end(), [&](uint32_t a, uint32_t b) {
        if (m_txs[a].first_seen_time != m_txs[b].first_seen_time)
            return m_txs[a].first_seen_time < m_txs[b].first_seen_time;
        return a < b;
    });
}

const Block* ChainView::block_at(BlockHeight height) const
{
    auto it = m_block_index.find(height);
    return it == m_block_index.end() ? nullptr : &m_blocks[it->second];
}

const Transaction* ChainView::find_tx(std::string_view txid) const
{
    auto it = m_tx_index.find(std::string(txid));
    return it == m_tx_index.end() ? nullptr : &m_txs[it->second];
}

const std::vector<uint32_t>& ChainView::confirmed_at(BlockHeight height) const
{
    static const std::vector<uint32_t> kEmpty;
    auto it = m_confirmed_at.find(height);
    return it == m_confirmed_at.end() ? kEmpty : it->second;
}

std::vector<uint32_t> ChainView::first_seen_between(int64_t from, int64_t to) const
{
    auto lo = std::upper_bound(m_by_first_seen.begin(), m_by_first_seen.end(), from,
                               [&](int64_t t, uint32_t i) { return t < m_txs[i].first_seen_time; });
    auto hi = std::upper_bound(m_by_first_seen.begin(), m_by_first_seen.end(), to,
                               [&](int64_t t, uint32_t i) { return t < m_txs[i].first_seen_time; });
    return {lo, hi};
}

ChainView ChainView::truncated(BlockHeight tip) const
{
    std::vector<Block> blocks;
    for (const Block& b : m_blocks)
        if (b.height <= tip) blocks.push_back(b);
    std::vector<Transaction> txs;
    for (const Transaction& tx : m_txs) {
        if (tx.entry_height > tip) continue;
        Transaction copy = tx;
        if (copy.confirm_height && *copy.confirm_height > tip) {
            copy.confirm_height.reset();
            copy.confirm_time.reset();
        }
        if (copy.leave_height && *copy.leave_height > tip) copy.leave_height.reset();
        txs.push_back(std::move(copy));
    }
    return build(std::move(blocks), std::move(txs));
}

void EstimateRequest::validate() const
{
    if (horizon_blocks.has_value() == horizon_minutes.has_value())
        throw InvalidInput("EstimateRequest: exactly one of horizon_blocks / horizon_minutes must be set");
    if (horizon_blocks && *horizon_blocks <= 0)
        throw InvalidInput("EstimateRequest: horizon_blocks must be positive");
    if (horizon_minutes && *horizon_minutes <= 0.0)
        throw InvalidInput("EstimateRequest: horizon_minutes must be positive");
}

} // namespace feelab
