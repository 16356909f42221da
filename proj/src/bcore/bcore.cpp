// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <bcore/bcore.h>

#include <core/errors.h>

#include <algorithm>
#include <cmath>

namespace feelab::bcore {

void HorizonStats::reset(size_t buckets)
{
    tx_ct_avg.assign(buckets, 0.0);
    fee_sum_avg.assign(buckets, 0.0);
    conf_avg.assign(static_cast<size_t>(max_target), std::vector<double>(buckets, 0.0));
    tx_un_ct.assign(static_cast<size_t>(max_target), std::vector<double>(buckets, 0.0));
}

void HorizonStats::decay_once()
{
    for (double& v : tx_ct_avg) v *= decay;
    for (double& v : fee_sum_avg) v *= decay;
    for (auto& row : conf_avg)
        for (double& v : row) v *= decay;
}

void HorizonStats::check_invariants() const
{
    for (size_t t = 0; t < conf_avg.size(); ++t) {
        for (size_t b = 0; b < conf_avg[t].size(); ++b) {
            if (conf_avg[t][b] < -1e-12 || conf_avg[t][b] > tx_ct_avg[b] + 1e-9)
                throw ValidationError("bcore: confAvg outside [0, txCtAvg]");
            if (t > 0 && conf_avg[t][b] + 1e-12 < conf_avg[t - 1][b])
                throw ValidationError("bcore: confAvg decreasing in target");
        }
    }
}

std::vector<std::pair<int, double>> horizon_layout(const BCoreConfig& config)
{
    if (config.era == Era::Pre15) return {{24, 0.998}};
    // Post v0.15: short/medium/long horizons; decay chosen so its half-life
    // spans the horizon.
    return {{12, std::pow(0.5, 1.0 / 12.0)},
            {48, std::pow(0.5, 1.0 / 48.0)},
            {1008, std::pow(0.5, 1.0 / 1008.0)}};
}

double estimate_from_stats(const HorizonStats& stats, int target, const BCoreConfig& config)
{
    if (target < 1 || target > stats.max_target)
        throw EstimationError(EstimationError::Kind::InsufficientData,
                              "bcore: target " + std::to_string(target) + " outside tracked range");
    const auto& conf = stats.conf_avg[static_cast<size_t>(target - 1)];
    const auto& unconf = stats.tx_un_ct[static_cast<size_t>(target - 1)];
    const size_t buckets = stats.tx_ct_avg.size();

    // Scan from the highest-feerate bucket downward in batches of at least
    // p1 decayed transactions.
    double batch_ct = 0.0, batch_conf = 0.0, batch_unconf = 0.0;
    size_t batch_hi = buckets; // exclusive upper end of the current batch
    bool have_pass = false;
    size_t pass_lo = 0, pass_hi = 0; // inclusive lo, exclusive hi

    for (size_t i = buckets; i-- > 0;) {
        batch_ct += stats.tx_ct_avg[i];
        batch_conf += conf[i];
        batch_unconf += unconf[i];
        if (batch_ct < config.sufficiency) continue;

        const double ratio = batch_conf / (batch_ct + batch_unconf);
        if (ratio < config.success_ratio) break; // first failing batch ends the scan
        have_pass = true;
        pass_lo = i;
        pass_hi = batch_hi;
        batch_ct = batch_conf = batch_unconf = 0.0;
        batch_hi = i;
    }

    if (!have_pass)
        throw EstimationError(EstimationError::Kind::InsufficientData,
                              "bcore: no bucket set reaches the sufficiency and success thresholds");

    // Median bucket of the passing batch: lowest bucket where the cumulative
    // decayed count reaches half the batch total, scanning upward.
    double total = 0.0;
    for (size_t j = pass_lo; j < pass_hi; ++j) total += stats.tx_ct_avg[j];
    const double half = total / 2.0;
    double cumulative = 0.0;
    size_t median_bucket = pass_hi - 1;
    for (size_t j = pass_lo; j < pass_hi; ++j) {
        cumulative += stats.tx_ct_avg[j];
        if (cumulative >= half) {
            median_bucket = j;
            break;
        }
    }
    return stats.fee_sum_avg[median_bucket] / stats.tx_ct_avg[median_bucket];
}

Estimator::Estimator(BCoreConfig config) : m_config(std::move(config))
{
    for (const auto& [target, decay] : horizon_layout(m_config)) {
        HorizonStats stats;
        stats.max_target = target;
        stats.decay = decay;
        stats.reset(m_config.scheme.bucket_count());
        m_horizons.push_back(std::move(stats));
    }
}

void Estimator::advance_to(const ChainView& chain, BlockHeight tip)
{
    if (chain.empty()) return;
    for (const Block& block : chain.blocks()) {
        if (block.height > tip) break;
        if (m_started && block.height <= m_tip) continue;
        for (HorizonStats& stats : m_horizons) stats.decay_once();
        for (uint32_t i : chain.confirmed_at(block.height)) {
            const Transaction& tx = chain.transactions()[i];
            const BlockHeight interval = *tx.confirm_height - tx.entry_height;
            const size_t bucket = m_config.scheme.index_of(tx.feerate);
            for (HorizonStats& stats : m_horizons) {
                if (interval > stats.max_target) continue; // too slow for this horizon
                stats.tx_ct_avg[bucket] += 1.0;
                stats.fee_sum_avg[bucket] += tx.feerate;
                const size_t from = static_cast<size_t>(std::max<BlockHeight>(interval, 1)) - 1;
                for (size_t t = from; t < stats.conf_avg.size(); ++t) stats.conf_avg[t][bucket] += 1.0;
            }
        }
        m_tip = block.height;
        m_started = true;
    }
}

void Estimator::set_tip_mempool(const ChainView& chain, const MempoolSnapshot& mempool)
{
    if (mempool.height != m_tip)
        throw InvalidInput("bcore: mempool snapshot height does not match the replayed tip");
    for (HorizonStats& stats : m_horizons)
        for (auto& row : stats.tx_un_ct) std::fill(row.begin(), row.end(), 0.0);

    auto count_waiting = [&](const Transaction& tx, BlockHeight waited) {
        const size_t bucket = m_config.scheme.index_of(tx.feerate);
        for (HorizonStats& stats : m_horizons) {
            const BlockHeight top = std::min<BlockHeight>(waited, stats.max_target);
            for (BlockHeight t = 1; t <= top; ++t)
                stats.tx_un_ct[static_cast<size_t>(t - 1)][bucket] += 1.0;
        }
    };

    for (uint32_t i : mempool.members) {
        const Transaction& tx = chain.transactions()[i];
        count_waiting(tx, m_tip - tx.entry_height);
    }
    if (m_config.era == Era::Post15) {
        // Evicted txs failed to confirm for as long as they sat in the pool.
        for (const Transaction& tx : chain.transactions()) {
            if (!tx.evicted() || *tx.leave_height > m_tip) continue;
            count_waiting(tx, *tx.leave_height - tx.entry_height);
        }
    }
}

void Estimator::fit(const ChainView& chain, const MempoolSnapshot& tip_mempool)
{
    advance_to(chain, chain.tip_height());
    set_tip_mempool(chain, tip_mempool);
}

double Estimator::estimate(int target) const
{
    if (target < 1) throw InvalidInput("bcore: target must be >= 1");
    bool any_data = false;
    double best = 0.0;
    for (const HorizonStats& stats : m_horizons) {
        if (target > stats.max_target) continue; // horizon not applicable
        double value = 0.0;
        try {
            value = estimate_from_stats(stats, target, m_config);
        } catch (const EstimationError&) {
            continue; // skip horizons without enough data
        }
        if (m_config.mode == ResultMode::Economical) return value;
        best = std::max(best, value);
        any_data = true;
    }
    if (!any_data)
        throw EstimationError(EstimationError::Kind::InsufficientData,
                              "bcore: no applicable horizon produced an estimate");
    return best;
}

} // namespace feelab::bcore
