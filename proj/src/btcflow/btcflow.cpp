// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <btcflow/btcflow.h>

#include <core/errors.h>

#include <cmath>

namespace feelab::btcflow {

FlowModel build_flows(const ChainView& chain, const MempoolSnapshot& mempool, double minutes,
                      const BucketScheme& scheme)
{
    if (minutes <= 0.0) throw InvalidInput("btcflow: horizon minutes must be positive");

    FlowModel model;
    model.scheme = scheme;
    model.horizon_minutes = minutes;
    model.inflow_speed.assign(scheme.bucket_count(), 0.0);
    model.mempool_state.assign(scheme.bucket_count(), 0.0);

    const Block* tip = chain.block_at(mempool.height);
    if (tip) {
        const int64_t window = static_cast<int64_t>(std::llround(2.0 * minutes * 60.0));
        for (uint32_t i : chain.first_seen_between(tip->timestamp - window, tip->timestamp)) {
            const Transaction& tx = chain.transactions()[i];
            model.inflow_speed[scheme.index_of(tx.feerate)] +=
                static_cast<double>(tx.weight) / (2.0 * minutes);
        }
    }
    for (uint32_t i : mempool.members) {
        const Transaction& tx = chain.transactions()[i];
        model.mempool_state[scheme.index_of(tx.feerate)] += static_cast<double>(tx.weight);
    }
    return model;
}

int poisson_block_count(double minutes, double quantile)
{
    if (minutes <= 0.0) throw InvalidInput("btcflow: horizon minutes must be positive");
    if (quantile < 0.0 || quantile > 1.0) throw InvalidInput("btcflow: quantile must be in [0, 1]");

    const double lambda = minutes / 10.0;
    double term = std::exp(-lambda); // P(x = k)
    double cdf = term;
    int k = 0;
    constexpr int kCap = 4000; // cdf reaches 1.0 in floating point long before this
    while (1.0 - cdf > quantile && k < kCap) {
        ++k;
        term *= lambda / static_cast<double>(k);
        cdf += term;
    }
    return k;
}

double model_outflow(int block_count, const BtcFlowConfig& config)
{
    if (block_count < 0) throw InvalidInput("btcflow: block count must be >= 0");
    return static_cast<double>(block_count) * static_cast<double>(config.block_capacity);
}

Estimate estimate(double minutes, const FlowModel& flows, const BtcFlowConfig& config)
{
    if (std::abs(minutes - flows.horizon_minutes) > 1e-9)
        throw InvalidInput("btcflow: flows were built for a different horizon");
    const double outflow = model_outflow(poisson_block_count(minutes, config.quantile), config);
    const size_t buckets = flows.scheme.bucket_count();

    if (outflow <= 0.0) {
        // No block can be counted on: nothing drains, no feerate helps.
        return {static_cast<double>(flows.scheme.scale_of(buckets - 1)), true};
    }

    // Scan top-down; inflow_volume/mempool_volume are the cumulative sums at
    // or above the current scale. Stop at the first scale that fails, the
    // answer is the last one that drained.
    double inflow_volume = 0.0;
    double mempool_volume = 0.0;
    size_t best = buckets; // "none satisfied yet"
    for (size_t i = buckets; i-- > 0;) {
        inflow_volume += minutes * flows.inflow_speed[i];
        mempool_volume += flows.mempool_state[i];
        if (inflow_volume + mempool_volume > outflow) break;
        best = i;
    }
    if (best == buckets) {
        // even u_max cannot drain
        return {static_cast<double>(flows.scheme.scale_of(buckets - 1)), false};
    }
    return {static_cast<double>(flows.scheme.scale_of(best)), false};
}

} // namespace feelab::btcflow
