// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_BTCFLOW_BTCFLOW_H
#define FEELAB_BTCFLOW_BTCFLOW_H

#include <core/bucket.h>
#include <core/mempool.h>
#include <core/types.h>

#include <vector>

namespace feelab::btcflow {

/**
 * Mempool drain model on integer feerate scales: inflow speed per scale from
 * recent submissions, current volume per scale, projected outflow from the
 * Poisson block count. estimate() returns the smallest scale whose
 * at-or-above volume drains within the horizon.
 */
struct FlowModel {
    BucketScheme scheme = BucketScheme::integer_ceil();
    std::vector<double> inflow_speed;  // v_u: weight units per minute, per scale
    std::vector<double> mempool_state; // s_u: weight units per scale
    double horizon_minutes{0.0};       // the flows were built for this horizon
};

struct BtcFlowConfig {
    WeightUnits block_capacity{4'000'000}; // BLOCK: weight units confirmed per block
    double quantile{0.8};                  // p, block-production confidence
};

/**
 * Inflow speeds from txs first seen within the trailing 2*minutes window
 * (ending at the snapshot block's timestamp) and volumes from the snapshot.
 * An empty history simply yields zero inflow.
 */
FlowModel build_flows(const ChainView& chain, const MempoolSnapshot& mempool, double minutes,
                      const BucketScheme& scheme = BucketScheme::integer_ceil());

/**
 * Block count the horizon can rely on at confidence p: the smallest c with
 * 1 - P(x<=c) <= p, so that p falls inside [1-P(x<=c), 1-P(x<=c-1)).
 * lambda = minutes/10.
 */
int poisson_block_count(double minutes, double quantile);

double model_outflow(int block_count, const BtcFlowConfig& config);

struct Estimate {
    double feerate{0.0};       // integer scale, as a feerate in sat/vB
    bool low_confidence{false}; // zero projected outflow: nothing can drain
};

Estimate estimate(double minutes, const FlowModel& flows, const BtcFlowConfig& config);

} // namespace feelab::btcflow

#endif // FEELAB_BTCFLOW_BTCFLOW_H
