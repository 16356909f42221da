// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <btcflow/btcflow.h>
#include <core/errors.h>
#include <core/rng.h>
#include <ingest/reconstruct.h>

#include <doctest.h>

#include "test_fixtures.h"

#include <cmath>

using namespace feelab;
using namespace feelab::btcflow;

namespace {

/** Poisson upper tail 1 - P(x<=k), summed directly; the test-side oracle. */
double poisson_tail(double lambda, int k)
{
    double term = std::exp(-lambda);
    double cdf = term;
    for (int i = 1; i <= k; ++i) {
        term *= lambda / i;
        cdf += term;
    }
    return 1.0 - cdf;
}

ChainView flow_fixture()
{
    auto blocks = test::make_blocks(10, 3); // timestamps 1.6e9 + {0, 600, 1200}
    const int64_t tip_time = 1'600'000'000 + 1200;
    std::vector<Transaction> txs = {
        // two recent submissions at feerate 2.3, weight 400 each (within 2*10 min of the tip)
        test::make_tx("r1", 400, 2.3, 12, std::nullopt, tip_time - 100),
        test::make_tx("r2", 400, 2.3, 12, std::nullopt, tip_time - 200),
        // an old submission outside the 20-minute window
        test::make_tx("old", 400, 2.3, 10, std::nullopt, tip_time - 1300),
        // mempool state at scale 5: weights 600 @ 5.0 and 400 @ 4.2
        test::make_tx("m1", 600, 5.0, 11, std::nullopt, tip_time - 700),
        test::make_tx("m2", 400, 4.2, 11, std::nullopt, tip_time - 650),
    };
    return ChainView::build(blocks, txs);
}

} // namespace

TEST_CASE("build_flows implements the inflow and state sums")
{
    const ChainView chain = flow_fixture();
    const MempoolSnapshot mempool = reconstruct_mempool(chain, 12);
    const FlowModel flows = build_flows(chain, mempool, 10.0);

    // v_3 = (400 + 400) / (2 * 10) = 40 weight units per minute
    CHECK(flows.inflow_speed[flows.scheme.index_of(2.3)] == doctest::Approx(40.0));
    // old tx outside the trailing window contributes nothing beyond the recent two
    CHECK(flows.mempool_state[flows.scheme.index_of(5.0)] == doctest::Approx(1000.0)); // 600 + 400, both ceil to 5
    // the mempool members include the recent and old unconfirmed txs at scale 3
    CHECK(flows.mempool_state[flows.scheme.index_of(2.3)] == doctest::Approx(1200.0));

    SUBCASE("empty history yields zero flows")
    {
        const ChainView empty = ChainView::build(test::make_blocks(10, 1), {});
        const MempoolSnapshot snap = reconstruct_mempool(empty, 10);
        const FlowModel zero = build_flows(empty, snap, 10.0);
        for (double v : zero.inflow_speed) CHECK(v == 0.0);
        for (double s : zero.mempool_state) CHECK(s == 0.0);
    }
}

TEST_CASE("poisson_block_count follows the quantile table semantics")
{
    CHECK(poisson_block_count(10.0, 0.8) == 0);
    CHECK(poisson_block_count(10.0, 0.9) == 0);
    CHECK(poisson_block_count(10.0, 0.5) == 1);
    CHECK(poisson_block_count(20.0, 0.8) == 1); // lambda=2: 0.8647 > 0.8 >= 0.594
    CHECK(poisson_block_count(20.0, 0.5) == 2);

    SUBCASE("tail values match the published 3-decimal table")
    {
        const double lambda1[] = {0.632, 0.264, 0.080, 0.019, 0.004};
        const double lambda2[] = {0.864, 0.594, 0.323, 0.143, 0.053};
        for (int k = 0; k < 5; ++k) {
            CHECK(std::abs(poisson_tail(1.0, k) - lambda1[k]) < 1e-3);
            CHECK(std::abs(poisson_tail(2.0, k) - lambda2[k]) < 1e-3);
        }
    }

    SUBCASE("boundary mapping agrees with the tail oracle")
    {
        Rng rng(21);
        for (int trial = 0; trial < 200; ++trial) {
            const double minutes = rng.uniform(1.0, 90.0);
            const double p = rng.uniform(0.01, 0.99);
            const int c = poisson_block_count(minutes, p);
            const double lambda = minutes / 10.0;
            CHECK(poisson_tail(lambda, c) <= p + 1e-12);
            if (c > 0) CHECK(poisson_tail(lambda, c - 1) > p - 1e-12);
        }
    }
}

TEST_CASE("model_outflow is the block count times capacity")
{
    BtcFlowConfig cfg;
    cfg.block_capacity = 4'000'000;
    CHECK(model_outflow(0, cfg) == 0.0);
    CHECK(model_outflow(1, cfg) == 4e6);
    cfg.block_capacity = 2'000'000;
    CHECK(model_outflow(3, cfg) == 6e6);
}

namespace {

FlowModel empty_flows(double minutes)
{
    FlowModel flows;
    flows.scheme = BucketScheme::integer_ceil();
    flows.inflow_speed.assign(flows.scheme.bucket_count(), 0.0);
    flows.mempool_state.assign(flows.scheme.bucket_count(), 0.0);
    flows.horizon_minutes = minutes;
    return flows;
}

/** Linear-scan drain oracle over all scales. */
double drain_oracle(const FlowModel& flows, double minutes, double outflow)
{
    const size_t buckets = flows.scheme.bucket_count();
    for (size_t u = 0; u < buckets; ++u) {
        double inflow = 0.0, state = 0.0;
        for (size_t v = u; v < buckets; ++v) {
            inflow += minutes * flows.inflow_speed[v];
            state += flows.mempool_state[v];
        }
        if (inflow + state <= outflow) return static_cast<double>(flows.scheme.scale_of(u));
    }
    return static_cast<double>(flows.scheme.scale_of(buckets - 1));
}

} // namespace

TEST_CASE("estimate scans to the drain boundary")
{
    BtcFlowConfig cfg;
    cfg.block_capacity = 4'000'000;
    cfg.quantile = 0.5; // lambda=2 at 20 min -> c=2? (tail(1)=0.594>0.5>=tail(2)=0.323) -> c=2

    SUBCASE("all flows zero returns u_min")
    {
        FlowModel flows = empty_flows(20.0);
        const Estimate est = estimate(20.0, flows, cfg);
        CHECK(est.feerate == 1.0);
        CHECK_FALSE(est.low_confidence);
    }

    SUBCASE("mempool bulk above the outflow pushes the boundary up")
    {
        FlowModel flows = empty_flows(20.0);
        // O = 2 * 4e6 = 8e6; place 9e6 at scale 10 -> boundary at 11
        flows.mempool_state[flows.scheme.index_of(10.0)] = 9e6;
        const Estimate est = estimate(20.0, flows, cfg);
        CHECK(est.feerate == 11.0);
    }

    SUBCASE("inflow counts toward the drain condition")
    {
        FlowModel flows = empty_flows(20.0);
        // I(20) = 20 * 2e5 = 4e6, M(20) = 4.5e6 -> 8.5e6 > 8e6; scale 21 drains
        flows.inflow_speed[flows.scheme.index_of(20.0)] = 2e5;
        flows.mempool_state[flows.scheme.index_of(20.0)] = 4.5e6;
        const Estimate est = estimate(20.0, flows, cfg);
        CHECK(est.feerate == 21.0);
    }

    SUBCASE("zero outflow flags low confidence at the max scale")
    {
        FlowModel flows = empty_flows(10.0);
        cfg.quantile = 0.8; // lambda=1 -> c=0 -> O=0
        const Estimate est = estimate(10.0, flows, cfg);
        CHECK(est.feerate == 1000.0);
        CHECK(est.low_confidence);
    }

    SUBCASE("horizon mismatch is rejected")
    {
        FlowModel flows = empty_flows(10.0);
        CHECK_THROWS_AS(estimate(20.0, flows, cfg), InvalidInput);
    }
}

TEST_CASE("drain boundary equals brute force on random instances")
{
    Rng rng(31);
    BtcFlowConfig cfg;
    cfg.block_capacity = 1'000'000;
    for (int trial = 0; trial < 100; ++trial) {
        const double minutes = rng.uniform(15.0, 60.0); // keep the outflow positive
        cfg.quantile = rng.uniform(0.05, 0.6);
        FlowModel flows = empty_flows(minutes);
        const int entries = static_cast<int>(rng.uniform_int(1, 30));
        for (int e = 0; e < entries; ++e) {
            const size_t bucket = static_cast<size_t>(rng.uniform_int(0, 999));
            if (rng.uniform() < 0.5) {
                flows.mempool_state[bucket] += rng.uniform(0.0, 8e5);
            } else {
                flows.inflow_speed[bucket] += rng.uniform(0.0, 2e4);
            }
        }
        const double outflow = model_outflow(poisson_block_count(minutes, cfg.quantile), cfg);
        if (outflow <= 0.0) continue;
        const Estimate est = estimate(minutes, flows, cfg);
        CHECK(est.feerate == drain_oracle(flows, minutes, outflow));

        // boundary property: the result drains, the next lower scale does not
        const size_t index = flows.scheme.index_of(est.feerate);
        double inflow = 0.0, state = 0.0;
        for (size_t v = index; v < flows.scheme.bucket_count(); ++v) {
            inflow += minutes * flows.inflow_speed[v];
            state += flows.mempool_state[v];
        }
        if (inflow + state <= outflow && index > 0) {
            const double below_inflow = inflow + minutes * flows.inflow_speed[index - 1];
            const double below_state = state + flows.mempool_state[index - 1];
            if (est.feerate > 1.0) CHECK(below_inflow + below_state > outflow);
        }
    }
}

TEST_CASE("cumulative sums are monotone in the scale")
{
    Rng rng(17);
    FlowModel flows = empty_flows(10.0);
    for (int e = 0; e < 200; ++e) {
        flows.inflow_speed[static_cast<size_t>(rng.uniform_int(0, 999))] += rng.uniform(0.0, 100.0);
        flows.mempool_state[static_cast<size_t>(rng.uniform_int(0, 999))] += rng.uniform(0.0, 1000.0);
    }
    double prev_inflow = 1e300, prev_state = 1e300;
    for (size_t u = 0; u < flows.scheme.bucket_count(); ++u) {
        double inflow = 0.0, state = 0.0;
        for (size_t v = u; v < flows.scheme.bucket_count(); ++v) {
            inflow += flows.inflow_speed[v];
            state += flows.mempool_state[v];
        }
        CHECK(inflow <= prev_inflow + 1e-9);
        CHECK(state <= prev_state + 1e-9);
        prev_inflow = inflow;
        prev_state = state;
    }
}
