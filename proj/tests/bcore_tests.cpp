// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <bcore/bcore.h>
#include <core/errors.h>
#include <core/rng.h>
#include <ingest/reconstruct.h>

#include <doctest.h>

#include "test_fixtures.h"

#include <cmath>
#include <optional>

using namespace feelab;
using namespace feelab::bcore;

namespace {

/** A small raw instance for the closed-form oracle. */
struct RawTx {
    double feerate;
    BlockHeight entry;
    std::optional<BlockHeight> confirm; // nullopt = still waiting at the tip
};

/**
 * Closed-form statistics straight from the definitions (decay^(tip - h_c)
 * weights, undecayed waiting counts), independent of the replay accumulator.
 */
HorizonStats closed_form_stats(const std::vector<RawTx>& txs, BlockHeight tip, int max_target, double decay,
                               const BucketScheme& scheme)
{
    HorizonStats stats;
    stats.max_target = max_target;
    stats.decay = decay;
    stats.reset(scheme.bucket_count());
    for (const RawTx& tx : txs) {
        const size_t bucket = scheme.index_of(tx.feerate);
        if (tx.confirm && *tx.confirm <= tip) {
            const BlockHeight interval = *tx.confirm - tx.entry;
            if (interval > max_target) continue;
            const double weight = std::pow(decay, static_cast<double>(tip - *tx.confirm));
            stats.tx_ct_avg[bucket] += weight;
            stats.fee_sum_avg[bucket] += tx.feerate * weight;
            for (int t = static_cast<int>(std::max<BlockHeight>(interval, 1)); t <= max_target; ++t)
                stats.conf_avg[static_cast<size_t>(t - 1)][bucket] += weight;
        } else {
            const BlockHeight waited = tip - tx.entry;
            for (int t = 1; t <= std::min<BlockHeight>(waited, max_target); ++t)
                stats.tx_un_ct[static_cast<size_t>(t - 1)][bucket] += 1.0;
        }
    }
    return stats;
}

/**
 * Exhaustive scan oracle: recomputes every batch sum from scratch for every
 * candidate cut point instead of accumulating, then applies the selection and
 * median rules literally.
 */
std::optional<double> exhaustive_scan(const HorizonStats& stats, int target, double p1, double p2)
{
    const size_t buckets = stats.tx_ct_avg.size();
    const auto& conf = stats.conf_avg[static_cast<size_t>(target - 1)];
    const auto& unconf = stats.tx_un_ct[static_cast<size_t>(target - 1)];

    auto window_sums = [&](size_t lo, size_t hi) { // [lo, hi)
        double ct = 0.0, cf = 0.0, un = 0.0;
        for (size_t j = lo; j < hi; ++j) {
            ct += stats.tx_ct_avg[j];
            cf += conf[j];
            un += unconf[j];
        }
        return std::array<double, 3>{ct, cf, un};
    };

    std::optional<std::pair<size_t, size_t>> last_pass;
    size_t hi = buckets;
    while (hi > 0) {
        // the batch is the highest cut `lo` whose window [lo, hi) reaches p1;
        // search every candidate from just below hi down to the bottom
        std::optional<size_t> batch_lo;
        for (size_t lo = hi; lo-- > 0;) {
            if (window_sums(lo, hi)[0] >= p1) {
                batch_lo = lo;
                break;
            }
        }
        if (!batch_lo) break; // tail cannot fill a batch
        const auto sums = window_sums(*batch_lo, hi);
        const double gamma = sums[1] / (sums[0] + sums[2]);
        if (gamma < p2) break;
        last_pass = {*batch_lo, hi};
        hi = *batch_lo;
    }
    if (!last_pass) return std::nullopt;

    const auto [lo, hi_pass] = *last_pass;
    double total = 0.0;
    for (size_t j = lo; j < hi_pass; ++j) total += stats.tx_ct_avg[j];
    double cumulative = 0.0;
    for (size_t j = lo; j < hi_pass; ++j) {
        cumulative += stats.tx_ct_avg[j];
        if (cumulative >= total / 2.0) return stats.fee_sum_avg[j] / stats.tx_ct_avg[j];
    }
    return std::nullopt; // unreachable: total > 0
}

ChainView replay_fixture(const std::vector<RawTx>& txs, BlockHeight first, size_t n_blocks)
{
    std::vector<Transaction> out;
    int counter = 0;
    for (const RawTx& tx : txs) {
        out.push_back(test::make_tx("t" + std::to_string(counter++), 400, tx.feerate, tx.entry, tx.confirm));
    }
    return ChainView::build(test::make_blocks(first, n_blocks), out);
}

} // namespace

TEST_CASE("decayed contributions per confirmation depth")
{
    BCoreConfig cfg;
    cfg.era = Era::Pre15; // single horizon, decay 0.998
    const BucketScheme& scheme = cfg.scheme;

    SUBCASE("tx confirmed at the tip contributes exactly 1")
    {
        const ChainView chain = replay_fixture({{10.0, 10, 12}}, 10, 3);
        Estimator est(cfg);
        est.fit(chain, reconstruct_mempool(chain, 12, scheme));
        CHECK(est.horizons()[0].tx_ct_avg[scheme.index_of(10.0)] == doctest::Approx(1.0));
    }
    SUBCASE("tx confirmed one block before the tip contributes decay^1")
    {
        const ChainView chain = replay_fixture({{10.0, 10, 11}}, 10, 3);
        Estimator est(cfg);
        est.fit(chain, reconstruct_mempool(chain, 12, scheme));
        CHECK(est.horizons()[0].tx_ct_avg[scheme.index_of(10.0)] == doctest::Approx(0.998));
    }
    SUBCASE("confirmation slower than the tracked horizon contributes nothing")
    {
        const ChainView chain = replay_fixture({{10.0, 10, 40}}, 10, 31); // interval 30 > 24
        Estimator est(cfg);
        est.fit(chain, reconstruct_mempool(chain, 40, scheme));
        CHECK(est.horizons()[0].tx_ct_avg[scheme.index_of(10.0)] == 0.0);
    }
}

TEST_CASE("decay idempotence: empty blocks multiply by decay^k exactly")
{
    BCoreConfig cfg;
    cfg.era = Era::Pre15;
    const ChainView chain = replay_fixture({{10.0, 10, 11}}, 10, 8);
    Estimator est(cfg);
    est.advance_to(chain, 11);
    const double before = est.horizons()[0].tx_ct_avg[cfg.scheme.index_of(10.0)];
    est.advance_to(chain, 16); // five empty blocks
    const double after = est.horizons()[0].tx_ct_avg[cfg.scheme.index_of(10.0)];
    CHECK(after == doctest::Approx(before * std::pow(0.998, 5)).epsilon(1e-12));
}

TEST_CASE("replay accumulator equals closed-form statistics")
{
    Rng rng(13);
    BCoreConfig cfg;
    cfg.era = Era::Pre15;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<RawTx> raw;
        const BlockHeight tip = 30;
        const int n = static_cast<int>(rng.uniform_int(1, 40));
        for (int i = 0; i < n; ++i) {
            RawTx tx;
            tx.feerate = rng.uniform(1.0, 500.0);
            tx.entry = rng.uniform_int(10, tip);
            if (rng.uniform() < 0.7) {
                const BlockHeight c = tx.entry + rng.uniform_int(1, 28);
                if (c <= tip) tx.confirm = c;
            }
            raw.push_back(tx);
        }
        const ChainView chain = replay_fixture(raw, 10, 21);
        Estimator est(cfg);
        est.fit(chain, reconstruct_mempool(chain, tip, cfg.scheme));
        const HorizonStats oracle = closed_form_stats(raw, tip, 24, 0.998, cfg.scheme);

        const HorizonStats& got = est.horizons()[0];
        for (size_t b = 0; b < cfg.scheme.bucket_count(); ++b) {
            CHECK(got.tx_ct_avg[b] == doctest::Approx(oracle.tx_ct_avg[b]).epsilon(1e-9));
            CHECK(got.fee_sum_avg[b] == doctest::Approx(oracle.fee_sum_avg[b]).epsilon(1e-9));
        }
        for (size_t t = 0; t < got.conf_avg.size(); ++t)
            for (size_t b = 0; b < cfg.scheme.bucket_count(); ++b) {
                CHECK(got.conf_avg[t][b] == doctest::Approx(oracle.conf_avg[t][b]).epsilon(1e-9));
                CHECK(got.tx_un_ct[t][b] == doctest::Approx(oracle.tx_un_ct[t][b]));
            }
        got.check_invariants();
    }
}

TEST_CASE("estimate_from_stats hand traces")
{
    BCoreConfig cfg;
    cfg.sufficiency = 5.0;
    cfg.success_ratio = 0.95;
    HorizonStats stats;
    stats.max_target = 4;
    stats.reset(cfg.scheme.bucket_count());

    SUBCASE("empty stats is insufficient data")
    {
        CHECK_THROWS_AS(estimate_from_stats(stats, 2, cfg), EstimationError);
    }

    SUBCASE("single passing bucket returns its decayed mean feerate")
    {
        const size_t bucket = cfg.scheme.index_of(30.0);
        stats.tx_ct_avg[bucket] = 10.0;
        stats.fee_sum_avg[bucket] = 300.0; // mean feerate 30
        for (auto& row : stats.conf_avg) row[bucket] = 10.0;
        const double feerate = estimate_from_stats(stats, 2, cfg);
        CHECK(feerate == doctest::Approx(30.0));
        // within the bucket's boundaries
        CHECK(feerate > cfg.scheme.lower_bound(bucket));
        CHECK(feerate <= cfg.scheme.upper_bound(bucket));
    }

    SUBCASE("failing low bucket leaves the high passing set as the answer")
    {
        const size_t high = cfg.scheme.index_of(50.0);
        const size_t low = cfg.scheme.index_of(2.0);
        stats.tx_ct_avg[high] = 10.0;
        stats.fee_sum_avg[high] = 520.0;
        for (auto& row : stats.conf_avg) row[high] = 9.6; // gamma 0.96 passes
        stats.tx_ct_avg[low] = 10.0;
        stats.fee_sum_avg[low] = 20.0;
        for (auto& row : stats.conf_avg) row[low] = 6.0; // gamma 0.60 fails
        const double feerate = estimate_from_stats(stats, 2, cfg);
        CHECK(feerate == doctest::Approx(52.0));
    }
}

TEST_CASE("estimate equals the exhaustive cut-point oracle on random instances")
{
    Rng rng(37);
    int produced = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // small instances: <= 10 buckets in play, <= 50 txs
        BCoreConfig cfg;
        cfg.era = Era::Pre15;
        cfg.sufficiency = rng.uniform(1.0, 4.0);
        cfg.success_ratio = rng.uniform(0.5, 0.95);
        const BlockHeight tip = 18;
        std::vector<RawTx> raw;
        const int n = static_cast<int>(rng.uniform_int(5, 50));
        for (int i = 0; i < n; ++i) {
            RawTx tx;
            // feerates drawn from 10 distinct values -> at most 10 buckets
            tx.feerate = 1.0 + 3.0 * static_cast<double>(rng.uniform_int(0, 9));
            tx.entry = rng.uniform_int(10, tip);
            if (rng.uniform() < 0.8) {
                const BlockHeight c = tx.entry + rng.uniform_int(1, 6);
                if (c <= tip) tx.confirm = c;
            }
            raw.push_back(tx);
        }
        const int target = static_cast<int>(rng.uniform_int(1, 8));

        const ChainView chain = replay_fixture(raw, 10, 9);
        Estimator est(cfg);
        est.fit(chain, reconstruct_mempool(chain, tip, cfg.scheme));
        const auto oracle =
            exhaustive_scan(closed_form_stats(raw, tip, 24, 0.998, cfg.scheme), target, cfg.sufficiency,
                            cfg.success_ratio);

        double got = 0.0;
        bool got_answer = true;
        try {
            got = estimate_from_stats(est.horizons()[0], target, cfg);
        } catch (const EstimationError&) {
            got_answer = false;
        }
        REQUIRE(got_answer == oracle.has_value());
        if (oracle) {
            CHECK(got == doctest::Approx(*oracle).epsilon(1e-12));
            ++produced;
        }
    }
    CHECK(produced > 10); // the instances must actually exercise the scan
}

TEST_CASE("gamma never decreases when adding a perfect bucket")
{
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const double ct = rng.uniform(1.0, 50.0);
        const double cf = rng.uniform(0.0, ct);
        const double un = rng.uniform(0.0, 20.0);
        const double gamma = cf / (ct + un);
        const double add = rng.uniform(0.1, 30.0); // confAvg = txCtAvg, txUnCt = 0
        const double gamma2 = (cf + add) / (ct + add + un);
        CHECK(gamma2 >= gamma - 1e-12);
    }
}

TEST_CASE("post-v0.15 horizons and result modes")
{
    BCoreConfig cfg; // post15 conservative by default
    // build a chain where fast confirmations dominate
    std::vector<RawTx> raw;
    for (int i = 0; i < 30; ++i) raw.push_back({40.0, 10 + i % 5, 11 + i % 5});
    const ChainView chain = replay_fixture(raw, 10, 11);
    const MempoolSnapshot tip_pool = reconstruct_mempool(chain, 20, cfg.scheme);

    Estimator conservative(cfg);
    conservative.fit(chain, tip_pool);
    const double cons = conservative.estimate(2);

    cfg.mode = ResultMode::Economical;
    Estimator economical(cfg);
    economical.fit(chain, tip_pool);
    const double econ = economical.estimate(2);

    CHECK(cons >= econ - 1e-12); // conservative takes the max across horizons
    CHECK(econ == doctest::Approx(40.0).epsilon(1e-6));

    SUBCASE("theta beyond every horizon is insufficient data")
    {
        CHECK_THROWS_AS(conservative.estimate(2000), EstimationError);
    }
    SUBCASE("evictions count into the unconfirmed tallies post-v0.15")
    {
        std::vector<Transaction> txs;
        int counter = 0;
        for (const RawTx& r : raw)
            txs.push_back(test::make_tx("t" + std::to_string(counter++), 400, r.feerate, r.entry, r.confirm));
        Transaction evicted = test::make_tx("evicted", 400, 40.0, 10);
        evicted.leave_height = 15; // waited 5 blocks, never confirmed
        txs.push_back(evicted);
        const ChainView with_evicted = ChainView::build(test::make_blocks(10, 11), txs);

        Estimator post(BCoreConfig{});
        post.fit(with_evicted, reconstruct_mempool(with_evicted, 20, BCoreConfig{}.scheme));
        const size_t bucket = BCoreConfig{}.scheme.index_of(40.0);
        CHECK(post.horizons()[0].tx_un_ct[0][bucket] == doctest::Approx(1.0));
        CHECK(post.horizons()[0].tx_un_ct[4][bucket] == doctest::Approx(1.0)); // target 5
        CHECK(post.horizons()[0].tx_un_ct[5][bucket] == doctest::Approx(0.0)); // target 6 > waited

        BCoreConfig pre;
        pre.era = Era::Pre15;
        Estimator pre_est(pre);
        pre_est.fit(with_evicted, reconstruct_mempool(with_evicted, 20, pre.scheme));
        CHECK(pre_est.horizons()[0].tx_un_ct[0][bucket] == doctest::Approx(0.0));
    }
}
