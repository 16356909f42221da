// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <core/bucket.h>
#include <core/errors.h>
#include <core/rng.h>
#include <core/types.h>

#include <doctest.h>

#include "test_fixtures.h"

#include <cmath>

using namespace feelab;

TEST_CASE("compute_feerate basics")
{
    CHECK(compute_feerate(1000, 400) == doctest::Approx(10.0));
    CHECK(compute_feerate(0, 400) == 0.0);
    CHECK(compute_feerate(2500, 1000) == doctest::Approx(10.0));
    CHECK_THROWS_AS(compute_feerate(1000, 0), InvalidInput);
    CHECK_THROWS_AS(compute_feerate(1000, -4), InvalidInput);
}

TEST_CASE("feerate round-trips through fee conversion")
{
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const WeightUnits w = rng.uniform_int(1, 400000);
        const Satoshi f = rng.uniform_int(0, 100000000);
        const double r = compute_feerate(f, w);
        CHECK(std::abs(feerate_to_fee(w, r) - static_cast<double>(f)) <=
              1e-9 * std::max(1.0, static_cast<double>(f)));
    }
}

TEST_CASE("transaction validation catches invariant breaches")
{
    Transaction tx = test::make_tx("a", 400, 10.0, 5);
    CHECK_NOTHROW(tx.validate());

    SUBCASE("zero weight")
    {
        tx.weight = 0;
        CHECK_THROWS_AS(tx.validate(), ValidationError);
    }
    SUBCASE("negative fee")
    {
        tx.fee = -1;
        CHECK_THROWS_AS(tx.validate(), ValidationError);
    }
    SUBCASE("feerate inconsistent with fee and weight")
    {
        tx.feerate *= 2.0;
        CHECK_THROWS_AS(tx.validate(), ValidationError);
    }
    SUBCASE("confirm before entry")
    {
        tx.confirm_height = 3;
        tx.leave_height = 3;
        CHECK_THROWS_AS(tx.validate(), ValidationError);
    }
    SUBCASE("leave differs from confirm")
    {
        tx.confirm_height = 7;
        tx.leave_height = 6;
        CHECK_THROWS_AS(tx.validate(), ValidationError);
    }
}

TEST_CASE("chain view validates and indexes")
{
    auto blocks = test::make_blocks(10, 3);
    std::vector<Transaction> txs = {test::make_tx("t1", 400, 5.0, 10, 11),
                                    test::make_tx("t2", 800, 2.0, 10, 12),
                                    test::make_tx("t3", 400, 9.0, 11)};
    const ChainView chain = ChainView::build(blocks, txs);
    CHECK(chain.tip_height() == 12);
    CHECK(chain.find_tx("t2") != nullptr);
    CHECK(chain.find_tx("nope") == nullptr);
    CHECK(chain.confirmed_at(11).size() == 1);
    CHECK(chain.confirmed_at(12).size() == 1);
    CHECK(chain.confirmed_at(10).empty());

    SUBCASE("confirm height without a block fails")
    {
        txs.push_back(test::make_tx("t4", 400, 1.0, 10, 99));
        CHECK_THROWS_AS(ChainView::build(blocks, txs), ValidationError);
    }
    SUBCASE("non-increasing heights fail")
    {
        blocks.push_back(test::make_block(11, 1'600'001'800));
        CHECK_THROWS_AS(ChainView::build(blocks, txs), ValidationError);
    }
    SUBCASE("duplicate txid fails")
    {
        txs.push_back(test::make_tx("t1", 400, 1.0, 10));
        CHECK_THROWS_AS(ChainView::build(blocks, txs), ValidationError);
    }
}

TEST_CASE("estimate request requires exactly one horizon")
{
    EstimateRequest req;
    req.tx_skeleton = test::make_tx("s", 400, 0.0, 0);
    CHECK_THROWS_AS(req.validate(), InvalidInput);
    req.horizon_blocks = 3;
    CHECK_NOTHROW(req.validate());
    req.horizon_minutes = 30.0;
    CHECK_THROWS_AS(req.validate(), InvalidInput);
    req.horizon_blocks.reset();
    CHECK_NOTHROW(req.validate());
}

TEST_CASE("integer-ceil bucketing")
{
    const BucketScheme scheme = BucketScheme::integer_ceil();
    CHECK(scheme.bucket_count() == 1000);
    CHECK(scheme.scale_of(scheme.index_of(2.3)) == 3);
    CHECK(scheme.scale_of(scheme.index_of(0.0)) == 1);   // clamp at u_min
    CHECK(scheme.scale_of(scheme.index_of(5000.0)) == 1000); // clamp at u_max
    CHECK(scheme.scale_of(scheme.index_of(7.0)) == 7);   // integers stay put
    CHECK_THROWS_AS(scheme.index_of(-0.1), InvalidInput);
}

TEST_CASE("geometric bucketing")
{
    const BucketScheme scheme = BucketScheme::geometric(1.0, 10000.0, 1.05);
    CHECK(scheme.index_of(1.0) == 0);
    CHECK(scheme.index_of(1.11) == 2); // 1.05^2 = 1.1025 <= 1.11 < 1.05^3
    CHECK(scheme.index_of(0.5) == 0);  // below r_min folds into the first bucket
    CHECK(scheme.index_of(99999.0) == scheme.bucket_count() - 1);
    CHECK_THROWS_AS(scheme.index_of(-1.0), InvalidInput);
}

TEST_CASE("bucket partition: each feerate lands in exactly one monotone bucket")
{
    Rng rng(11);
    for (const BucketScheme& scheme :
         {BucketScheme::integer_ceil(), BucketScheme::geometric(1.0, 10000.0, 1.05)}) {
        for (size_t i = 0; i + 1 < scheme.bucket_count(); ++i) {
            CHECK(scheme.upper_bound(i) > scheme.lower_bound(i));
            CHECK(scheme.upper_bound(i + 1) > scheme.upper_bound(i));
        }
        for (int i = 0; i < 10000; ++i) {
            const double r = rng.uniform(0.0, scheme.r_max());
            const size_t bucket = scheme.index_of(r);
            CHECK(bucket < scheme.bucket_count());
            // within the bucket's envelope
            CHECK(r <= scheme.upper_bound(bucket) + 1e-9);
            if (bucket > 0) CHECK(r >= scheme.lower_bound(bucket) - 1e-9);
        }
    }
}

TEST_CASE("rng determinism")
{
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.uniform() == b.uniform());
        CHECK(a.normal() == b.normal());
        CHECK(a.exponential(10.0) == b.exponential(10.0));
        CHECK(a.poisson(2.5) == b.poisson(2.5));
    }
}
