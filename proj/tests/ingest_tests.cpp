// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <core/errors.h>
#include <ingest/chain_io.h>
#include <ingest/csv.h>
#include <ingest/reconstruct.h>
#include <ingest/synth.h>

#include <doctest.h>

#include "test_fixtures.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace feelab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("feelab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("csv round trip and parse errors")
{
    const fs::path dir = temp_dir("csv");
    SUBCASE("empty file with header loads as empty chain")
    {
        std::ofstream(dir / "chain.csv")
            << "height,timestamp,interval,size,difficulty,total_weight,tx_count,mean_feerate\n";
        std::ofstream(dir / "txs.csv") << "txid,version,size,weight,inputs,outputs,fee,first_seen_time,"
                                          "entry_height,leave_height,confirm_height,confirm_time\n";
        const ChainView chain = load_chain(dir);
        CHECK(chain.blocks().empty());
        CHECK(chain.transactions().empty());
    }
    SUBCASE("missing column is a parse error naming the column")
    {
        std::ofstream(dir / "chain.csv") << "height,timestamp\n1,2\n";
        std::ofstream(dir / "txs.csv") << "txid\nx\n";
        CHECK_THROWS_WITH_AS(load_chain(dir), doctest::Contains("interval"), ParseError);
    }
    SUBCASE("bad integer is a parse error naming row and field")
    {
        std::ofstream(dir / "chain.csv")
            << "height,timestamp,interval,size,difficulty,total_weight,tx_count,mean_feerate\n"
            << "1,100,xyz,10,1.0,40,0,0\n";
        std::ofstream(dir / "txs.csv") << "txid,version,size,weight,inputs,outputs,fee,first_seen_time,"
                                          "entry_height,leave_height,confirm_height,confirm_time\n";
        CHECK_THROWS_WITH_AS(load_chain(dir), doctest::Contains("line 2"), ParseError);
    }
    SUBCASE("zero weight is a validation error")
    {
        std::ofstream(dir / "chain.csv")
            << "height,timestamp,interval,size,difficulty,total_weight,tx_count,mean_feerate\n"
            << "1,100,0,10,1.0,40,0,0\n";
        std::ofstream(dir / "txs.csv") << "txid,version,size,weight,inputs,outputs,fee,first_seen_time,"
                                          "entry_height,leave_height,confirm_height,confirm_time\n"
                                       << "t1,2,100,0,1,1,500,90,1,,,\n";
        CHECK_THROWS_AS(load_chain(dir), ValidationError);
    }
}

TEST_CASE("save and reload a hand-built chain (csv and json)")
{
    auto blocks = test::make_blocks(100, 2);
    std::vector<Transaction> txs = {test::make_tx("t1", 400, 5.5, 100, 101, 1'600'000'100),
                                    test::make_tx("t2", 900, 2.25, 100, std::nullopt, 1'600'000'200),
                                    test::make_tx("t3", 444, 9.0, 101, 101, 1'600'000'300)};
    const ChainView chain = ChainView::build(blocks, txs);
    CHECK(chain.tip_height() == 101);

    for (const std::string format : {"csv", "json"}) {
        const fs::path dir = temp_dir("roundtrip_" + format);
        if (format == "csv") {
            save_chain_csv(chain, dir);
        } else {
            save_chain_json(chain, dir);
        }
        const ChainView loaded = load_chain(dir);
        REQUIRE(loaded.blocks().size() == 2);
        REQUIRE(loaded.transactions().size() == 3);
        CHECK(loaded.tip_height() == 101);
        const Transaction* t2 = loaded.find_tx("t2");
        REQUIRE(t2 != nullptr);
        CHECK_FALSE(t2->confirmed());
        CHECK(t2->feerate == doctest::Approx(compute_feerate(t2->fee, 900)).epsilon(1e-12));
        const Transaction* t1 = loaded.find_tx("t1");
        REQUIRE(t1 != nullptr);
        CHECK(t1->confirm_height == 101);
    }
}

TEST_CASE("reconstruct_mempool membership rule")
{
    auto blocks = test::make_blocks(10, 5);
    std::vector<Transaction> txs = {
        test::make_tx("in_window", 400, 5.0, 10, 12),   // h_e=10, h_c=12
        test::make_tx("confirmed_at_11", 400, 6.0, 10, 11),
        test::make_tx("not_entered", 400, 7.0, 13),
        test::make_tx("never_confirmed", 400, 1.0, 10),
    };
    // an evicted tx: leaves at 12 without confirmation
    Transaction evicted = test::make_tx("evicted", 400, 2.0, 10);
    evicted.leave_height = 12;
    txs.push_back(evicted);

    const ChainView chain = ChainView::build(blocks, txs);

    const MempoolSnapshot at11 = reconstruct_mempool(chain, 11);
    CHECK(at11.contains(chain, "in_window"));            // strictly between entry and confirm
    CHECK_FALSE(at11.contains(chain, "confirmed_at_11")); // confirmed at that height
    CHECK_FALSE(at11.contains(chain, "not_entered"));
    CHECK(at11.contains(chain, "never_confirmed"));
    CHECK(at11.contains(chain, "evicted")); // leaves later

    const MempoolSnapshot at12 = reconstruct_mempool(chain, 12);
    CHECK_FALSE(at12.contains(chain, "evicted"));
    CHECK_FALSE(at12.contains(chain, "in_window"));

    CHECK_THROWS_AS(reconstruct_mempool(chain, 99), InvalidInput);

    // aggregates match a brute-force recount
    CHECK_NOTHROW(at11.check_aggregates(chain));
    CHECK(at11.size() == 3);
}

TEST_CASE("mempool timeline equals the brute-force filter at every height")
{
    SynthConfig cfg;
    cfg.seed = 5;
    cfg.n_blocks = 30;
    cfg.tx_arrival_rate = 12.0;
    cfg.block_weight_limit = 200'000;
    const ChainView chain = synth_generate(cfg);
    REQUIRE(chain.transactions().size() > 100);
    REQUIRE(chain.transactions().size() <= 1000);

    const MempoolTimeline timeline(chain, 1, chain.tip_height(), BucketScheme::geometric());
    for (BlockHeight h = 1; h <= chain.tip_height(); ++h) {
        const MempoolSnapshot direct = reconstruct_mempool(chain, h);
        const MempoolSnapshot& swept = timeline.at(h);
        CHECK(direct.members == swept.members);
        CHECK(direct.bucket_counts == swept.bucket_counts);
        CHECK_NOTHROW(swept.check_aggregates(chain));
    }
}

TEST_CASE("synth generator contracts")
{
    SUBCASE("zero blocks gives an empty chain")
    {
        SynthConfig cfg;
        cfg.n_blocks = 0;
        const ChainView chain = synth_generate(cfg);
        CHECK(chain.blocks().empty());
        CHECK(chain.transactions().empty());
    }

    SUBCASE("same seed twice gives byte-identical files")
    {
        SynthConfig cfg;
        cfg.seed = 42;
        cfg.n_blocks = 25;
        cfg.tx_arrival_rate = 15.0;
        const fs::path a = temp_dir("synth_a");
        const fs::path b = temp_dir("synth_b");
        save_chain_csv(synth_generate(cfg), a);
        save_chain_csv(synth_generate(cfg), b);
        CHECK(slurp(a / "chain.csv") == slurp(b / "chain.csv"));
        CHECK(slurp(a / "txs.csv") == slurp(b / "txs.csv"));
        CHECK(!slurp(a / "txs.csv").empty());
    }

    SUBCASE("different seeds differ")
    {
        SynthConfig cfg;
        cfg.n_blocks = 10;
        cfg.seed = 1;
        const ChainView one = synth_generate(cfg);
        cfg.seed = 2;
        const ChainView two = synth_generate(cfg);
        REQUIRE(!one.transactions().empty());
        REQUIRE(!two.transactions().empty());
        const bool differs = one.transactions().size() != two.transactions().size() ||
                             one.transactions()[0].first_seen_time != two.transactions()[0].first_seen_time;
        CHECK(differs);
    }

    SUBCASE("demand above capacity produces congestion")
    {
        SynthConfig cfg;
        cfg.seed = 9;
        cfg.n_blocks = 60;
        cfg.block_weight_limit = 300'000;
        cfg.tx_arrival_rate = 40.0; // ~40 tx/min * ~2000 wu >> 300k wu / 10 min
        const ChainView chain = synth_generate(cfg);
        std::vector<int64_t> intervals;
        for (const Transaction& tx : chain.transactions())
            if (tx.confirm_height) intervals.push_back(*tx.confirm_height - tx.entry_height);
        REQUIRE(intervals.size() > 100);
        std::sort(intervals.begin(), intervals.end());
        CHECK(intervals[intervals.size() / 2] > 1); // median confirmation interval
    }

    SUBCASE("strict priority: min included feerate >= max pending feerate")
    {
        SynthConfig cfg;
        cfg.seed = 3;
        cfg.n_blocks = 40;
        cfg.block_weight_limit = 250'000;
        cfg.tx_arrival_rate = 25.0;
        const ChainView chain = synth_generate(cfg);
        for (const Block& block : chain.blocks()) {
            double min_included = 1e300;
            for (uint32_t i : chain.confirmed_at(block.height))
                min_included = std::min(min_included, chain.transactions()[i].feerate);
            if (min_included == 1e300) continue; // empty block
            double max_pending = -1.0;
            for (const Transaction& tx : chain.transactions()) {
                const bool pending = tx.entry_height < block.height &&
                                     (!tx.confirm_height || *tx.confirm_height > block.height);
                if (pending) max_pending = std::max(max_pending, tx.feerate);
            }
            if (max_pending >= 0.0) CHECK(min_included >= max_pending - 1e-9);
        }
    }

    SUBCASE("validation rejects bad configs")
    {
        SynthConfig cfg;
        cfg.tx_arrival_rate = 0.0;
        CHECK_THROWS_AS(synth_generate(cfg), InvalidInput);
    }
}
