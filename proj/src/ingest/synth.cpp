// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <ingest/synth.h>

#include <core/errors.h>
#include <core/rng.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace feelab {

namespace {

uint64_t splitmix64(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string make_txid(uint64_t counter)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(splitmix64(counter)));
    return buf;
}

} // namespace

void SynthConfig::validate() const
{
    if (n_blocks < 0) throw InvalidInput("synth: n_blocks must be >= 0");
    if (mean_block_interval <= 0) throw InvalidInput("synth: mean_block_interval must be positive");
    if (block_weight_limit <= 0) throw InvalidInput("synth: block_weight_limit must be positive");
    if (tx_arrival_rate <= 0) throw InvalidInput("synth: tx_arrival_rate must be positive");
    if (feerate_log_sigma < 0 || weight_log_sigma < 0) throw InvalidInput("synth: log_sigma must be >= 0");
    if (burst_amplitude < 0 || burst_amplitude >= 1) throw InvalidInput("synth: burst_amplitude must be in [0, 1)");
    if (burst_period_blocks <= 0) throw InvalidInput("synth: burst_period_blocks must be positive");
    if (start_height < 1) throw InvalidInput("synth: start_height must be >= 1");
}

ChainView synth_generate(const SynthConfig& config)
{
    config.validate();
    if (config.n_blocks == 0) return ChainView::build({}, {});

    Rng rng(config.seed);

    // Block arrival times first, so tx entry heights can be resolved directly.
    std::vector<int64_t> block_times(static_cast<size_t>(config.n_blocks));
    int64_t t = config.genesis_time;
    for (auto& bt : block_times) {
        t += std::max<int64_t>(1, std::llround(rng.exponential(config.mean_block_interval)));
        bt = t;
    }
    const int64_t horizon = block_times.back();

    // Transaction arrival stream up to the final block time.
    std::vector<Transaction> txs;
    const double period_seconds = config.burst_period_blocks * config.mean_block_interval;
    const WeightUnits max_weight = std::max<WeightUnits>(400, config.block_weight_limit / 10);
    double arrival = static_cast<double>(config.genesis_time);
    uint64_t counter = 0;
    for (;;) {
        const double phase = 2.0 * M_PI * (arrival - config.genesis_time) / period_seconds;
        const double rate_per_second =
            config.tx_arrival_rate / 60.0 * (1.0 + config.burst_amplitude * std::sin(phase));
        arrival += rng.exponential(1.0 / rate_per_second);
        const int64_t seen = static_cast<int64_t>(std::llround(arrival));
        if (seen >= horizon) break;

        Transaction tx;
        tx.txid = make_txid(++counter);
        tx.first_seen_time = seen;
        tx.weight = std::clamp<WeightUnits>(std::llround(rng.lognormal(config.weight_log_mu, config.weight_log_sigma)),
                                            400, max_weight);
        tx.size = std::max<int64_t>(1, std::llround(static_cast<double>(tx.weight) * rng.uniform(0.25, 0.30)));
        tx.version = rng.uniform() < 0.85 ? 2 : 1;
        tx.input_count = static_cast<int32_t>(1 + rng.poisson(0.8));
        tx.output_count = static_cast<int32_t>(1 + rng.poisson(1.1));
        const double blocks_elapsed = (arrival - config.genesis_time) / config.mean_block_interval;
        const double log_mu = config.feerate_log_mu + config.feerate_drift_per_block * blocks_elapsed;
        const double feerate_draw = std::clamp(rng.lognormal(log_mu, config.feerate_log_sigma), 1.0, 10000.0);
        tx.fee = std::max<Satoshi>(0, std::llround(feerate_draw * static_cast<double>(tx.weight) / 4.0));
        tx.feerate = compute_feerate(tx.fee, tx.weight);
        txs.push_back(std::move(tx));
    }

    // Entry height: latest block with timestamp <= first_seen_time (0 before the first block).
    for (Transaction& tx : txs) {
        const auto it = std::upper_bound(block_times.begin(), block_times.end(), tx.first_seen_time);
        tx.entry_height = config.start_height - 1 + (it - block_times.begin());
    }

    // Mine: strict feerate priority, stop at the first tx that does not fit.
    std::vector<Block> blocks;
    blocks.reserve(block_times.size());
    std::vector<uint32_t> pending;
    size_t next_arrival = 0; // txs are already in first_seen order
    for (size_t k = 0; k < block_times.size(); ++k) {
        const BlockHeight height = config.start_height + static_cast<BlockHeight>(k);
        const int64_t block_time = block_times[k];
        while (next_arrival < txs.size() && txs[next_arrival].first_seen_time < block_time)
            pending.push_back(static_cast<uint32_t>(next_arrival++));
        std::sort(pending.begin(), pending.end(), [&](uint32_t a, uint32_t b) {
            if (txs[a].feerate != txs[b].feerate) return txs[a].feerate > txs[b].feerate;
            return a < b;
        });

        Block block;
        block.height = height;
        block.timestamp = block_time;
        block.interval = block_time - (k == 0 ? config.genesis_time : block_times[k - 1]);
        block.difficulty = 3.0e13 * (1.0 + 0.05 * std::sin(2.0 * M_PI * static_cast<double>(k) / 144.0));

        WeightUnits used = 0;
        double feerate_sum = 0.0;
        size_t included = 0;
        for (; included < pending.size(); ++included) {
            const Transaction& tx = txs[pending[included]];
            if (used + tx.weight > config.block_weight_limit) break;
            used += tx.weight;
            feerate_sum += tx.feerate;
            block.size += tx.size;
        }
        for (size_t i = 0; i < included; ++i) {
            Transaction& tx = txs[pending[i]];
            tx.confirm_height = height;
            tx.leave_height = height;
            tx.confirm_time = block_time;
        }
        pending.erase(pending.begin(), pending.begin() + static_cast<ptrdiff_t>(included));

        block.total_weight = used;
        block.tx_count = static_cast<int64_t>(included);
        block.mean_feerate = included == 0 ? 0.0 : feerate_sum / static_cast<double>(included);
        blocks.push_back(block);
    }

    return ChainView::build(std::move(blocks), std::move(txs));
}

} // namespace feelab
