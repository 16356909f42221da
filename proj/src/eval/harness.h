// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_EVAL_HARNESS_H
#define FEELAB_EVAL_HARNESS_H

#include <bcore/bcore.h>
#include <btcflow/btcflow.h>
#include <eval/metrics.h>
#include <fenn/fenn.h>
#include <mslp/mslp.h>

#include <filesystem>
#include <string>
#include <vector>

namespace feelab::eval {

/** Train on the first train_blocks after offset, test on the next test_blocks. */
struct SplitSpec {
    int64_t train_blocks{180};
    int64_t test_blocks{45};
    int64_t offset{0};
};

struct BenchmarkConfig {
    SplitSpec split;
    std::vector<std::string> engines{"btcflow", "bcore", "mslp", "fenn-adv"};
    btcflow::BtcFlowConfig btcflow;
    bcore::BCoreConfig bcore;
    mslp::MslpConfig mslp;
    fenn::FennConfig fenn;            // variant/ablation overridden by engine name
    BucketScheme mempool_scheme = BucketScheme::geometric();
    double minutes_per_block{10.0};   // theta -> vartheta for the flow engine
    bool collect_predictions{false};
};

struct EngineReport {
    std::string engine;
    Metrics metrics;
    size_t answered{0};
    size_t failed{0};
    double coverage{1.0};
    double train_seconds{0.0};
    double mean_estimate_ms{0.0};
    double max_estimate_ms{0.0};
};

struct PredictionRow {
    std::string txid;
    std::string engine;
    int theta{0};
    double true_fee{0.0};
    double pred_fee{0.0};
};

struct BenchmarkReport {
    std::vector<EngineReport> engines;
    std::vector<PredictionRow> predictions;
    size_t test_transactions{0};

    const EngineReport* find(const std::string& engine) const;
};

/** Engine names: btcflow, bcore, mslp, fenn-<variant>[-<ablation>]. */
bool engine_name_valid(const std::string& name);

/**
 * The evaluation protocol: fit every engine on the train window, then query
 * it for each test transaction with theta equal to the realized confirmation
 * interval and the mempool snapshot of its entry height. Predictions are
 * converted to fees before scoring; engines that refuse a transaction are
 * scored on what they answered, with coverage reported.
 */
BenchmarkReport run_benchmark(const ChainView& chain, const BenchmarkConfig& config);

void write_report_csv(const BenchmarkReport& report, const std::filesystem::path& path);
void write_predictions_csv(const std::vector<PredictionRow>& rows, const std::filesystem::path& path);

struct RetrainResult {
    int policy{0};
    Metrics metrics;
    int train_events{0};
};

/**
 * Retrains the configured fenn engine every `policy` test blocks and scores
 * each policy over the same test transactions.
 */
std::vector<RetrainResult> retrain_frequency_experiment(const ChainView& chain, const BenchmarkConfig& config,
                                                        const std::vector<int>& policies);

} // namespace feelab::eval

#endif // FEELAB_EVAL_HARNESS_H
