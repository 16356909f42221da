// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <eval/harness.h>

#include <core/errors.h>
#include <ingest/csv.h>
#include <ingest/reconstruct.h>

#include <algorithm>
#include <chrono>
#include <memory>

namespace feelab::eval {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Windows {
    BlockHeight first_block{0};
    BlockHeight train_end{0};  // last training height
    BlockHeight test_begin{0};
    BlockHeight test_end{0};
};

Windows resolve_split(const ChainView& chain, const SplitSpec& split)
{
    const int64_t need = split.offset + split.train_blocks + split.test_blocks;
    if (split.train_blocks < 1 || split.test_blocks < 1)
        throw InvalidInput("benchmark: split needs at least one train and one test block");
    if (static_cast<int64_t>(chain.blocks().size()) < need)
        throw InvalidInput("benchmark: chain has " + std::to_string(chain.blocks().size()) +
                           " blocks, split needs " + std::to_string(need));
    Windows w;
    w.first_block = chain.blocks()[static_cast<size_t>(split.offset)].height;
    w.train_end = chain.blocks()[static_cast<size_t>(split.offset + split.train_blocks - 1)].height;
    w.test_begin = chain.blocks()[static_cast<size_t>(split.offset + split.train_blocks)].height;
    w.test_end = chain.blocks()[static_cast<size_t>(need - 1)].height;
    return w;
}

struct TestTx {
    uint32_t index{0};
    int theta{0};
    double true_fee{0.0};
};

std::vector<TestTx> collect_test_txs(const ChainView& chain, const Windows& w)
{
    std::vector<TestTx> txs;
    for (uint32_t i = 0; i < chain.transactions().size(); ++i) {
        const Transaction& tx = chain.transactions()[i];
        if (tx.entry_height < w.test_begin || tx.entry_height > w.test_end) continue;
        if (!tx.confirm_height) continue;
        const int theta = static_cast<int>(*tx.confirm_height - tx.entry_height);
        if (theta < 1) continue;
        txs.push_back({i, theta, static_cast<double>(tx.fee)});
    }
    std::sort(txs.begin(), txs.end(), [&](const TestTx& a, const TestTx& b) {
        const BlockHeight ha = chain.transactions()[a.index].entry_height;
        const BlockHeight hb = chain.transactions()[b.index].entry_height;
        if (ha != hb) return ha < hb;
        return a.index < b.index;
    });
    return txs;
}

/** One estimator behind the benchmark protocol. */
class Engine {
public:
    virtual ~Engine() = default;
    /** Heavy one-off fitting on the train window; timed as training. */
    virtual void fit(const ChainView& chain, const MempoolTimeline& timeline, const Windows& w) = 0;
    /** Called once per test height in ascending order; cheap state upkeep. */
    virtual void on_height(const ChainView& chain, const MempoolSnapshot& snapshot) { (void)chain; (void)snapshot; }
    /** Fee prediction in satoshi; throws EstimationError on refusal. */
    virtual double estimate_fee(const ChainView& chain, const MempoolSnapshot& snapshot, const Transaction& tx,
                                int theta) = 0;
};

class BtcFlowEngine : public Engine {
public:
    BtcFlowEngine(const btcflow::BtcFlowConfig& config, double minutes_per_block)
        : m_config(config), m_minutes_per_block(minutes_per_block)
    {
    }

    void fit(const ChainView&, const MempoolTimeline&, const Windows&) override {}

    double estimate_fee(const ChainView& chain, const MempoolSnapshot& snapshot, const Transaction& tx,
                        int theta) override
    {
        const double minutes = m_minutes_per_block * static_cast<double>(theta);
        const btcflow::FlowModel flows = btcflow::build_flows(chain, snapshot, minutes);
        const btcflow::Estimate est = btcflow::estimate(minutes, flows, m_config);
        return feerate_to_fee(tx.weight, est.feerate, /*floor_feerate=*/true);
    }

private:
    btcflow::BtcFlowConfig m_config;
    double m_minutes_per_block;
};

class BCoreEngine : public Engine {
public:
    explicit BCoreEngine(const bcore::BCoreConfig& config) : m_estimator(config) {}

    void fit(const ChainView& chain, const MempoolTimeline&, const Windows& w) override
    {
        m_estimator.advance_to(chain, w.train_end);
    }

    void on_height(const ChainView& chain, const MempoolSnapshot& snapshot) override
    {
        m_estimator.advance_to(chain, snapshot.height);
        m_estimator.set_tip_mempool(chain, snapshot);
    }

    double estimate_fee(const ChainView&, const MempoolSnapshot&, const Transaction& tx, int theta) override
    {
        return feerate_to_fee(tx.weight, m_estimator.estimate(theta), /*floor_feerate=*/false);
    }

private:
    bcore::Estimator m_estimator;
};

class MslpEngine : public Engine {
public:
    explicit MslpEngine(const mslp::MslpConfig& config) : m_config(config) {}

    void fit(const ChainView& chain, const MempoolTimeline& timeline, const Windows& w) override
    {
        const auto instances =
            mslp::build_training_instances(chain, timeline, w.first_block, w.train_end, m_config);
        m_model = mslp::Model::train(instances, m_config);
    }

    double estimate_fee(const ChainView& chain, const MempoolSnapshot& snapshot, const Transaction& tx,
                        int theta) override
    {
        return feerate_to_fee(tx.weight, m_model.estimate(chain, snapshot, theta, m_config),
                              /*floor_feerate=*/false);
    }

private:
    mslp::MslpConfig m_config;
    mslp::Model m_model;
};

class FennEngine : public Engine {
public:
    explicit FennEngine(const fenn::FennConfig& config) : m_config(config) {}

    void fit(const ChainView& chain, const MempoolTimeline& timeline, const Windows& w) override
    {
        const fenn::TrainingSet set = fenn::build_training_set(chain, timeline, w.first_block, w.train_end,
                                                               w.train_end, m_config.seq_len);
        m_model = fenn::Model::train(set, m_config);
    }

    double estimate_fee(const ChainView& chain, const MempoolSnapshot& snapshot, const Transaction& tx,
                        int theta) override
    {
        return m_model.estimate_fee(chain, snapshot, tx, theta);
    }

private:
    fenn::FennConfig m_config;
    fenn::Model m_model;
};

std::unique_ptr<Engine> make_engine(const std::string& name, const BenchmarkConfig& config)
{
    if (name == "btcflow") return std::make_unique<BtcFlowEngine>(config.btcflow, config.minutes_per_block);
    if (name == "bcore") return std::make_unique<BCoreEngine>(config.bcore);
    if (name == "mslp") return std::make_unique<MslpEngine>(config.mslp);
    if (name.starts_with("fenn-")) {
        std::string rest = name.substr(5);
        std::string variant = rest;
        std::string ablation = "full";
        if (const size_t dash = rest.find('-'); dash != std::string::npos) {
            variant = rest.substr(0, dash);
            ablation = rest.substr(dash + 1);
        }
        fenn::FennConfig fc = config.fenn;
        const auto v = fenn::variant_from_name(variant);
        const auto a = fenn::ablation_from_name(ablation);
        if (v && a) {
            fc.variant = *v;
            fc.ablation = *a;
            return std::make_unique<FennEngine>(fc);
        }
    }
    throw InvalidInput("benchmark: unknown engine '" + name + "'");
}

} // namespace

bool engine_name_valid(const std::string& name)
{
    try {
        make_engine(name, BenchmarkConfig{});
        return true;
    } catch (const InvalidInput&) {
        return false;
    }
}

const EngineReport* BenchmarkReport::find(const std::string& engine) const
{
    for (const EngineReport& r : engines)
        if (r.engine == engine) return &r;
    return nullptr;
}

BenchmarkReport run_benchmark(const ChainView& chain, const BenchmarkConfig& config)
{
    const Windows w = resolve_split(chain, config.split);
    const MempoolTimeline timeline(chain, w.first_block, w.test_end, config.mempool_scheme);
    const std::vector<TestTx> tests = collect_test_txs(chain, w);

    BenchmarkReport report;
    report.test_transactions = tests.size();
    for (const std::string& name : config.engines) {
        std::unique_ptr<Engine> engine = make_engine(name, config);

        EngineReport er;
        er.engine = name;
        const auto fit_start = Clock::now();
        engine->fit(chain, timeline, w);
        er.train_seconds = seconds_since(fit_start);

        std::vector<double> truth, predicted;
        double latency_total = 0.0;
        BlockHeight current_height = -1;
        for (const TestTx& test : tests) {
            const Transaction& tx = chain.transactions()[test.index];
            const MempoolSnapshot& snapshot = timeline.at(tx.entry_height);
            if (tx.entry_height != current_height) {
                const auto upkeep_start = Clock::now();
                engine->on_height(chain, snapshot);
                er.train_seconds += seconds_since(upkeep_start);
                current_height = tx.entry_height;
            }
            const auto start = Clock::now();
            try {
                const double fee = engine->estimate_fee(chain, snapshot, tx, test.theta);
                const double ms = seconds_since(start) * 1000.0;
                latency_total += ms;
                er.max_estimate_ms = std::max(er.max_estimate_ms, ms);
                truth.push_back(test.true_fee);
                predicted.push_back(fee);
                if (config.collect_predictions)
                    report.predictions.push_back({tx.txid, name, test.theta, test.true_fee, fee});
            } catch (const EstimationError&) {
                ++er.failed;
            }
        }
        er.answered = truth.size();
        er.coverage = tests.empty() ? 1.0
                                    : static_cast<double>(er.answered) / static_cast<double>(tests.size());
        er.mean_estimate_ms = er.answered == 0 ? 0.0 : latency_total / static_cast<double>(er.answered);
        if (!truth.empty()) er.metrics = compute_metrics(truth, predicted);
        report.engines.push_back(std::move(er));
    }
    return report;
}

void write_report_csv(const BenchmarkReport& report, const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows;
    for (const EngineReport& er : report.engines) {
        rows.push_back({er.engine, format_double(er.metrics.rmse), format_double(er.metrics.mape),
                        std::to_string(er.answered), std::to_string(er.failed), format_double(er.coverage),
                        format_double(er.train_seconds), format_double(er.mean_estimate_ms),
                        format_double(er.max_estimate_ms)});
    }
    write_csv(path,
              {"engine", "rmse", "mape", "answered", "failed", "coverage", "train_seconds",
               "mean_estimate_ms", "max_estimate_ms"},
              rows);
}

void write_predictions_csv(const std::vector<PredictionRow>& rows, const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> out;
    out.reserve(rows.size());
    for (const PredictionRow& row : rows) {
        out.push_back({row.txid, row.engine, std::to_string(row.theta), format_double(row.true_fee),
                       format_double(row.pred_fee)});
    }
    write_csv(path, {"txid", "engine", "theta", "true_fee", "pred_fee"}, out);
}

std::vector<RetrainResult> retrain_frequency_experiment(const ChainView& chain, const BenchmarkConfig& config,
                                                        const std::vector<int>& policies)
{
    const Windows w = resolve_split(chain, config.split);
    const MempoolTimeline timeline(chain, w.first_block, w.test_end, config.mempool_scheme);
    const std::vector<TestTx> tests = collect_test_txs(chain, w);

    std::vector<RetrainResult> results;
    for (const int policy : policies) {
        if (policy < 1) throw InvalidInput("retrain experiment: policy must be >= 1");
        RetrainResult result;
        result.policy = policy;

        std::vector<double> truth, predicted;
        fenn::Model model;
        int64_t trained_at_offset = -1;
        for (const TestTx& test : tests) {
            const Transaction& tx = chain.transactions()[test.index];
            const int64_t offset = tx.entry_height - w.test_begin;
            const int64_t event = offset / policy * policy;
            if (event != trained_at_offset) {
                // retrain with everything visible before this boundary
                const BlockHeight label_tip = w.test_begin + event - 1;
                const fenn::TrainingSet set = fenn::build_training_set(chain, timeline, w.first_block,
                                                                       label_tip, label_tip, config.fenn.seq_len);
                model = fenn::Model::train(set, config.fenn);
                trained_at_offset = event;
                ++result.train_events;
            }
            try {
                const double fee =
                    model.estimate_fee(chain, timeline.at(tx.entry_height), tx, test.theta);
                truth.push_back(test.true_fee);
                predicted.push_back(fee);
            } catch (const EstimationError&) {
            }
        }
        if (!truth.empty()) result.metrics = compute_metrics(truth, predicted);
        results.push_back(std::move(result));
    }
    return results;
}

} // namespace feelab::eval
