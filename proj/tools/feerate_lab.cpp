// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

//
// feerate-lab: synthesize or ingest chain data, train estimators, produce
// single estimates, and run the benchmark / retrain-frequency protocols.
//
// Every subcommand that writes artifacts echoes its effective configuration
// to <out>/run_config.json; pass that file back through --config to reproduce
// the run bit for bit.
//

#include <bcore/bcore.h>
#include <btcflow/btcflow.h>
#include <core/errors.h>
#include <eval/harness.h>
#include <fenn/fenn.h>
#include <ingest/chain_io.h>
#include <ingest/reconstruct.h>
#include <ingest/synth.h>
#include <mslp/mslp.h>
#include <nn/gradcheck.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using feelab::BlockHeight;
using feelab::ChainView;
using nlohmann::json;

uint64_t default_seed()
{
    if (const char* env = std::getenv("FEERATE_LAB_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
        std::cerr << "warning: ignoring unparsable FEERATE_LAB_SEED\n";
    }
    return 1;
}

/** Echoed run configuration; rerunning from it reproduces the outputs. */
void write_run_config(const std::filesystem::path& dir, const std::string& subcommand, const json& args)
{
    std::filesystem::create_directories(dir);
    json doc;
    doc["subcommand"] = subcommand;
    doc["args"] = args;
    std::ofstream out(dir / "run_config.json");
    out << doc.dump(2) << '\n';
}

json load_run_config(const std::filesystem::path& path, const std::string& expected_subcommand)
{
    std::ifstream in(path);
    if (!in) throw feelab::ParseError("cannot open config " + path.string());
    json doc;
    in >> doc;
    if (doc.value("subcommand", "") != expected_subcommand)
        throw feelab::ParseError("config " + path.string() + " is for subcommand '" +
                                 doc.value("subcommand", "?") + "'");
    return doc["args"];
}

/** Use the config file's value for any option the user did not pass. */
void apply_config_defaults(CLI::App* cmd, const json& args)
{
    for (const auto& [key, value] : args.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt || !opt->empty()) continue;
        opt->add_result(value.is_string() ? value.get<std::string>() : value.dump());
    }
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"feerate-lab: Bitcoin transaction fee estimation toolkit"};
    app.require_subcommand(1);

    // ---- shared option storage
    std::string data_dir, out_dir, config_path, model_path;
    std::string engine = "btcflow", variant = "adv", ablation = "full", format = "csv";
    std::string era = "post15", mode = "conservative";
    uint64_t seed = default_seed();

    // ---- synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic chain");
    feelab::SynthConfig synth_cfg;
    synth_cfg.seed = seed;
    synth->add_option("--config", config_path, "run_config.json to reproduce");
    synth->add_option("--out", out_dir, "output directory")->required();
    synth->add_option("--blocks", synth_cfg.n_blocks, "number of blocks");
    synth->add_option("--seed", synth_cfg.seed, "rng seed");
    synth->add_option("--block-interval", synth_cfg.mean_block_interval, "mean seconds between blocks");
    synth->add_option("--weight-limit", synth_cfg.block_weight_limit, "block weight limit");
    synth->add_option("--tx-rate", synth_cfg.tx_arrival_rate, "tx arrivals per minute");
    synth->add_option("--feerate-mu", synth_cfg.feerate_log_mu, "log-mean of the feerate draw");
    synth->add_option("--feerate-sigma", synth_cfg.feerate_log_sigma, "log-sd of the feerate draw");
    synth->add_option("--drift", synth_cfg.feerate_drift_per_block, "feerate log-mu drift per block");
    synth->add_option("--weight-mu", synth_cfg.weight_log_mu, "log-mean of the tx weight draw");
    synth->add_option("--weight-sigma", synth_cfg.weight_log_sigma, "log-sd of the tx weight draw");
    synth->add_option("--burst", synth_cfg.burst_amplitude, "arrival-rate burst amplitude [0,1)");
    synth->add_option("--burst-period", synth_cfg.burst_period_blocks, "burst period in blocks");
    synth->add_option("--format", format, "csv or json");

    // ---- ingest
    auto* ingest = app.add_subcommand("ingest", "load, validate and summarize a chain dump");
    ingest->add_option("--config", config_path, "run_config.json to reproduce");
    ingest->add_option("--data", data_dir, "directory with chain.csv/txs.csv (or .json)")->required();
    ingest->add_option("--out", out_dir, "optional directory for a normalized csv copy");

    // ---- estimate
    auto* estimate = app.add_subcommand("estimate", "one estimate from an engine");
    double est_minutes = 0.0;
    int est_blocks = 0;
    double est_p = 0.8;
    int64_t est_weight = 800;
    estimate->add_option("--config", config_path, "run_config.json to reproduce");
    estimate->add_option("--data", data_dir, "chain data directory")->required();
    estimate->add_option("--engine", engine, "btcflow|bcore|mslp|fenn")->required();
    estimate->add_option("--minutes", est_minutes, "horizon in minutes (btcflow)");
    estimate->add_option("--blocks", est_blocks, "horizon in blocks (bcore/mslp/fenn)");
    estimate->add_option("--p", est_p, "btcflow block-production confidence");
    estimate->add_option("--era", era, "bcore era: pre15|post15");
    estimate->add_option("--mode", mode, "bcore mode: conservative|economical");
    estimate->add_option("--model", model_path, "checkpoint (mslp/fenn)");
    estimate->add_option("--weight", est_weight, "tx weight for fee conversion (fenn)");

    // ---- train
    auto* train = app.add_subcommand("train", "train mslp or fenn and write a checkpoint");
    int train_epochs = 0; // 0 = engine default
    int64_t train_blocks_opt = 0;
    train->add_option("--config", config_path, "run_config.json to reproduce");
    train->add_option("--data", data_dir, "chain data directory")->required();
    train->add_option("--engine", engine, "mslp|fenn")->required();
    train->add_option("--variant", variant, "fenn variant: lstm|adv|self|wht|lstmadv");
    train->add_option("--ablation", ablation, "fenn features: tx|memtx|blotx|full");
    train->add_option("--epochs", train_epochs, "training epochs");
    train->add_option("--seed", seed, "rng seed");
    train->add_option("--train-blocks", train_blocks_opt, "restrict training to the first N blocks");
    train->add_option("--out", out_dir, "output directory")->required();

    // ---- evaluate
    auto* evaluate = app.add_subcommand("evaluate", "benchmark engines on a train/test split");
    feelab::eval::BenchmarkConfig bench;
    std::string engines_opt = "all";
    int fenn_epochs = 30;
    bool dump_predictions = false;
    evaluate->add_option("--config", config_path, "run_config.json to reproduce");
    evaluate->add_option("--data", data_dir, "chain data directory")->required();
    evaluate->add_option("--engines", engines_opt, "comma list or 'all'");
    evaluate->add_option("--train", bench.split.train_blocks, "training blocks");
    evaluate->add_option("--test", bench.split.test_blocks, "test blocks");
    evaluate->add_option("--offset", bench.split.offset, "blocks to skip before the split");
    evaluate->add_option("--fenn-epochs", fenn_epochs, "epochs for fenn engines");
    evaluate->add_option("--block-capacity", bench.btcflow.block_capacity,
                         "BLOCK weight units (btcflow/mslp)");
    evaluate->add_option("--seed", seed, "rng seed");
    evaluate->add_flag("--dump-predictions", dump_predictions, "write predictions.csv");
    evaluate->add_option("--out", out_dir, "output directory")->required();

    // ---- compare (retrain frequency)
    auto* compare = app.add_subcommand("compare", "retrain-frequency experiment for fenn");
    std::string policies_opt = "1,3,5,9,15,45";
    feelab::eval::BenchmarkConfig compare_cfg;
    int compare_epochs = 30;
    compare->add_option("--config", config_path, "run_config.json to reproduce");
    compare->add_option("--data", data_dir, "chain data directory")->required();
    compare->add_option("--policies", policies_opt, "comma list of retrain intervals");
    compare->add_option("--train", compare_cfg.split.train_blocks, "training blocks");
    compare->add_option("--test", compare_cfg.split.test_blocks, "test blocks");
    compare->add_option("--variant", variant, "fenn variant");
    compare->add_option("--fenn-epochs", compare_epochs, "epochs per retrain");
    compare->add_option("--block-capacity", compare_cfg.btcflow.block_capacity, "BLOCK weight units");
    compare->add_option("--seed", seed, "rng seed");
    compare->add_option("--out", out_dir, "output directory")->required();

    // ---- gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference checks for every layer and variant");
    double gc_tolerance = 1e-4;
    gradcheck->add_option("--tolerance", gc_tolerance, "max relative error accepted");

    CLI11_PARSE(app, argc, argv);

    // Apply --config file values for options not given on the command line,
    // then reparse so validators still run.
    if (!config_path.empty()) {
        CLI::App* active = app.get_subcommands().front();
        apply_config_defaults(active, load_run_config(config_path, active->get_name()));
    }

    if (synth->parsed()) {
        synth_cfg.validate();
        const ChainView chain = feelab::synth_generate(synth_cfg);
        if (format == "json") {
            feelab::save_chain_json(chain, out_dir);
        } else {
            feelab::save_chain_csv(chain, out_dir);
        }
        write_run_config(out_dir, "synth",
                         json{{"out", out_dir},
                              {"blocks", synth_cfg.n_blocks},
                              {"seed", synth_cfg.seed},
                              {"block-interval", synth_cfg.mean_block_interval},
                              {"weight-limit", synth_cfg.block_weight_limit},
                              {"tx-rate", synth_cfg.tx_arrival_rate},
                              {"feerate-mu", synth_cfg.feerate_log_mu},
                              {"feerate-sigma", synth_cfg.feerate_log_sigma},
                              {"drift", synth_cfg.feerate_drift_per_block},
                              {"weight-mu", synth_cfg.weight_log_mu},
                              {"weight-sigma", synth_cfg.weight_log_sigma},
                              {"burst", synth_cfg.burst_amplitude},
                              {"burst-period", synth_cfg.burst_period_blocks},
                              {"format", format}});
        std::cout << "wrote " << chain.blocks().size() << " blocks, " << chain.transactions().size()
                  << " txs to " << out_dir << "\n";
        return 0;
    }

    if (ingest->parsed()) {
        const ChainView chain = feelab::load_chain(data_dir);
        std::cout << "blocks: " << chain.blocks().size() << "\n"
                  << "transactions: " << chain.transactions().size() << "\n"
                  << "tip height: " << chain.tip_height() << "\n";
        size_t confirmed = 0;
        for (const auto& tx : chain.transactions()) confirmed += tx.confirmed() ? 1 : 0;
        std::cout << "confirmed: " << confirmed << "\n";
        if (!out_dir.empty()) {
            feelab::save_chain_csv(chain, out_dir);
            write_run_config(out_dir, "ingest", json{{"data", data_dir}, {"out", out_dir}});
            std::cout << "normalized copy written to " << out_dir << "\n";
        }
        return 0;
    }

    if (estimate->parsed()) {
        const ChainView chain = feelab::load_chain(data_dir);
        if (chain.empty()) throw feelab::InvalidInput("estimate: chain is empty");
        const feelab::MempoolSnapshot snapshot = feelab::reconstruct_mempool(chain, chain.tip_height());

        if (engine == "btcflow") {
            if (est_minutes <= 0) throw feelab::InvalidInput("estimate: btcflow needs --minutes");
            feelab::btcflow::BtcFlowConfig cfg;
            cfg.quantile = est_p;
            const auto flows = feelab::btcflow::build_flows(chain, snapshot, est_minutes);
            const auto est = feelab::btcflow::estimate(est_minutes, flows, cfg);
            if (est.low_confidence)
                std::cerr << "warning: zero projected outflow, returning the maximum scale\n";
            std::cout << est.feerate << "\n";
            return 0;
        }
        if (engine == "bcore") {
            if (est_blocks <= 0) throw feelab::InvalidInput("estimate: bcore needs --blocks");
            feelab::bcore::BCoreConfig cfg;
            cfg.era = era == "pre15" ? feelab::bcore::Era::Pre15 : feelab::bcore::Era::Post15;
            cfg.mode = mode == "economical" ? feelab::bcore::ResultMode::Economical
                                            : feelab::bcore::ResultMode::Conservative;
            feelab::bcore::Estimator estimator(cfg);
            estimator.fit(chain, snapshot);
            std::cout << estimator.estimate(est_blocks) << "\n";
            return 0;
        }
        if (engine == "mslp") {
            if (est_blocks <= 0) throw feelab::InvalidInput("estimate: mslp needs --blocks");
            if (model_path.empty()) throw feelab::InvalidInput("estimate: mslp needs --model");
            const auto model = feelab::mslp::Model::load(model_path);
            std::cout << model.estimate(chain, snapshot, est_blocks, feelab::mslp::MslpConfig{}) << "\n";
            return 0;
        }
        if (engine == "fenn") {
            if (est_blocks <= 0) throw feelab::InvalidInput("estimate: fenn needs --blocks");
            if (model_path.empty()) throw feelab::InvalidInput("estimate: fenn needs --model");
            const auto model = feelab::fenn::Model::load(model_path);
            feelab::Transaction skeleton;
            skeleton.txid = "estimate";
            skeleton.weight = est_weight;
            skeleton.size = (est_weight + 3) / 4;
            skeleton.fee = 0;
            skeleton.feerate = 0.0;
            const feelab::MempoolSnapshot snap =
                feelab::reconstruct_mempool(chain, chain.tip_height(), feelab::BucketScheme::geometric());
            std::cout << model.estimate_fee(chain, snap, skeleton, est_blocks) << "\n";
            return 0;
        }
        throw feelab::InvalidInput("estimate: unknown engine '" + engine + "'");
    }

    if (train->parsed()) {
        const ChainView chain = feelab::load_chain(data_dir);
        if (chain.empty()) throw feelab::InvalidInput("train: chain is empty");
        const BlockHeight first = chain.blocks().front().height;
        BlockHeight last = chain.tip_height();
        if (train_blocks_opt > 0 &&
            train_blocks_opt < static_cast<int64_t>(chain.blocks().size()))
            last = chain.blocks()[static_cast<size_t>(train_blocks_opt - 1)].height;
        const feelab::MempoolTimeline timeline(chain, first, last, feelab::BucketScheme::geometric());
        std::filesystem::create_directories(out_dir);

        if (engine == "mslp") {
            feelab::mslp::MslpConfig cfg;
            cfg.seed = seed;
            if (train_epochs > 0) cfg.epochs = train_epochs;
            const auto instances = feelab::mslp::build_training_instances(chain, timeline, first, last, cfg);
            const auto model = feelab::mslp::Model::train(instances, cfg);
            const auto path = std::filesystem::path(out_dir) / "mslp.ckpt";
            model.save(path);
            write_run_config(out_dir, "train",
                             json{{"data", data_dir},
                                  {"engine", engine},
                                  {"epochs", cfg.epochs},
                                  {"seed", seed},
                                  {"train-blocks", train_blocks_opt},
                                  {"out", out_dir}});
            std::cout << "trained on " << instances.size() << " instances -> " << path.string() << "\n";
            return 0;
        }
        if (engine == "fenn") {
            feelab::fenn::FennConfig cfg;
            const auto v = feelab::fenn::variant_from_name(variant);
            const auto a = feelab::fenn::ablation_from_name(ablation);
            if (!v) throw feelab::InvalidInput("train: unknown variant '" + variant + "'");
            if (!a) throw feelab::InvalidInput("train: unknown ablation '" + ablation + "'");
            cfg.variant = *v;
            cfg.ablation = *a;
            cfg.seed = seed;
            if (train_epochs > 0) cfg.epochs = train_epochs;
            const auto set = feelab::fenn::build_training_set(chain, timeline, first, last, last, cfg.seq_len);
            const auto model = feelab::fenn::Model::train(set, cfg);
            const auto path = std::filesystem::path(out_dir) / ("fenn-" + variant + ".ckpt");
            model.save(path);
            write_run_config(out_dir, "train",
                             json{{"data", data_dir},
                                  {"engine", engine},
                                  {"variant", variant},
                                  {"ablation", ablation},
                                  {"epochs", cfg.epochs},
                                  {"seed", seed},
                                  {"train-blocks", train_blocks_opt},
                                  {"out", out_dir}});
            std::cout << "trained on " << set.size() << " instances (final loss " << model.final_training_loss()
                      << ") -> " << path.string() << "\n";
            return 0;
        }
        throw feelab::InvalidInput("train: unknown engine '" + engine + "'");
    }

    if (evaluate->parsed()) {
        const ChainView chain = feelab::load_chain(data_dir);
        bench.fenn.epochs = fenn_epochs;
        bench.fenn.seed = seed;
        bench.mslp.seed = seed;
        bench.mslp.block_capacity = bench.btcflow.block_capacity;
        bench.collect_predictions = dump_predictions;
        if (engines_opt == "all") {
            bench.engines = {"btcflow", "bcore", "mslp", "fenn-adv"};
        } else {
            bench.engines.clear();
            std::string rest = engines_opt;
            while (!rest.empty()) {
                const size_t comma = rest.find(',');
                bench.engines.push_back(rest.substr(0, comma));
                if (comma == std::string::npos) break;
                rest = rest.substr(comma + 1);
            }
        }
        const auto report = feelab::eval::run_benchmark(chain, bench);
        std::filesystem::create_directories(out_dir);
        feelab::eval::write_report_csv(report, std::filesystem::path(out_dir) / "report.csv");
        if (dump_predictions)
            feelab::eval::write_predictions_csv(report.predictions,
                                                std::filesystem::path(out_dir) / "predictions.csv");
        write_run_config(out_dir, "evaluate",
                         json{{"data", data_dir},
                              {"engines", engines_opt},
                              {"train", bench.split.train_blocks},
                              {"test", bench.split.test_blocks},
                              {"offset", bench.split.offset},
                              {"fenn-epochs", fenn_epochs},
                              {"block-capacity", bench.btcflow.block_capacity},
                              {"seed", seed},
                              {"out", out_dir}});
        std::printf("%-18s %12s %10s %9s %8s %9s\n", "engine", "rmse", "mape", "coverage", "train_s",
                    "est_ms");
        for (const auto& er : report.engines)
            std::printf("%-18s %12.1f %10.2f %8.1f%% %8.2f %9.3f\n", er.engine.c_str(), er.metrics.rmse,
                        er.metrics.mape, er.coverage * 100.0, er.train_seconds, er.mean_estimate_ms);
        return 0;
    }

    if (compare->parsed()) {
        const ChainView chain = feelab::load_chain(data_dir);
        compare_cfg.fenn.epochs = compare_epochs;
        compare_cfg.fenn.seed = seed;
        const auto v = feelab::fenn::variant_from_name(variant);
        if (!v) throw feelab::InvalidInput("compare: unknown variant '" + variant + "'");
        compare_cfg.fenn.variant = *v;
        std::vector<int> policies;
        {
            std::string rest = policies_opt;
            while (!rest.empty()) {
                const size_t comma = rest.find(',');
                policies.push_back(std::stoi(rest.substr(0, comma)));
                if (comma == std::string::npos) break;
                rest = rest.substr(comma + 1);
            }
        }
        const auto results = feelab::eval::retrain_frequency_experiment(chain, compare_cfg, policies);
        std::filesystem::create_directories(out_dir);
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : results)
            rows.push_back({std::to_string(r.policy), feelab::format_double(r.metrics.rmse),
                            feelab::format_double(r.metrics.mape), std::to_string(r.train_events)});
        feelab::write_csv(std::filesystem::path(out_dir) / "retrain.csv",
                          {"policy", "rmse", "mape", "train_events"}, rows);
        write_run_config(out_dir, "compare",
                         json{{"data", data_dir},
                              {"policies", policies_opt},
                              {"train", compare_cfg.split.train_blocks},
                              {"test", compare_cfg.split.test_blocks},
                              {"variant", variant},
                              {"fenn-epochs", compare_epochs},
                              {"block-capacity", compare_cfg.btcflow.block_capacity},
                              {"seed", seed},
                              {"out", out_dir}});
        for (const auto& r : results)
            std::printf("policy %2d: rmse %.1f mape %.2f (%d trainings)\n", r.policy, r.metrics.rmse,
                        r.metrics.mape, r.train_events);
        return 0;
    }

    if (gradcheck->parsed()) {
        // layer-by-layer and full-graph finite-difference checks
        using namespace feelab;
        bool all_ok = true;
        auto check = [&](const std::string& name, nn::ParamSet& params, const std::function<double()>& loss,
                         const std::function<double()>& loss_grad) {
            const auto report = nn::grad_check(params, loss, loss_grad);
            const bool ok = report.passes(gc_tolerance);
            all_ok = all_ok && ok;
            std::printf("%-24s max rel err %.3e (%zu params) %s\n", name.c_str(), report.max_rel_err,
                        report.checked, ok ? "ok" : "FAIL");
        };

        Rng rng(42);
        auto random_tensor = [&](size_t r, size_t c) {
            nn::Tensor t(r, c);
            for (size_t i = 0; i < t.size(); ++i) t.at(i) = rng.uniform(-1.0, 1.0);
            return t;
        };

        {
            nn::ParamSet params;
            nn::Dense dense(params, "dense", 4, 3, nn::Activation::Tanh);
            params.init_uniform(7);
            const nn::Tensor x = random_tensor(5, 4);
            auto loss = [&] {
                const nn::Tensor& y = dense.forward(x);
                double s = 0.0;
                for (size_t i = 0; i < y.size(); ++i) s += y.at(i) * y.at(i);
                return s;
            };
            auto loss_grad = [&] {
                const nn::Tensor& y = dense.forward(x);
                nn::Tensor dy(y.rows(), y.cols());
                double s = 0.0;
                for (size_t i = 0; i < y.size(); ++i) {
                    s += y.at(i) * y.at(i);
                    dy.at(i) = 2.0 * y.at(i);
                }
                dense.backward(dy);
                return s;
            };
            check("dense", params, loss, loss_grad);
        }

        for (const auto variant_case :
             {fenn::Variant::Lstm, fenn::Variant::Adv, fenn::Variant::SelfAtt, fenn::Variant::Wht,
              fenn::Variant::LstmAdv}) {
            fenn::FennConfig cfg;
            cfg.variant = variant_case;
            cfg.seq_hidden = 8;
            fenn::Graph graph(cfg, 12);
            graph.params().init_uniform(11);
            const nn::Tensor xtx = random_tensor(3, fenn::kTxFeatureDim);
            const nn::Tensor xmem = random_tensor(3, 12);
            std::vector<nn::Tensor> xseq;
            for (size_t s = 0; s < cfg.seq_len; ++s) xseq.push_back(random_tensor(3, fenn::kNetworkFeatureDim));
            std::vector<double> target = {0.3, -0.2, 0.9};
            nn::Tensor dpred;
            auto loss = [&] {
                const nn::Tensor& pred = graph.forward(xtx, xmem, xseq);
                nn::Tensor scratch;
                return nn::mse_loss(pred, target, scratch);
            };
            auto loss_grad = [&] {
                const nn::Tensor& pred = graph.forward(xtx, xmem, xseq);
                const double l = nn::mse_loss(pred, target, dpred);
                graph.backward(dpred);
                return l;
            };
            check("fenn-" + fenn::variant_name(variant_case), graph.params(), loss, loss_grad);
        }
        return all_ok ? 0 : 1;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run_cli(argc, argv);
    } catch (const feelab::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const feelab::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const feelab::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const feelab::EstimationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
