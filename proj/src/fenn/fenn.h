// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_FENN_FENN_H
#define FEELAB_FENN_FENN_H

#include <fenn/features.h>
#include <nn/adam.h>
#include <nn/layers.h>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace feelab::fenn {

enum class Variant { Lstm, Adv, SelfAtt, Wht, LstmAdv };
enum class Ablation { Full, TxOnly, MemTx, BloTx };

std::string variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);
std::string ablation_name(Ablation a);
std::optional<Ablation> ablation_from_name(const std::string& name);

struct FennConfig {
    Variant variant{Variant::Adv};
    Ablation ablation{Ablation::Full};
    size_t seq_len{3};
    size_t seq_hidden{64};
    size_t head1{64};
    size_t head2{8};
    int epochs{100};
    size_t batch_size{1000};
    double learning_rate{1e-3};
    uint64_t seed{1};
    bool paper_literal_lstm{false};
};

/**
 * The assembled network: a per-variant sequence module over the block
 * features, fused with the transaction vector and the mempool state vector,
 * into a 64-8-1 dense head. Inputs are already standardized (and masked)
 * by the owner.
 */
class Graph {
public:
    Graph(const FennConfig& config, size_t mem_dim);

    nn::ParamSet& params() { return m_params; }
    size_t repr_dim() const { return m_repr_dim; }
    size_t mem_dim() const { return m_mem_dim; }

    /** xtx n×6, xmem n×buckets, xseq seq_len tensors of n×6. Returns n×1. */
    const nn::Tensor& forward(const nn::Tensor& xtx, const nn::Tensor& xmem,
                              const std::vector<nn::Tensor>& xseq);

    /** Accumulates parameter gradients for the cached forward pass. */
    void backward(const nn::Tensor& dpred);

private:
    FennConfig m_config;
    size_t m_mem_dim;
    size_t m_repr_dim;
    nn::ParamSet m_params;

    std::unique_ptr<nn::Lstm> m_lstm;
    std::unique_ptr<nn::AdditiveAttention> m_additive;
    std::unique_ptr<nn::SelfAttention> m_self;
    std::unique_ptr<nn::WeightedAttention> m_weighted;
    nn::MeanPool m_pool;
    std::unique_ptr<nn::Dense> m_head1, m_head2, m_head3;

    size_t m_seq_steps{0};
    nn::Tensor m_fused;
    nn::Tensor m_pred;
};

/** Per-column mean/scale pairs; scale is 1 where the column is constant. */
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const nn::Tensor& x);
    static Standardizer fit(const std::vector<nn::Tensor>& xs); // shared across steps
    void apply(nn::Tensor& x) const;
};

/**
 * A trained fee predictor: graph parameters plus the feature and target
 * standardization fitted on the training set. Prediction is a pure function
 * of (features, parameters); ablated feature groups are zeroed out of the
 * graph, so perturbing them cannot change the output.
 */
class Model {
public:
    static Model train(const TrainingSet& data, const FennConfig& config);

    double predict(const FeatureSet& features) const;

    /** Features at the snapshot height; output clamped to >= 0 satoshi. */
    double estimate_fee(const ChainView& chain, const MempoolSnapshot& mempool, const Transaction& tx,
                        int theta) const;

    const FennConfig& config() const { return m_config; }
    double final_training_loss() const { return m_final_loss; }

    void save(const std::filesystem::path& path) const;
    static Model load(const std::filesystem::path& path);

private:
    FennConfig m_config;
    size_t m_mem_dim{0};
    std::unique_ptr<Graph> m_graph;
    Standardizer m_tx_norm, m_mem_norm, m_seq_norm;
    double m_y_mean{0.0}, m_y_scale{1.0};
    double m_final_loss{0.0};

    bool mem_enabled() const { return m_config.ablation == Ablation::Full || m_config.ablation == Ablation::MemTx; }
    bool seq_enabled() const { return m_config.ablation == Ablation::Full || m_config.ablation == Ablation::BloTx; }
};

} // namespace feelab::fenn

#endif // FEELAB_FENN_FENN_H
