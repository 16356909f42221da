// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <fenn/fenn.h>

#include <core/errors.h>
#include <core/rng.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace feelab::fenn {

std::string variant_name(Variant v)
{
    switch (v) {
    case Variant::Lstm: return "lstm";
    case Variant::Adv: return "adv";
    case Variant::SelfAtt: return "self";
    case Variant::Wht: return "wht";
    case Variant::LstmAdv: return "lstmadv";
    }
    return "?";
}

std::optional<Variant> variant_from_name(const std::string& name)
{
    for (Variant v : {Variant::Lstm, Variant::Adv, Variant::SelfAtt, Variant::Wht, Variant::LstmAdv})
        if (variant_name(v) == name) return v;
    return std::nullopt;
}

std::string ablation_name(Ablation a)
{
    switch (a) {
    case Ablation::Full: return "full";
    case Ablation::TxOnly: return "tx";
    case Ablation::MemTx: return "memtx";
    case Ablation::BloTx: return "blotx";
    }
    return "?";
}

std::optional<Ablation> ablation_from_name(const std::string& name)
{
    for (Ablation a : {Ablation::Full, Ablation::TxOnly, Ablation::MemTx, Ablation::BloTx})
        if (ablation_name(a) == name) return a;
    return std::nullopt;
}

// ------------------------------------------------------------------ Graph

Graph::Graph(const FennConfig& config, size_t mem_dim) : m_config(config), m_mem_dim(mem_dim)
{
    const size_t hidden = config.seq_hidden;
    switch (config.variant) {
    case Variant::Lstm:
        m_lstm = std::make_unique<nn::Lstm>(m_params, "lstm", kNetworkFeatureDim, hidden,
                                            config.paper_literal_lstm);
        m_repr_dim = hidden;
        break;
    case Variant::Adv:
        m_additive = std::make_unique<nn::AdditiveAttention>(m_params, "adv", kNetworkFeatureDim, hidden);
        m_repr_dim = kNetworkFeatureDim; // additive attention re-mixes the input tokens
        break;
    case Variant::SelfAtt:
        m_self = std::make_unique<nn::SelfAttention>(m_params, "self", kNetworkFeatureDim, hidden);
        m_repr_dim = hidden;
        break;
    case Variant::Wht:
        m_lstm = std::make_unique<nn::Lstm>(m_params, "lstm", kNetworkFeatureDim, hidden,
                                            config.paper_literal_lstm);
        m_weighted = std::make_unique<nn::WeightedAttention>(m_params, "wht", hidden);
        m_repr_dim = hidden;
        break;
    case Variant::LstmAdv:
        m_lstm = std::make_unique<nn::Lstm>(m_params, "lstm", kNetworkFeatureDim, hidden,
                                            config.paper_literal_lstm);
        m_additive = std::make_unique<nn::AdditiveAttention>(m_params, "adv", hidden, hidden);
        m_repr_dim = hidden;
        break;
    }
    const size_t fused = kTxFeatureDim + mem_dim + m_repr_dim;
    m_head1 = std::make_unique<nn::Dense>(m_params, "head1", fused, config.head1, nn::Activation::Relu);
    m_head2 = std::make_unique<nn::Dense>(m_params, "head2", config.head1, config.head2, nn::Activation::Relu);
    m_head3 = std::make_unique<nn::Dense>(m_params, "head3", config.head2, 1, nn::Activation::Linear);
}

const nn::Tensor& Graph::forward(const nn::Tensor& xtx, const nn::Tensor& xmem,
                                 const std::vector<nn::Tensor>& xseq)
{
    if (xseq.size() != m_config.seq_len) throw InvalidInput("fenn: wrong sequence length");
    const size_t n = xtx.rows();
    m_seq_steps = xseq.size();

    const nn::Tensor* repr = nullptr;
    switch (m_config.variant) {
    case Variant::Lstm:
        repr = &m_lstm->forward(xseq).back();
        break;
    case Variant::Adv:
        repr = &m_pool.forward(m_additive->forward(xseq));
        break;
    case Variant::SelfAtt:
        repr = &m_pool.forward(m_self->forward(xseq));
        break;
    case Variant::Wht:
        repr = &m_weighted->forward(m_lstm->forward(xseq));
        break;
    case Variant::LstmAdv:
        repr = &m_pool.forward(m_additive->forward(m_lstm->forward(xseq)));
        break;
    }

    m_fused = nn::Tensor(n, kTxFeatureDim + m_mem_dim + m_repr_dim);
    for (size_t r = 0; r < n; ++r) {
        double* out = m_fused.row(r);
        std::memcpy(out, xtx.row(r), kTxFeatureDim * sizeof(double));
        std::memcpy(out + kTxFeatureDim, xmem.row(r), m_mem_dim * sizeof(double));
        std::memcpy(out + kTxFeatureDim + m_mem_dim, repr->row(r), m_repr_dim * sizeof(double));
    }
    m_pred = m_head3->forward(m_head2->forward(m_head1->forward(m_fused)));
    return m_pred;
}

void Graph::backward(const nn::Tensor& dpred)
{
    const nn::Tensor dfused = m_head1->backward(m_head2->backward(m_head3->backward(dpred)));
    // only the sequence representation slice propagates further
    nn::Tensor drepr(dfused.rows(), m_repr_dim);
    for (size_t r = 0; r < dfused.rows(); ++r)
        std::memcpy(drepr.row(r), dfused.row(r) + kTxFeatureDim + m_mem_dim, m_repr_dim * sizeof(double));

    switch (m_config.variant) {
    case Variant::Lstm: {
        std::vector<nn::Tensor> dhs(m_seq_steps, nn::Tensor(drepr.rows(), m_repr_dim));
        dhs.back() = drepr;
        m_lstm->backward(dhs);
        break;
    }
    case Variant::Adv:
        m_additive->backward(m_pool.backward(drepr));
        break;
    case Variant::SelfAtt:
        m_self->backward(m_pool.backward(drepr));
        break;
    case Variant::Wht:
        m_lstm->backward(m_weighted->backward(drepr));
        break;
    case Variant::LstmAdv:
        m_lstm->backward(m_additive->backward(m_pool.backward(drepr)));
        break;
    }
}

// ------------------------------------------------------------ Standardizer

Standardizer Standardizer::fit(const nn::Tensor& x)
{
    Standardizer s;
    const size_t n = x.rows(), d = x.cols();
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    if (n == 0) return s;
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < d; ++c) s.mean[c] += x(r, c);
    for (size_t c = 0; c < d; ++c) s.mean[c] /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < d; ++c) {
            const double diff = x(r, c) - s.mean[c];
            var[c] += diff * diff;
        }
    for (size_t c = 0; c < d; ++c) {
        s.scale[c] = std::sqrt(var[c] / static_cast<double>(n));
        if (s.scale[c] < 1e-12) s.scale[c] = 1.0;
    }
    return s;
}

Standardizer Standardizer::fit(const std::vector<nn::Tensor>& xs)
{
    Standardizer s;
    if (xs.empty()) return s;
    const size_t d = xs[0].cols();
    size_t total = 0;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (const nn::Tensor& x : xs) {
        total += x.rows();
        for (size_t r = 0; r < x.rows(); ++r)
            for (size_t c = 0; c < d; ++c) s.mean[c] += x(r, c);
    }
    if (total == 0) return s;
    for (size_t c = 0; c < d; ++c) s.mean[c] /= static_cast<double>(total);
    std::vector<double> var(d, 0.0);
    for (const nn::Tensor& x : xs)
        for (size_t r = 0; r < x.rows(); ++r)
            for (size_t c = 0; c < d; ++c) {
                const double diff = x(r, c) - s.mean[c];
                var[c] += diff * diff;
            }
    for (size_t c = 0; c < d; ++c) {
        s.scale[c] = std::sqrt(var[c] / static_cast<double>(total));
        if (s.scale[c] < 1e-12) s.scale[c] = 1.0;
    }
    return s;
}

void Standardizer::apply(nn::Tensor& x) const
{
    for (size_t r = 0; r < x.rows(); ++r) {
        double* row = x.row(r);
        for (size_t c = 0; c < x.cols(); ++c) row[c] = (row[c] - mean[c]) / scale[c];
    }
}

// ------------------------------------------------------------------ Model

Model Model::train(const TrainingSet& data, const FennConfig& config)
{
    if (data.size() == 0) throw InvalidInput("fenn: empty training set");

    Model model;
    model.m_config = config;
    model.m_mem_dim = data.mem.cols();
    model.m_tx_norm = Standardizer::fit(data.tx);
    model.m_mem_norm = Standardizer::fit(data.mem);
    model.m_seq_norm = Standardizer::fit(data.seq);

    // standardized copies; ablated groups become exact zeros
    nn::Tensor xtx = data.tx;
    nn::Tensor xmem = data.mem;
    std::vector<nn::Tensor> xseq = data.seq;
    model.m_tx_norm.apply(xtx);
    if (model.mem_enabled()) {
        model.m_mem_norm.apply(xmem);
    } else {
        xmem.zero();
    }
    if (model.seq_enabled()) {
        for (nn::Tensor& x : xseq) model.m_seq_norm.apply(x);
    } else {
        for (nn::Tensor& x : xseq) x.zero();
    }

    // log1p fees, standardized
    const size_t n = data.size();
    std::vector<double> target(n);
    double y_mean = 0.0;
    for (size_t i = 0; i < n; ++i) {
        target[i] = std::log1p(data.fee[i]);
        y_mean += target[i];
    }
    y_mean /= static_cast<double>(n);
    double y_var = 0.0;
    for (double t : target) y_var += (t - y_mean) * (t - y_mean);
    double y_scale = std::sqrt(y_var / static_cast<double>(n));
    if (y_scale < 1e-12) y_scale = 1.0;
    for (double& t : target) t = (t - y_mean) / y_scale;
    model.m_y_mean = y_mean;
    model.m_y_scale = y_scale;

    model.m_graph = std::make_unique<Graph>(config, model.m_mem_dim);
    model.m_graph->params().init_uniform(config.seed);
    nn::Adam adam(model.m_graph->params(), {.learning_rate = config.learning_rate});

    const size_t batch = std::max<size_t>(1, std::min(config.batch_size, n));
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    Rng shuffle_rng(config.seed ^ 0x5DEECE66DULL);

    nn::Tensor btx(batch, kTxFeatureDim);
    nn::Tensor bmem(batch, model.m_mem_dim);
    std::vector<nn::Tensor> bseq(config.seq_len, nn::Tensor(batch, kNetworkFeatureDim));
    std::vector<double> btarget(batch);
    nn::Tensor dpred;

    double epoch_loss = 0.0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher-Yates with the deterministic rng
        for (size_t i = n; i > 1; --i) {
            const size_t j = static_cast<size_t>(shuffle_rng.uniform_int(0, static_cast<int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }
        epoch_loss = 0.0;
        size_t batches = 0;
        for (size_t begin = 0; begin < n; begin += batch) {
            const size_t count = std::min(batch, n - begin);
            nn::Tensor* ptx = &btx;
            nn::Tensor* pmem = &bmem;
            std::vector<nn::Tensor>* pseq = &bseq;
            nn::Tensor stx, smem; // short tail batch gets its own tensors
            std::vector<nn::Tensor> sseq;
            if (count != batch) {
                stx = nn::Tensor(count, kTxFeatureDim);
                smem = nn::Tensor(count, model.m_mem_dim);
                sseq.assign(config.seq_len, nn::Tensor(count, kNetworkFeatureDim));
                ptx = &stx;
                pmem = &smem;
                pseq = &sseq;
            }
            btarget.resize(count);
            for (size_t r = 0; r < count; ++r) {
                const size_t src = order[begin + r];
                std::memcpy(ptx->row(r), xtx.row(src), kTxFeatureDim * sizeof(double));
                std::memcpy(pmem->row(r), xmem.row(src), model.m_mem_dim * sizeof(double));
                for (size_t s = 0; s < config.seq_len; ++s)
                    std::memcpy((*pseq)[s].row(r), xseq[s].row(src), kNetworkFeatureDim * sizeof(double));
                btarget[r] = target[src];
            }
            model.m_graph->params().zero_grads();
            const nn::Tensor& pred = model.m_graph->forward(*ptx, *pmem, *pseq);
            const double loss = nn::mse_loss(pred, btarget, dpred);
            if (!std::isfinite(loss))
                throw EstimationError(EstimationError::Kind::TrainingDiverged, "fenn: non-finite loss");
            model.m_graph->backward(dpred);
            adam.step();
            epoch_loss += loss;
            ++batches;
        }
        epoch_loss /= static_cast<double>(std::max<size_t>(1, batches));
    }
    model.m_final_loss = epoch_loss;
    return model;
}

double Model::predict(const FeatureSet& features) const
{
    if (!m_graph) throw InvalidInput("fenn: model not trained");
    if (features.mempool.size() != m_mem_dim) throw InvalidInput("fenn: mempool vector width mismatch");
    if (features.seq_len != m_config.seq_len) throw InvalidInput("fenn: sequence length mismatch");

    nn::Tensor xtx(1, kTxFeatureDim);
    for (size_t k = 0; k < kTxFeatureDim; ++k) xtx(0, k) = features.tx[k];
    nn::Tensor xmem(1, m_mem_dim);
    for (size_t k = 0; k < m_mem_dim; ++k) xmem(0, k) = features.mempool[k];
    std::vector<nn::Tensor> xseq(m_config.seq_len, nn::Tensor(1, kNetworkFeatureDim));
    for (size_t s = 0; s < m_config.seq_len; ++s)
        for (size_t k = 0; k < kNetworkFeatureDim; ++k)
            xseq[s](0, k) = features.sequence[s * kNetworkFeatureDim + k];

    m_tx_norm.apply(xtx);
    if (mem_enabled()) {
        m_mem_norm.apply(xmem);
    } else {
        xmem.zero();
    }
    if (seq_enabled()) {
        for (nn::Tensor& x : xseq) m_seq_norm.apply(x);
    } else {
        for (nn::Tensor& x : xseq) x.zero();
    }

    const nn::Tensor& pred = m_graph->forward(xtx, xmem, xseq);
    const double fee = std::expm1(pred(0, 0) * m_y_scale + m_y_mean);
    return std::max(0.0, fee);
}

double Model::estimate_fee(const ChainView& chain, const MempoolSnapshot& mempool, const Transaction& tx,
                           int theta) const
{
    return predict(extract_features(chain, mempool, tx, theta, m_config.seq_len));
}

namespace {

constexpr uint32_t kFennTag = 0x46454e4e; // "FENN"

nn::Tensor scalar_tensor(double v)
{
    nn::Tensor t = nn::Tensor::vector(1);
    t.at(0) = v;
    return t;
}

nn::Tensor vector_tensor(const std::vector<double>& v)
{
    nn::Tensor t = nn::Tensor::vector(v.size());
    for (size_t i = 0; i < v.size(); ++i) t.at(i) = v[i];
    return t;
}

std::vector<double> to_vector(const nn::Tensor& t)
{
    return {t.data(), t.data() + t.size()};
}

} // namespace

void Model::save(const std::filesystem::path& path) const
{
    if (!m_graph) throw InvalidInput("fenn: model not trained");
    std::vector<nn::Tensor> storage;
    storage.reserve(16);
    auto entries = nn::checkpoint_entries(m_graph->params());
    auto push = [&](const std::string& name, nn::Tensor t) {
        storage.push_back(std::move(t));
        entries.emplace_back(name, &storage.back());
    };
    push("meta/config", vector_tensor({static_cast<double>(m_config.variant == Variant::Lstm      ? 0
                                                           : m_config.variant == Variant::Adv     ? 1
                                                           : m_config.variant == Variant::SelfAtt ? 2
                                                           : m_config.variant == Variant::Wht     ? 3
                                                                                                  : 4),
                                       static_cast<double>(m_config.ablation == Ablation::Full     ? 0
                                                           : m_config.ablation == Ablation::TxOnly ? 1
                                                           : m_config.ablation == Ablation::MemTx  ? 2
                                                                                                    : 3),
                                       static_cast<double>(m_config.seq_len),
                                       static_cast<double>(m_config.seq_hidden),
                                       static_cast<double>(m_config.head1), static_cast<double>(m_config.head2),
                                       m_config.paper_literal_lstm ? 1.0 : 0.0,
                                       static_cast<double>(m_mem_dim)}));
    push("norm/tx_mean", vector_tensor(m_tx_norm.mean));
    push("norm/tx_scale", vector_tensor(m_tx_norm.scale));
    push("norm/mem_mean", vector_tensor(m_mem_norm.mean));
    push("norm/mem_scale", vector_tensor(m_mem_norm.scale));
    push("norm/seq_mean", vector_tensor(m_seq_norm.mean));
    push("norm/seq_scale", vector_tensor(m_seq_norm.scale));
    push("norm/y_mean", scalar_tensor(m_y_mean));
    push("norm/y_scale", scalar_tensor(m_y_scale));
    nn::write_checkpoint(path, kFennTag, entries);
}

Model Model::load(const std::filesystem::path& path)
{
    const nn::Checkpoint ckpt = nn::read_checkpoint(path);
    if (ckpt.model_tag != kFennTag) throw ParseError(path.string() + ": not a fenn checkpoint");
    const nn::Tensor& meta = ckpt.require("meta/config");
    if (meta.size() != 8) throw ParseError(path.string() + ": bad meta/config entry");

    Model model;
    const int variant = static_cast<int>(meta.at(0));
    const int ablation = static_cast<int>(meta.at(1));
    model.m_config.variant = variant == 0   ? Variant::Lstm
                             : variant == 1 ? Variant::Adv
                             : variant == 2 ? Variant::SelfAtt
                             : variant == 3 ? Variant::Wht
                                            : Variant::LstmAdv;
    model.m_config.ablation = ablation == 0   ? Ablation::Full
                              : ablation == 1 ? Ablation::TxOnly
                              : ablation == 2 ? Ablation::MemTx
                                              : Ablation::BloTx;
    model.m_config.seq_len = static_cast<size_t>(meta.at(2));
    model.m_config.seq_hidden = static_cast<size_t>(meta.at(3));
    model.m_config.head1 = static_cast<size_t>(meta.at(4));
    model.m_config.head2 = static_cast<size_t>(meta.at(5));
    model.m_config.paper_literal_lstm = meta.at(6) != 0.0;
    model.m_mem_dim = static_cast<size_t>(meta.at(7));

    model.m_tx_norm.mean = to_vector(ckpt.require("norm/tx_mean"));
    model.m_tx_norm.scale = to_vector(ckpt.require("norm/tx_scale"));
    model.m_mem_norm.mean = to_vector(ckpt.require("norm/mem_mean"));
    model.m_mem_norm.scale = to_vector(ckpt.require("norm/mem_scale"));
    model.m_seq_norm.mean = to_vector(ckpt.require("norm/seq_mean"));
    model.m_seq_norm.scale = to_vector(ckpt.require("norm/seq_scale"));
    model.m_y_mean = ckpt.require("norm/y_mean").at(0);
    model.m_y_scale = ckpt.require("norm/y_scale").at(0);

    model.m_graph = std::make_unique<Graph>(model.m_config, model.m_mem_dim);
    nn::load_into(model.m_graph->params(), ckpt);
    return model;
}

} // namespace feelab::fenn
