// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <mslp/mslp.h>

#include <core/errors.h>
#include <nn/adam.h>
#include <nn/layers.h>

#include <algorithm>
#include <cmath>

namespace feelab::mslp {

void MslpConfig::validate() const
{
    if (block_capacity <= 0) throw InvalidInput("mslp: block_capacity must be positive");
    if (slice_capacity <= 0 || block_capacity % slice_capacity != 0)
        throw InvalidInput("mslp: slice_capacity must divide block_capacity");
    if (search_step <= 0.0) throw InvalidInput("mslp: search_step must be positive");
    if (max_search_steps < 1) throw InvalidInput("mslp: max_search_steps must be >= 1");
}

int range_of(int64_t loc_b)
{
    if (loc_b <= 4) return 0;
    if (loc_b <= 8) return 1;
    if (loc_b <= 12) return 2;
    return 3;
}

namespace {

/** Mempool sorted by feerate descending, with exact int64 prefix weights. */
struct SortedPool {
    std::vector<double> feerates;       // descending
    std::vector<WeightUnits> weights;   // aligned with feerates
    std::vector<WeightUnits> prefix;    // prefix[i] = sum of weights[0..i]
    WeightUnits total{0};

    explicit SortedPool(const ChainView& chain, const MempoolSnapshot& mempool)
    {
        std::vector<uint32_t> order = mempool.members;
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            const double ra = chain.transactions()[a].feerate;
            const double rb = chain.transactions()[b].feerate;
            if (ra != rb) return ra > rb;
            return a < b;
        });
        feerates.reserve(order.size());
        weights.reserve(order.size());
        prefix.reserve(order.size());
        for (uint32_t i : order) {
            const Transaction& tx = chain.transactions()[i];
            feerates.push_back(tx.feerate);
            weights.push_back(tx.weight);
            total += tx.weight;
            prefix.push_back(total);
        }
    }

    /** Exact weight of txs with feerate >= r. */
    WeightUnits weight_at_or_above(double r) const
    {
        // feerates descending: find the first index with feerate < r
        const auto it = std::lower_bound(feerates.begin(), feerates.end(), r,
                                         [](double have, double want) { return have >= want; });
        const size_t n = static_cast<size_t>(it - feerates.begin());
        return n == 0 ? 0 : prefix[n - 1];
    }
};

VirtualPosition position_for_weight(WeightUnits ahead, const MslpConfig& config)
{
    return {ahead / config.block_capacity + 1, ahead / config.slice_capacity + 1};
}

} // namespace

VirtualPosition virtual_position(const ChainView& chain, const MempoolSnapshot& mempool, double feerate,
                                 const MslpConfig& config)
{
    config.validate();
    if (feerate < 0.0) throw InvalidInput("mslp: feerate must be >= 0");
    WeightUnits ahead = 0;
    for (uint32_t i : mempool.members) {
        const Transaction& tx = chain.transactions()[i];
        if (tx.feerate >= feerate) ahead += tx.weight;
    }
    return position_for_weight(ahead, config);
}

std::vector<Instance> build_training_instances(const ChainView& chain, const MempoolTimeline& timeline,
                                               BlockHeight first_height, BlockHeight last_height,
                                               const MslpConfig& config)
{
    config.validate();
    std::vector<Instance> instances;
    for (BlockHeight h = first_height; h <= last_height; ++h) {
        const MempoolSnapshot& snapshot = timeline.at(h);
        const SortedPool pool(chain, snapshot);
        for (uint32_t i : snapshot.members) {
            const Transaction& tx = chain.transactions()[i];
            if (!tx.confirm_height || *tx.confirm_height > last_height) continue; // label not visible yet
            const VirtualPosition pos = position_for_weight(pool.weight_at_or_above(tx.feerate), config);
            Instance instance;
            instance.feerate = tx.feerate;
            instance.loc_b = pos.block;
            instance.loc_s = pos.slice;
            instance.hit = pos.block >= *tx.confirm_height - h ? 1 : 0;
            instances.push_back(instance);
        }
    }
    return instances;
}

Model Model::train(const std::vector<Instance>& instances, const MslpConfig& config)
{
    config.validate();
    Model model;
    std::array<std::vector<const Instance*>, kRangeCount> routed;
    for (const Instance& instance : instances)
        routed[static_cast<size_t>(range_of(instance.loc_b))].push_back(&instance);

    for (int range = 0; range < kRangeCount; ++range) {
        const auto& batch = routed[static_cast<size_t>(range)];
        RangeModel& out = model.m_ranges[static_cast<size_t>(range)];
        if (batch.empty()) continue; // stays untrained

        // standardize [feerate, loc_b, loc_s] by the range's own sample
        const size_t n = batch.size();
        std::array<double, 3> mean{}, scale{};
        auto feature = [](const Instance& ins, size_t k) {
            return k == 0 ? ins.feerate : k == 1 ? static_cast<double>(ins.loc_b) : static_cast<double>(ins.loc_s);
        };
        for (const Instance* ins : batch)
            for (size_t k = 0; k < 3; ++k) mean[k] += feature(*ins, k);
        for (size_t k = 0; k < 3; ++k) mean[k] /= static_cast<double>(n);
        for (const Instance* ins : batch)
            for (size_t k = 0; k < 3; ++k) {
                const double d = feature(*ins, k) - mean[k];
                scale[k] += d * d;
            }
        for (size_t k = 0; k < 3; ++k) {
            scale[k] = std::sqrt(scale[k] / static_cast<double>(n));
            if (scale[k] < 1e-12) scale[k] = 1.0;
        }

        nn::Tensor x(n, 3);
        std::vector<double> labels(n);
        for (size_t r = 0; r < n; ++r) {
            for (size_t k = 0; k < 3; ++k) x(r, k) = (feature(*batch[r], k) - mean[k]) / scale[k];
            labels[r] = static_cast<double>(batch[r]->hit);
        }

        nn::ParamSet params;
        nn::Dense perceptron(params, "perceptron", 3, 1, nn::Activation::Linear);
        params.init_uniform(config.seed + static_cast<uint64_t>(range));
        nn::Adam adam(params, {.learning_rate = config.learning_rate});
        nn::Tensor dlogits;
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            params.zero_grads();
            const nn::Tensor& logits = perceptron.forward(x);
            nn::bce_logits_loss(logits, labels, dlogits);
            perceptron.backward(dlogits);
            adam.step();
        }

        const nn::Param* w = params.find("perceptron/W");
        const nn::Param* b = params.find("perceptron/b");
        out.trained = true;
        for (size_t k = 0; k < 3; ++k) out.weights[k] = w->value.at(k);
        out.bias = b->value.at(0);
        out.mean = mean;
        out.scale = scale;
    }
    return model;
}

double Model::activation(int range, double feerate, double loc_b, double loc_s) const
{
    const RangeModel& m = m_ranges.at(static_cast<size_t>(range));
    if (!m.trained)
        throw EstimationError(EstimationError::Kind::UntrainedModel,
                              "mslp: no training instances for range " + std::to_string(range));
    const std::array<double, 3> x = {feerate, loc_b, loc_s};
    double z = m.bias;
    for (size_t k = 0; k < 3; ++k) z += m.weights[k] * (x[k] - m.mean[k]) / m.scale[k];
    return z;
}

double Model::estimate(const ChainView& chain, const MempoolSnapshot& mempool, int theta,
                       const MslpConfig& config) const
{
    config.validate();
    if (theta < 1) throw InvalidInput("mslp: theta must be >= 1");

    const SortedPool pool(chain, mempool);
    const int64_t max_block = pool.total / config.block_capacity + 1;
    if (theta > max_block)
        throw EstimationError(EstimationError::Kind::OutOfBoundary,
                              "mslp: theta " + std::to_string(theta) + " beyond mempool depth " +
                                  std::to_string(max_block));

    // Seed the search from the last slice of virtual block theta.
    const WeightUnits block_end = static_cast<WeightUnits>(theta) * config.block_capacity;
    double feerate = 0.0;
    int64_t loc_s = 0;
    if (pool.total >= block_end) {
        // block is full: smallest feerate in its final slice, which is the
        // feerate of the tx covering the block's end boundary
        const auto it = std::lower_bound(pool.prefix.begin(), pool.prefix.end(), block_end);
        feerate = pool.feerates[static_cast<size_t>(it - pool.prefix.begin())];
        loc_s = block_end / config.slice_capacity;
    } else {
        // block not full: seed at zero from the actual last slice
        feerate = 0.0;
        loc_s = pool.total / config.slice_capacity + 1;
    }

    const int range = range_of(theta);
    for (int step = 0; step <= config.max_search_steps; ++step) {
        if (predicts_hit(range, feerate, static_cast<double>(theta), static_cast<double>(loc_s)))
            return feerate;
        feerate += config.search_step;
    }
    throw EstimationError(EstimationError::Kind::MaxFeerateReached,
                          "mslp: no acceptable feerate within " + std::to_string(config.max_search_steps) +
                              " increments");
}

namespace {
constexpr uint32_t kMslpTag = 0x4d534c50; // "MSLP"
}

void Model::save(const std::filesystem::path& path) const
{
    // Flat layout per range r: ranger/W (3), ranger/b (1), ranger/mean (3),
    // ranger/scale (3), ranger/trained (1).
    std::vector<nn::Tensor> storage;
    storage.reserve(static_cast<size_t>(kRangeCount) * 5);
    std::vector<std::pair<std::string, const nn::Tensor*>> entries;
    for (int range = 0; range < kRangeCount; ++range) {
        const RangeModel& m = m_ranges[static_cast<size_t>(range)];
        const std::string prefix = "range" + std::to_string(range);
        auto push = [&](const std::string& name, std::vector<double> values) {
            nn::Tensor t = nn::Tensor::vector(values.size());
            for (size_t i = 0; i < values.size(); ++i) t.at(i) = values[i];
            storage.push_back(std::move(t));
            entries.emplace_back(prefix + name, &storage.back());
        };
        push("/W", {m.weights[0], m.weights[1], m.weights[2]});
        push("/b", {m.bias});
        push("/mean", {m.mean[0], m.mean[1], m.mean[2]});
        push("/scale", {m.scale[0], m.scale[1], m.scale[2]});
        push("/trained", {m.trained ? 1.0 : 0.0});
    }
    nn::write_checkpoint(path, kMslpTag, entries);
}

Model Model::load(const std::filesystem::path& path)
{
    const nn::Checkpoint ckpt = nn::read_checkpoint(path);
    if (ckpt.model_tag != kMslpTag) throw ParseError(path.string() + ": not an mslp checkpoint");
    Model model;
    for (int range = 0; range < kRangeCount; ++range) {
        RangeModel& m = model.m_ranges[static_cast<size_t>(range)];
        const std::string prefix = "range" + std::to_string(range);
        const nn::Tensor& w = ckpt.require(prefix + "/W");
        const nn::Tensor& b = ckpt.require(prefix + "/b");
        const nn::Tensor& mean = ckpt.require(prefix + "/mean");
        const nn::Tensor& scale = ckpt.require(prefix + "/scale");
        m.trained = ckpt.require(prefix + "/trained").at(0) != 0.0;
        for (size_t k = 0; k < 3; ++k) {
            m.weights[k] = w.at(k);
            m.mean[k] = mean.at(k);
            m.scale[k] = scale.at(k);
        }
        m.bias = b.at(0);
    }
    return model;
}

} // namespace feelab::mslp
