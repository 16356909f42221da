// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_NN_PARAMS_H
#define FEELAB_NN_PARAMS_H

#include <core/rng.h>
#include <nn/tensor.h>

#include <deque>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace feelab::nn {

struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
};

/**
 * Named parameters in registration order. Storage is a deque so Param
 * pointers handed to layers stay valid as more parameters are added.
 */
class ParamSet {
public:
    Param& add(const std::string& name, std::vector<size_t> shape);

    /**
     * Seeded init in registration order: matrices uniform in
     * +-sqrt(1/fan_in) with fan_in = cols, vectors (biases) zero.
     */
    void init_uniform(uint64_t seed);

    void zero_grads();
    size_t total_size() const;

    std::deque<Param>& items() { return m_params; }
    const std::deque<Param>& items() const { return m_params; }
    Param* find(const std::string& name);

private:
    std::deque<Param> m_params;
};

/**
 * Checkpoint format: "FLNN" magic, u32 format version, u32 model tag, u64
 * count, then per entry a u32 name length, the name bytes, u32 ndim, u64
 * dims, and the little-endian f64 payload.
 */
void write_checkpoint(const std::filesystem::path& path, uint32_t model_tag,
                      const std::vector<std::pair<std::string, const Tensor*>>& entries);

struct Checkpoint {
    uint32_t model_tag{0};
    std::vector<std::pair<std::string, Tensor>> entries;

    const Tensor* find(const std::string& name) const;
    const Tensor& require(const std::string& name) const; // throws ParseError
};

Checkpoint read_checkpoint(const std::filesystem::path& path);

/** Convenience: every parameter value of the set, in order. */
std::vector<std::pair<std::string, const Tensor*>> checkpoint_entries(const ParamSet& params);

/** Loads same-named entries into the set; names and shapes must match exactly. */
void load_into(ParamSet& params, const Checkpoint& ckpt);

} // namespace feelab::nn

#endif // FEELAB_NN_PARAMS_H
