// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <nn/params.h>

#include <core/errors.h>

#include <cmath>
#include <cstring>
#include <fstream>

namespace feelab::nn {

Param& ParamSet::add(const std::string& name, std::vector<size_t> shape)
{
    if (find(name)) throw InvalidInput("ParamSet: duplicate parameter " + name);
    Param p;
    p.name = name;
    p.value = Tensor(shape);
    p.grad = Tensor(std::move(shape));
    m_params.push_back(std::move(p));
    return m_params.back();
}

void ParamSet::init_uniform(uint64_t seed)
{
    Rng rng(seed);
    for (Param& p : m_params) {
        if (p.value.ndim() < 2) {
            p.value.zero();
            continue;
        }
        const double bound = std::sqrt(1.0 / static_cast<double>(p.value.cols()));
        for (size_t i = 0; i < p.value.size(); ++i) p.value.at(i) = rng.uniform(-bound, bound);
    }
}

void ParamSet::zero_grads()
{
    for (Param& p : m_params) p.grad.zero();
}

size_t ParamSet::total_size() const
{
    size_t total = 0;
    for (const Param& p : m_params) total += p.value.size();
    return total;
}

Param* ParamSet::find(const std::string& name)
{
    for (Param& p : m_params)
        if (p.name == name) return &p;
    return nullptr;
}

namespace {

constexpr char kMagic[4] = {'F', 'L', 'N', 'N'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path)
{
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw ParseError(path + ": truncated checkpoint");
    return value;
}

} // namespace

void write_checkpoint(const std::filesystem::path& path, uint32_t model_tag,
                      const std::vector<std::pair<std::string, const Tensor*>>& entries)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out.write(kMagic, 4);
    write_raw(out, kFormatVersion);
    write_raw(out, model_tag);
    write_raw(out, static_cast<uint64_t>(entries.size()));
    for (const auto& [name, tensor] : entries) {
        write_raw(out, static_cast<uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_raw(out, static_cast<uint32_t>(tensor->ndim()));
        for (size_t d : tensor->shape()) write_raw(out, static_cast<uint64_t>(d));
        out.write(reinterpret_cast<const char*>(tensor->data()),
                  static_cast<std::streamsize>(tensor->size() * sizeof(double)));
    }
}

Checkpoint read_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw ParseError(path.string() + ": not a checkpoint file");
    const auto version = read_raw<uint32_t>(in, path.string());
    if (version != kFormatVersion)
        throw ParseError(path.string() + ": unsupported checkpoint version " + std::to_string(version));

    Checkpoint ckpt;
    ckpt.model_tag = read_raw<uint32_t>(in, path.string());
    const auto count = read_raw<uint64_t>(in, path.string());
    for (uint64_t e = 0; e < count; ++e) {
        const auto name_len = read_raw<uint32_t>(in, path.string());
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto ndim = read_raw<uint32_t>(in, path.string());
        std::vector<size_t> shape(ndim);
        for (auto& d : shape) d = static_cast<size_t>(read_raw<uint64_t>(in, path.string()));
        Tensor tensor(shape);
        in.read(reinterpret_cast<char*>(tensor.data()),
                static_cast<std::streamsize>(tensor.size() * sizeof(double)));
        if (!in) throw ParseError(path.string() + ": truncated checkpoint");
        ckpt.entries.emplace_back(std::move(name), std::move(tensor));
    }
    return ckpt;
}

const Tensor* Checkpoint::find(const std::string& name) const
{
    for (const auto& [n, t] : entries)
        if (n == name) return &t;
    return nullptr;
}

const Tensor& Checkpoint::require(const std::string& name) const
{
    const Tensor* t = find(name);
    if (!t) throw ParseError("checkpoint: missing entry '" + name + "'");
    return *t;
}

std::vector<std::pair<std::string, const Tensor*>> checkpoint_entries(const ParamSet& params)
{
    std::vector<std::pair<std::string, const Tensor*>> entries;
    entries.reserve(params.items().size());
    for (const Param& p : params.items()) entries.emplace_back(p.name, &p.value);
    return entries;
}

void load_into(ParamSet& params, const Checkpoint& ckpt)
{
    for (Param& p : params.items()) {
        const Tensor& stored = ckpt.require(p.name);
        if (stored.shape() != p.value.shape())
            throw ParseError("checkpoint: shape mismatch for '" + p.name + "'");
        p.value = stored;
    }
}

} // namespace feelab::nn
