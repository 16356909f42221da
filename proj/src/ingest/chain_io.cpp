// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <ingest/chain_io.h>

#include <core/errors.h>
#include <ingest/csv.h>

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <optional>

namespace feelab {

namespace {

using nlohmann::json;

const std::vector<std::string> kBlockHeader = {"height",       "timestamp", "interval", "size",
                                               "difficulty",   "total_weight", "tx_count", "mean_feerate"};
const std::vector<std::string> kTxHeader = {"txid",   "version",        "size",         "weight",
                                            "inputs", "outputs",        "fee",          "first_seen_time",
                                            "entry_height", "leave_height", "confirm_height", "confirm_time"};

struct FieldRef {
    std::string file;
    size_t line;
    std::string name;

    std::string where() const { return file + " line " + std::to_string(line) + ": field '" + name + "'"; }
};

int64_t parse_int(const std::string& text, const FieldRef& ref)
{
    int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError(ref.where() + ": expected integer, got '" + text + "'");
    return value;
}

double parse_real(const std::string& text, const FieldRef& ref)
{
    try {
        size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ParseError(ref.where() + ": expected number, got '" + text + "'");
    }
}

std::optional<int64_t> parse_opt_int(const std::string& text, const FieldRef& ref)
{
    if (text.empty()) return std::nullopt;
    return parse_int(text, ref);
}

class RowReader {
public:
    RowReader(const CsvTable& table, const std::string& file, const std::vector<std::string>& required)
        : m_table(table), m_file(file)
    {
        for (const auto& name : required) {
            const int col = table.column(name);
            if (col < 0) throw ParseError(file + ": missing required column '" + name + "'");
            m_columns.emplace(name, col);
        }
    }

    const std::string& text(size_t row, const std::string& name) const
    {
        return m_table.rows[row][m_columns.at(name)];
    }

    FieldRef ref(size_t row, const std::string& name) const
    {
        return {m_file, m_table.line_numbers[row], name};
    }

    int64_t get_int(size_t row, const std::string& name) const { return parse_int(text(row, name), ref(row, name)); }
    double get_real(size_t row, const std::string& name) const { return parse_real(text(row, name), ref(row, name)); }
    std::optional<int64_t> get_opt(size_t row, const std::string& name) const
    {
        return parse_opt_int(text(row, name), ref(row, name));
    }

private:
    const CsvTable& m_table;
    std::string m_file;
    std::unordered_map<std::string, int> m_columns;
};

std::vector<Block> load_blocks_csv(const std::filesystem::path& path)
{
    const CsvTable table = read_csv(path);
    const RowReader reader(table, path.filename().string(), kBlockHeader);
    std::vector<Block> blocks;
    blocks.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        Block b;
        b.height = reader.get_int(i, "height");
        b.timestamp = reader.get_int(i, "timestamp");
        b.interval = reader.get_int(i, "interval");
        b.size = reader.get_int(i, "size");
        b.difficulty = reader.get_real(i, "difficulty");
        b.total_weight = reader.get_int(i, "total_weight");
        b.tx_count = reader.get_int(i, "tx_count");
        b.mean_feerate = reader.get_real(i, "mean_feerate");
        blocks.push_back(b);
    }
    return blocks;
}

std::vector<Transaction> load_txs_csv(const std::filesystem::path& path)
{
    const CsvTable table = read_csv(path);
    const RowReader reader(table, path.filename().string(), kTxHeader);
    std::vector<Transaction> txs;
    txs.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        Transaction tx;
        tx.txid = reader.text(i, "txid");
        if (tx.txid.empty()) throw ParseError(reader.ref(i, "txid").where() + ": must be non-empty");
        tx.version = static_cast<int32_t>(reader.get_int(i, "version"));
        tx.size = reader.get_int(i, "size");
        tx.weight = reader.get_int(i, "weight");
        tx.input_count = static_cast<int32_t>(reader.get_int(i, "inputs"));
        tx.output_count = static_cast<int32_t>(reader.get_int(i, "outputs"));
        tx.fee = reader.get_int(i, "fee");
        tx.first_seen_time = reader.get_int(i, "first_seen_time");
        tx.entry_height = reader.get_int(i, "entry_height");
        tx.leave_height = reader.get_opt(i, "leave_height");
        tx.confirm_height = reader.get_opt(i, "confirm_height");
        tx.confirm_time = reader.get_opt(i, "confirm_time");
        if (tx.weight <= 0)
            throw ValidationError(reader.ref(i, "weight").where() + ": weight must be positive");
        tx.feerate = compute_feerate(tx.fee, tx.weight);
        txs.push_back(std::move(tx));
    }
    return txs;
}

json load_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw ParseError(path.string() + ": expected a top-level array");
    return doc;
}

template <typename T>
T json_field(const json& row, const std::string& file, size_t index, const std::string& name)
{
    if (!row.contains(name))
        throw ParseError(file + " entry " + std::to_string(index) + ": missing field '" + name + "'");
    try {
        return row.at(name).get<T>();
    } catch (const json::exception&) {
        throw ParseError(file + " entry " + std::to_string(index) + ": field '" + name + "' has wrong type");
    }
}

std::optional<int64_t> json_opt_field(const json& row, const std::string& name)
{
    if (!row.contains(name) || row.at(name).is_null()) return std::nullopt;
    return row.at(name).get<int64_t>();
}

std::vector<Block> load_blocks_json(const std::filesystem::path& path)
{
    const json doc = load_json_file(path);
    const std::string file = path.filename().string();
    std::vector<Block> blocks;
    for (size_t i = 0; i < doc.size(); ++i) {
        const json& row = doc[i];
        Block b;
        b.height = json_field<int64_t>(row, file, i, "height");
        b.timestamp = json_field<int64_t>(row, file, i, "timestamp");
        b.interval = json_field<int64_t>(row, file, i, "interval");
        b.size = json_field<int64_t>(row, file, i, "size");
        b.difficulty = json_field<double>(row, file, i, "difficulty");
        b.total_weight = json_field<int64_t>(row, file, i, "total_weight");
        b.tx_count = json_field<int64_t>(row, file, i, "tx_count");
        b.mean_feerate = json_field<double>(row, file, i, "mean_feerate");
        blocks.push_back(b);
    }
    return blocks;
}

std::vector<Transaction> load_txs_json(const std::filesystem::path& path)
{
    const json doc = load_json_file(path);
    const std::string file = path.filename().string();
    std::vector<Transaction> txs;
    for (size_t i = 0; i < doc.size(); ++i) {
        const json& row = doc[i];
        Transaction tx;
        tx.txid = json_field<std::string>(row, file, i, "txid");
        tx.version = static_cast<int32_t>(json_field<int64_t>(row, file, i, "version"));
        tx.size = json_field<int64_t>(row, file, i, "size");
        tx.weight = json_field<int64_t>(row, file, i, "weight");
        tx.input_count = static_cast<int32_t>(json_field<int64_t>(row, file, i, "inputs"));
        tx.output_count = static_cast<int32_t>(json_field<int64_t>(row, file, i, "outputs"));
        tx.fee = json_field<int64_t>(row, file, i, "fee");
        tx.first_seen_time = json_field<int64_t>(row, file, i, "first_seen_time");
        tx.entry_height = json_field<int64_t>(row, file, i, "entry_height");
        tx.leave_height = json_opt_field(row, "leave_height");
        tx.confirm_height = json_opt_field(row, "confirm_height");
        tx.confirm_time = json_opt_field(row, "confirm_time");
        if (tx.weight <= 0)
            throw ValidationError(file + " entry " + std::to_string(i) + ": weight must be positive");
        tx.feerate = compute_feerate(tx.fee, tx.weight);
        txs.push_back(std::move(tx));
    }
    return txs;
}

std::string opt_text(const std::optional<int64_t>& v)
{
    return v ? std::to_string(*v) : std::string{};
}

} // namespace

ChainView load_chain(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    if (!fs::exists(dir)) throw ParseError("no such path: " + dir.string());

    std::vector<Block> blocks;
    std::vector<Transaction> txs;
    if (fs::exists(dir / "chain.csv")) {
        blocks = load_blocks_csv(dir / "chain.csv");
    } else if (fs::exists(dir / "chain.json")) {
        blocks = load_blocks_json(dir / "chain.json");
    } else {
        throw ParseError(dir.string() + ": neither chain.csv nor chain.json present");
    }
    if (fs::exists(dir / "txs.csv")) {
        txs = load_txs_csv(dir / "txs.csv");
    } else if (fs::exists(dir / "txs.json")) {
        txs = load_txs_json(dir / "txs.json");
    } else {
        throw ParseError(dir.string() + ": neither txs.csv nor txs.json present");
    }
    return ChainView::build(std::move(blocks), std::move(txs));
}

void save_chain_csv(const ChainView& chain, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::vector<std::string>> block_rows;
    block_rows.reserve(chain.blocks().size());
    for (const Block& b : chain.blocks()) {
        block_rows.push_back({std::to_string(b.height), std::to_string(b.timestamp), std::to_string(b.interval),
                              std::to_string(b.size), format_double(b.difficulty), std::to_string(b.total_weight),
                              std::to_string(b.tx_count), format_double(b.mean_feerate)});
    }
    write_csv(dir / "chain.csv", kBlockHeader, block_rows);

    std::vector<std::vector<std::string>> tx_rows;
    tx_rows.reserve(chain.transactions().size());
    for (const Transaction& tx : chain.transactions()) {
        tx_rows.push_back({tx.txid, std::to_string(tx.version), std::to_string(tx.size), std::to_string(tx.weight),
                           std::to_string(tx.input_count), std::to_string(tx.output_count), std::to_string(tx.fee),
                           std::to_string(tx.first_seen_time), std::to_string(tx.entry_height),
                           opt_text(tx.leave_height), opt_text(tx.confirm_height), opt_text(tx.confirm_time)});
    }
    write_csv(dir / "txs.csv", kTxHeader, tx_rows);
}

void save_chain_json(const ChainView& chain, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    json blocks = json::array();
    for (const Block& b : chain.blocks()) {
        blocks.push_back({{"height", b.height},
                          {"timestamp", b.timestamp},
                          {"interval", b.interval},
                          {"size", b.size},
                          {"difficulty", b.difficulty},
                          {"total_weight", b.total_weight},
                          {"tx_count", b.tx_count},
                          {"mean_feerate", b.mean_feerate}});
    }
    json txs = json::array();
    for (const Transaction& tx : chain.transactions()) {
        json row = {{"txid", tx.txid},       {"version", tx.version},
                    {"size", tx.size},       {"weight", tx.weight},
                    {"inputs", tx.input_count}, {"outputs", tx.output_count},
                    {"fee", tx.fee},         {"first_seen_time", tx.first_seen_time},
                    {"entry_height", tx.entry_height}};
        row["leave_height"] = tx.leave_height ? json(*tx.leave_height) : json(nullptr);
        row["confirm_height"] = tx.confirm_height ? json(*tx.confirm_height) : json(nullptr);
        row["confirm_time"] = tx.confirm_time ? json(*tx.confirm_time) : json(nullptr);
        txs.push_back(std::move(row));
    }
    std::ofstream(dir / "chain.json") << blocks.dump(1) << '\n';
    std::ofstream(dir / "txs.json") << txs.dump(1) << '\n';
}

} // namespace feelab
