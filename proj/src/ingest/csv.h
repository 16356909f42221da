// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_INGEST_CSV_H
#define FEELAB_INGEST_CSV_H

#include <filesystem>
#include <string>
#include <vector>

namespace feelab {

/**
 * Minimal comma-separated table, no quoting (the dump formats carry only
 * numbers and hex ids). Rows keep their 1-based line number for error
 * reporting.
 */
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<size_t> line_numbers;

    /** Column position by name; -1 when absent. */
    int column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/** Shortest decimal form that round-trips the double exactly. */
std::string format_double(double value);

} // namespace feelab

#endif // FEELAB_INGEST_CSV_H
