// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_INGEST_CHAIN_IO_H
#define FEELAB_INGEST_CHAIN_IO_H

#include <core/types.h>

#include <filesystem>

namespace feelab {

/**
 * Chain dumps live as a pair of files in one directory:
 *   chain.csv  header: height,timestamp,interval,size,difficulty,total_weight,tx_count,mean_feerate
 *   txs.csv    header: txid,version,size,weight,inputs,outputs,fee,first_seen_time,
 *              entry_height,leave_height,confirm_height,confirm_time
 * Empty string encodes an absent optional. chain.json / txs.json (arrays of
 * objects with the same keys) are accepted as an alternative; CSV wins when
 * both exist. Feerate is derived as fee/(weight/4), never stored.
 */
ChainView load_chain(const std::filesystem::path& dir);

/** Writes chain.csv + txs.csv; byte-deterministic for a given view. */
void save_chain_csv(const ChainView& chain, const std::filesystem::path& dir);

/** Writes chain.json + txs.json. */
void save_chain_json(const ChainView& chain, const std::filesystem::path& dir);

} // namespace feelab

#endif // FEELAB_INGEST_CHAIN_IO_H
