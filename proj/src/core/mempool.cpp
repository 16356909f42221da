// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <core/mempool.h>

#include <core/errors.h>

#include <algorithm>
#include <cmath>

namespace feelab {

bool MempoolSnapshot::contains(const ChainView& chain, std::string_view txid) const
{
    const Transaction* tx = chain.find_tx(txid);
    if (!tx) return false;
    const uint32_t index = static_cast<uint32_t>(tx - chain.transactions().data());
    return std::binary_search(members.begin(), members.end(), index);
}

void MempoolSnapshot::check_aggregates(const ChainView& chain) const
{
    std::vector<int64_t> counts(scheme.bucket_count(), 0);
    std::vector<double> weights(scheme.bucket_count(), 0.0);
    for (uint32_t i : members) {
        const Transaction& tx = chain.transactions().at(i);
        const size_t b = scheme.index_of(tx.feerate);
        counts[b] += 1;
        weights[b] += static_cast<double>(tx.weight);
    }
    if (counts != bucket_counts)
        throw ValidationError("mempool snapshot at height " + std::to_string(height) +
                              ": bucket counts disagree with members");
    for (size_t b = 0; b < weights.size(); ++b) {
        if (std::abs(weights[b] - bucket_weights[b]) > 1e-6)
            throw ValidationError("mempool snapshot at height " + std::to_string(height) +
                                  ": bucket weights disagree with members");
    }
}

} // namespace feelab
