// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <eval/metrics.h>

#include <core/errors.h>

#include <cmath>

namespace feelab::eval {

Metrics compute_metrics(const std::vector<double>& truth, const std::vector<double>& predictions)
{
    if (truth.size() != predictions.size()) throw InvalidInput("metrics: length mismatch");
    if (truth.empty()) throw InvalidInput("metrics: empty input");

    Metrics m;
    m.count = truth.size();
    double squared = 0.0;
    double relative = 0.0;
    size_t mape_count = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        const double diff = truth[i] - predictions[i];
        squared += diff * diff;
        if (truth[i] > 0.0) {
            relative += std::abs(diff) / truth[i];
            ++mape_count;
        } else {
            ++m.mape_excluded;
        }
    }
    m.rmse = std::sqrt(squared / static_cast<double>(truth.size()));
    m.mape = mape_count == 0 ? 0.0 : 100.0 * relative / static_cast<double>(mape_count);
    return m;
}

double feerate_to_fee(WeightUnits weight, double feerate, bool floor_feerate)
{
    const double rate = floor_feerate ? std::floor(feerate) : feerate;
    return feelab::feerate_to_fee(weight, rate);
}

} // namespace feelab::eval
