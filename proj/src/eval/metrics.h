// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_EVAL_METRICS_H
#define FEELAB_EVAL_METRICS_H

#include <core/types.h>

#include <cstddef>
#include <vector>

namespace feelab::eval {

struct Metrics {
    double rmse{0.0};
    double mape{0.0};        // percent
    size_t count{0};         // pairs scored
    size_t mape_excluded{0}; // zero-truth pairs left out of MAPE
};

/**
 * RMSE over all pairs; MAPE = 100 * mean |y - y_hat| / y over pairs with
 * positive truth, reporting how many were excluded. Throws InvalidInput on
 * length mismatch or empty input.
 */
Metrics compute_metrics(const std::vector<double>& truth, const std::vector<double>& predictions);

/**
 * Fee from an estimated feerate per the vByte conversion, optionally flooring
 * the feerate to its integer component first (the flow estimator's
 * convention).
 */
double feerate_to_fee(WeightUnits weight, double feerate, bool floor_feerate);

} // namespace feelab::eval

#endif // FEELAB_EVAL_METRICS_H
