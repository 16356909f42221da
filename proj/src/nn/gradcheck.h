// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_NN_GRADCHECK_H
#define FEELAB_NN_GRADCHECK_H

#include <nn/params.h>

#include <functional>
#include <string>

namespace feelab::nn {

struct GradCheckReport {
    double max_rel_err{0.0};
    std::string worst_param;
    size_t checked{0};

    bool passes(double tolerance) const { return max_rel_err < tolerance; }
};

/**
 * Central finite differences on every parameter element. loss() evaluates
 * the scalar objective with the current parameter values; loss_with_grads()
 * additionally leaves fresh gradients in the set. Relative error uses
 * |a - f| / max(1e-6, |a|, |f|).
 */
GradCheckReport grad_check(ParamSet& params, const std::function<double()>& loss,
                           const std::function<double()>& loss_with_grads, double step = 1e-5);

} // namespace feelab::nn

#endif // FEELAB_NN_GRADCHECK_H
