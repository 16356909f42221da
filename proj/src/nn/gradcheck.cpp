// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <nn/gradcheck.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace feelab::nn {

GradCheckReport grad_check(ParamSet& params, const std::function<double()>& loss,
                           const std::function<double()>& loss_with_grads, double step)
{
    params.zero_grads();
    loss_with_grads();
    std::vector<Tensor> analytic;
    analytic.reserve(params.items().size());
    for (const Param& p : params.items()) analytic.push_back(p.grad);

    GradCheckReport report;
    size_t index = 0;
    for (Param& p : params.items()) {
        const Tensor& grad = analytic[index++];
        for (size_t e = 0; e < p.value.size(); ++e) {
            const double saved = p.value.at(e);
            const double h = step * std::max(1.0, std::abs(saved));
            p.value.at(e) = saved + h;
            const double up = loss();
            p.value.at(e) = saved - h;
            const double down = loss();
            p.value.at(e) = saved;
            const double fd = (up - down) / (2.0 * h);
            const double a = grad.at(e);
            const double rel = std::abs(a - fd) / std::max({1e-6, std::abs(a), std::abs(fd)});
            ++report.checked;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst_param = p.name + "[" + std::to_string(e) + "]";
            }
        }
    }
    return report;
}

} // namespace feelab::nn
