// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_NN_ADAM_H
#define FEELAB_NN_ADAM_H

#include <nn/params.h>

namespace feelab::nn {

struct AdamConfig {
    double learning_rate{1e-3};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
};

/**
 * Adam with bias-corrected moments over a ParamSet's gradients. step()
 * throws EstimationError(TrainingDiverged) on a non-finite gradient.
 */
class Adam {
public:
    explicit Adam(ParamSet& params, AdamConfig config = {});

    void step();
    int64_t steps_taken() const { return m_step; }

private:
    ParamSet& m_params;
    AdamConfig m_config;
    int64_t m_step{0};
    std::vector<Tensor> m_m, m_v;
};

} // namespace feelab::nn

#endif // FEELAB_NN_ADAM_H
