// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <nn/adam.h>

#include <core/errors.h>

#include <cmath>

namespace feelab::nn {

Adam::Adam(ParamSet& params, AdamConfig config) : m_params(params), m_config(config)
{
    for (const Param& p : params.items()) {
        m_m.emplace_back(p.value.shape());
        m_v.emplace_back(p.value.shape());
    }
}

void Adam::step()
{
    ++m_step;
    const double bc1 = 1.0 - std::pow(m_config.beta1, static_cast<double>(m_step));
    const double bc2 = 1.0 - std::pow(m_config.beta2, static_cast<double>(m_step));
    size_t index = 0;
    for (Param& p : m_params.items()) {
        Tensor& m = m_m[index];
        Tensor& v = m_v[index];
        ++index;
        for (size_t e = 0; e < p.value.size(); ++e) {
            const double g = p.grad.at(e);
            if (!std::isfinite(g))
                throw EstimationError(EstimationError::Kind::TrainingDiverged,
                                      "adam: non-finite gradient in " + p.name);
            m.at(e) = m_config.beta1 * m.at(e) + (1.0 - m_config.beta1) * g;
            v.at(e) = m_config.beta2 * v.at(e) + (1.0 - m_config.beta2) * g * g;
            const double m_hat = m.at(e) / bc1;
            const double v_hat = v.at(e) / bc2;
            p.value.at(e) -= m_config.learning_rate * m_hat / (std::sqrt(v_hat) + m_config.epsilon);
        }
    }
}

} // namespace feelab::nn
