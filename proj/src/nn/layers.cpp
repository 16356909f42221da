// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <nn/layers.h>

#include <core/errors.h>

#include <cmath>
#include <cstring>

namespace feelab::nn {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void apply_activation(Tensor& x, Activation act)
{
    switch (act) {
    case Activation::Linear: return;
    case Activation::Relu:
        for (size_t i = 0; i < x.size(); ++i)
            if (x.at(i) < 0.0) x.at(i) = 0.0;
        return;
    case Activation::Tanh:
        for (size_t i = 0; i < x.size(); ++i) x.at(i) = std::tanh(x.at(i));
        return;
    case Activation::Sigmoid:
        for (size_t i = 0; i < x.size(); ++i) x.at(i) = sigmoid(x.at(i));
        return;
    }
}

/** dz from dy and the activation OUTPUT y (all used activations allow this). */
void activation_backward(Tensor& dy, const Tensor& y, Activation act)
{
    switch (act) {
    case Activation::Linear: return;
    case Activation::Relu:
        for (size_t i = 0; i < dy.size(); ++i)
            if (y.at(i) <= 0.0) dy.at(i) = 0.0;
        return;
    case Activation::Tanh:
        for (size_t i = 0; i < dy.size(); ++i) dy.at(i) *= 1.0 - y.at(i) * y.at(i);
        return;
    case Activation::Sigmoid:
        for (size_t i = 0; i < dy.size(); ++i) dy.at(i) *= y.at(i) * (1.0 - y.at(i));
        return;
    }
}

/** Per-row softmax backward: de = a ⊙ (da − <da, a>). */
void softmax_backward_row(const double* a, const double* da, double* de, size_t n)
{
    double dot = 0.0;
    for (size_t j = 0; j < n; ++j) dot += da[j] * a[j];
    for (size_t j = 0; j < n; ++j) de[j] = a[j] * (da[j] - dot);
}

/** out(r) = dot(a.row(r), b.row(r)). */
void row_dot(const Tensor& a, const Tensor& b, Tensor& out)
{
    for (size_t r = 0; r < a.rows(); ++r) {
        const double* ar = a.row(r);
        const double* br = b.row(r);
        double sum = 0.0;
        for (size_t j = 0; j < a.cols(); ++j) sum += ar[j] * br[j];
        out(r, 0) = sum;
    }
}

} // namespace

// ---------------------------------------------------------------- Dense

Dense::Dense(ParamSet& params, const std::string& prefix, size_t in, size_t out, Activation act)
    : m_in(in), m_out(out), m_act(act)
{
    m_weight = &params.add(prefix + "/W", {out, in});
    m_bias = &params.add(prefix + "/b", {out});
}

const Tensor& Dense::forward(const Tensor& x)
{
    if (x.cols() != m_in) throw InvalidInput("dense: input width mismatch");
    m_x = x;
    m_y = Tensor(x.rows(), m_out);
    matmul_nt(x, m_weight->value, m_y);
    add_row_vector(m_y, m_bias->value);
    apply_activation(m_y, m_act);
    return m_y;
}

Tensor Dense::backward(const Tensor& dy)
{
    Tensor dz = dy;
    activation_backward(dz, m_y, m_act);
    matmul_tn(dz, m_x, m_weight->grad, /*accumulate=*/true); // dW += dzᵀ·x
    for (size_t r = 0; r < dz.rows(); ++r)
        for (size_t j = 0; j < m_out; ++j) m_bias->grad.at(j) += dz(r, j);
    Tensor dx(dz.rows(), m_in);
    matmul(dz, m_weight->value, dx); // dx = dz·W
    return dx;
}

// ---------------------------------------------------------------- Lstm

Lstm::Lstm(ParamSet& params, const std::string& prefix, size_t in, size_t hidden, bool literal_output_gate)
    : m_in(in), m_hidden(hidden), m_literal(literal_output_gate)
{
    m_wi = &params.add(prefix + "/Wi", {hidden, in});
    m_wf = &params.add(prefix + "/Wf", {hidden, in});
    m_wo = &params.add(prefix + "/Wo", {hidden, in});
    m_wc = &params.add(prefix + "/Wc", {hidden, in});
    m_mi = &params.add(prefix + "/Mi", {hidden, hidden});
    m_mf = &params.add(prefix + "/Mf", {hidden, hidden});
    m_mo = &params.add(prefix + "/Mo", {hidden, hidden});
    m_mc = &params.add(prefix + "/Mc", {hidden, hidden});
}

const std::vector<Tensor>& Lstm::forward(const std::vector<Tensor>& xs)
{
    if (xs.empty()) throw InvalidInput("lstm: empty sequence");
    const size_t batch = xs[0].rows();
    const size_t steps = xs.size();
    m_xs = xs;
    m_i.assign(steps, Tensor(batch, m_hidden));
    m_f.assign(steps, Tensor(batch, m_hidden));
    m_o.assign(steps, Tensor(batch, m_hidden));
    m_g.assign(steps, Tensor(batch, m_hidden));
    m_c.assign(steps, Tensor(batch, m_hidden));
    m_h.assign(steps, Tensor(batch, m_hidden));
    m_tanh_arg.assign(steps, Tensor(batch, m_hidden));

    Tensor h_prev(batch, m_hidden);
    Tensor c_prev(batch, m_hidden);
    for (size_t t = 0; t < steps; ++t) {
        if (xs[t].cols() != m_in || xs[t].rows() != batch) throw InvalidInput("lstm: ragged input");
        auto gate = [&](Param* w, Param* m, Tensor& out, Activation act) {
            matmul_nt(xs[t], w->value, out);
            matmul_nt(h_prev, m->value, out, /*accumulate=*/true);
            apply_activation(out, act);
        };
        gate(m_wi, m_mi, m_i[t], Activation::Sigmoid);
        gate(m_wf, m_mf, m_f[t], Activation::Sigmoid);
        gate(m_wo, m_mo, m_o[t], Activation::Sigmoid);
        gate(m_wc, m_mc, m_g[t], Activation::Tanh);

        for (size_t e = 0; e < m_c[t].size(); ++e)
            m_c[t].at(e) = m_i[t].at(e) * m_g[t].at(e) + m_f[t].at(e) * c_prev.at(e);

        const Tensor& tanh_src = m_literal ? c_prev : m_c[t];
        for (size_t e = 0; e < m_h[t].size(); ++e) {
            m_tanh_arg[t].at(e) = std::tanh(tanh_src.at(e));
            m_h[t].at(e) = m_o[t].at(e) * m_tanh_arg[t].at(e);
        }
        h_prev = m_h[t];
        c_prev = m_c[t];
    }
    return m_h;
}

std::vector<Tensor> Lstm::backward(const std::vector<Tensor>& dhs)
{
    const size_t steps = m_xs.size();
    const size_t batch = m_xs[0].rows();
    std::vector<Tensor> dxs(steps, Tensor(batch, m_in));
    Tensor dh_carry(batch, m_hidden); // into h_t from step t+1
    Tensor dc_carry(batch, m_hidden); // into c_t from step t+1

    for (size_t t = steps; t-- > 0;) {
        Tensor dh = dhs[t];
        for (size_t e = 0; e < dh.size(); ++e) dh.at(e) += dh_carry.at(e);

        Tensor dgate_o(batch, m_hidden);
        Tensor dc = dc_carry;
        for (size_t e = 0; e < dh.size(); ++e) dgate_o.at(e) = dh.at(e) * m_tanh_arg[t].at(e);
        if (!m_literal) {
            // h_t = o ⊙ tanh(c_t): the tanh part lands on c_t now
            for (size_t e = 0; e < dh.size(); ++e)
                dc.at(e) += dh.at(e) * m_o[t].at(e) * (1.0 - m_tanh_arg[t].at(e) * m_tanh_arg[t].at(e));
        }

        Tensor di(batch, m_hidden), df(batch, m_hidden), dg(batch, m_hidden);
        const Tensor* c_prev = t > 0 ? &m_c[t - 1] : nullptr;
        for (size_t e = 0; e < dc.size(); ++e) {
            di.at(e) = dc.at(e) * m_g[t].at(e);
            dg.at(e) = dc.at(e) * m_i[t].at(e);
            df.at(e) = c_prev ? dc.at(e) * c_prev->at(e) : 0.0;
        }

        // carry into c_{t-1}: the forget path, plus the literal-mode tanh path
        Tensor next_dc_carry(batch, m_hidden);
        for (size_t e = 0; e < dc.size(); ++e) next_dc_carry.at(e) = dc.at(e) * m_f[t].at(e);
        if (m_literal && t > 0) {
            for (size_t e = 0; e < dh.size(); ++e)
                next_dc_carry.at(e) += dh.at(e) * m_o[t].at(e) * (1.0 - m_tanh_arg[t].at(e) * m_tanh_arg[t].at(e));
        }

        // through the gate nonlinearities
        activation_backward(di, m_i[t], Activation::Sigmoid);
        activation_backward(df, m_f[t], Activation::Sigmoid);
        activation_backward(dgate_o, m_o[t], Activation::Sigmoid);
        activation_backward(dg, m_g[t], Activation::Tanh);

        Tensor next_dh_carry(batch, m_hidden);
        const Tensor* h_prev = t > 0 ? &m_h[t - 1] : nullptr;
        auto accumulate = [&](Tensor& da, Param* w, Param* m) {
            matmul_tn(da, m_xs[t], w->grad, /*accumulate=*/true);
            if (h_prev) matmul_tn(da, *h_prev, m->grad, /*accumulate=*/true);
            matmul(da, w->value, dxs[t], /*accumulate=*/true);
            matmul(da, m->value, next_dh_carry, /*accumulate=*/true);
        };
        accumulate(di, m_wi, m_mi);
        accumulate(df, m_wf, m_mf);
        accumulate(dgate_o, m_wo, m_mo);
        accumulate(dg, m_wc, m_mc);

        dh_carry = std::move(next_dh_carry);
        dc_carry = std::move(next_dc_carry);
    }
    return dxs;
}

// ------------------------------------------------- AdditiveAttention

AdditiveAttention::AdditiveAttention(ParamSet& params, const std::string& prefix, size_t in, size_t hidden)
    : m_in(in), m_hidden(hidden)
{
    m_wt = &params.add(prefix + "/Wt", {hidden, in});
    m_wx = &params.add(prefix + "/Wx", {hidden, in});
    m_wa = &params.add(prefix + "/Wa", {1, hidden});
}

const std::vector<Tensor>& AdditiveAttention::forward(const std::vector<Tensor>& xs)
{
    if (xs.empty()) throw InvalidInput("additive attention: empty sequence");
    m_steps = xs.size();
    m_batch = xs[0].rows();
    m_xs = xs;
    m_u.assign(m_steps, Tensor(m_batch, m_hidden));
    m_v.assign(m_steps, Tensor(m_batch, m_hidden));
    for (size_t t = 0; t < m_steps; ++t) {
        matmul_nt(xs[t], m_wt->value, m_u[t]);
        matmul_nt(xs[t], m_wx->value, m_v[t]);
    }

    m_hid.assign(m_steps * m_steps, Tensor(m_batch, m_hidden));
    m_sig.assign(m_steps * m_steps, Tensor(m_batch, 1));
    m_alpha.assign(m_steps, Tensor(m_batch, m_steps));
    for (size_t t = 0; t < m_steps; ++t) {
        for (size_t s = 0; s < m_steps; ++s) {
            Tensor& hid = m_hid[t * m_steps + s];
            for (size_t e = 0; e < hid.size(); ++e) hid.at(e) = std::tanh(m_u[t].at(e) + m_v[s].at(e));
            Tensor& sig = m_sig[t * m_steps + s];
            matmul_nt(hid, m_wa->value, sig);
            apply_activation(sig, Activation::Sigmoid);
            for (size_t r = 0; r < m_batch; ++r) m_alpha[t](r, s) = sig(r, 0);
        }
        softmax_rows(m_alpha[t]);
    }

    m_out.assign(m_steps, Tensor(m_batch, m_in));
    for (size_t t = 0; t < m_steps; ++t)
        for (size_t s = 0; s < m_steps; ++s)
            for (size_t r = 0; r < m_batch; ++r) {
                const double a = m_alpha[t](r, s);
                const double* xr = xs[s].row(r);
                double* outr = m_out[t].row(r);
                for (size_t j = 0; j < m_in; ++j) outr[j] += a * xr[j];
            }
    return m_out;
}

std::vector<Tensor> AdditiveAttention::backward(const std::vector<Tensor>& douts)
{
    std::vector<Tensor> dxs(m_steps, Tensor(m_batch, m_in));
    std::vector<Tensor> du(m_steps, Tensor(m_batch, m_hidden));
    std::vector<Tensor> dv(m_steps, Tensor(m_batch, m_hidden));

    Tensor dalpha(m_batch, m_steps);
    Tensor dscore(m_batch, m_steps);
    for (size_t t = 0; t < m_steps; ++t) {
        // mixture: out_t = Σ_s α_{t,s} x_s
        dalpha.zero();
        for (size_t s = 0; s < m_steps; ++s)
            for (size_t r = 0; r < m_batch; ++r) {
                const double* doutr = douts[t].row(r);
                const double* xr = m_xs[s].row(r);
                double dot = 0.0;
                for (size_t j = 0; j < m_in; ++j) {
                    dot += doutr[j] * xr[j];
                    dxs[s](r, j) += m_alpha[t](r, s) * doutr[j];
                }
                dalpha(r, s) = dot;
            }
        for (size_t r = 0; r < m_batch; ++r)
            softmax_backward_row(m_alpha[t].row(r), dalpha.row(r), dscore.row(r), m_steps);

        for (size_t s = 0; s < m_steps; ++s) {
            const Tensor& sig = m_sig[t * m_steps + s];
            const Tensor& hid = m_hid[t * m_steps + s];
            Tensor dz(m_batch, 1);
            for (size_t r = 0; r < m_batch; ++r)
                dz(r, 0) = dscore(r, s) * sig(r, 0) * (1.0 - sig(r, 0));
            matmul_tn(dz, hid, m_wa->grad, /*accumulate=*/true); // (1×hidden)
            Tensor dhid(m_batch, m_hidden);
            matmul(dz, m_wa->value, dhid);
            for (size_t e = 0; e < dhid.size(); ++e) dhid.at(e) *= 1.0 - hid.at(e) * hid.at(e);
            for (size_t e = 0; e < dhid.size(); ++e) {
                du[t].at(e) += dhid.at(e);
                dv[s].at(e) += dhid.at(e);
            }
        }
    }
    for (size_t t = 0; t < m_steps; ++t) {
        matmul_tn(du[t], m_xs[t], m_wt->grad, /*accumulate=*/true);
        matmul_tn(dv[t], m_xs[t], m_wx->grad, /*accumulate=*/true);
        matmul(du[t], m_wt->value, dxs[t], /*accumulate=*/true);
        matmul(dv[t], m_wx->value, dxs[t], /*accumulate=*/true);
    }
    return dxs;
}

std::vector<double> AdditiveAttention::attention_row(size_t r, size_t t) const
{
    std::vector<double> row(m_steps);
    for (size_t s = 0; s < m_steps; ++s) row[s] = m_alpha[t](r, s);
    return row;
}

// ---------------------------------------------------- SelfAttention

SelfAttention::SelfAttention(ParamSet& params, const std::string& prefix, size_t in, size_t dk)
    : m_in(in), m_dk(dk)
{
    m_wq = &params.add(prefix + "/Wq", {dk, in});
    m_wk = &params.add(prefix + "/Wk", {dk, in});
    m_wv = &params.add(prefix + "/Wv", {dk, in});
}

const std::vector<Tensor>& SelfAttention::forward(const std::vector<Tensor>& xs)
{
    if (xs.empty()) throw InvalidInput("self attention: empty sequence");
    m_steps = xs.size();
    m_batch = xs[0].rows();
    m_xs = xs;
    m_q.assign(m_steps, Tensor(m_batch, m_dk));
    m_k.assign(m_steps, Tensor(m_batch, m_dk));
    m_v.assign(m_steps, Tensor(m_batch, m_dk));
    for (size_t t = 0; t < m_steps; ++t) {
        matmul_nt(xs[t], m_wq->value, m_q[t]);
        matmul_nt(xs[t], m_wk->value, m_k[t]);
        matmul_nt(xs[t], m_wv->value, m_v[t]);
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(m_dk));
    m_alpha.assign(m_steps, Tensor(m_batch, m_steps));
    Tensor dot(m_batch, 1);
    for (size_t t = 0; t < m_steps; ++t) {
        for (size_t s = 0; s < m_steps; ++s) {
            row_dot(m_q[t], m_k[s], dot);
            for (size_t r = 0; r < m_batch; ++r) m_alpha[t](r, s) = dot(r, 0) * scale;
        }
        softmax_rows(m_alpha[t]);
    }

    m_out.assign(m_steps, Tensor(m_batch, m_dk));
    for (size_t t = 0; t < m_steps; ++t)
        for (size_t s = 0; s < m_steps; ++s)
            for (size_t r = 0; r < m_batch; ++r) {
                const double a = m_alpha[t](r, s);
                const double* vr = m_v[s].row(r);
                double* outr = m_out[t].row(r);
                for (size_t j = 0; j < m_dk; ++j) outr[j] += a * vr[j];
            }
    return m_out;
}

std::vector<Tensor> SelfAttention::backward(const std::vector<Tensor>& douts)
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_dk));
    std::vector<Tensor> dq(m_steps, Tensor(m_batch, m_dk));
    std::vector<Tensor> dk(m_steps, Tensor(m_batch, m_dk));
    std::vector<Tensor> dv(m_steps, Tensor(m_batch, m_dk));

    Tensor dalpha(m_batch, m_steps);
    Tensor dscore(m_batch, m_steps);
    for (size_t t = 0; t < m_steps; ++t) {
        dalpha.zero();
        for (size_t s = 0; s < m_steps; ++s)
            for (size_t r = 0; r < m_batch; ++r) {
                const double* doutr = douts[t].row(r);
                const double* vr = m_v[s].row(r);
                double dot = 0.0;
                for (size_t j = 0; j < m_dk; ++j) {
                    dot += doutr[j] * vr[j];
                    dv[s](r, j) += m_alpha[t](r, s) * doutr[j];
                }
                dalpha(r, s) = dot;
            }
        for (size_t r = 0; r < m_batch; ++r)
            softmax_backward_row(m_alpha[t].row(r), dalpha.row(r), dscore.row(r), m_steps);
        for (size_t s = 0; s < m_steps; ++s)
            for (size_t r = 0; r < m_batch; ++r) {
                const double d = dscore(r, s) * scale;
                const double* kr = m_k[s].row(r);
                const double* qr = m_q[t].row(r);
                double* dqr = dq[t].row(r);
                double* dkr = dk[s].row(r);
                for (size_t j = 0; j < m_dk; ++j) {
                    dqr[j] += d * kr[j];
                    dkr[j] += d * qr[j];
                }
            }
    }

    std::vector<Tensor> dxs(m_steps, Tensor(m_batch, m_in));
    for (size_t t = 0; t < m_steps; ++t) {
        matmul_tn(dq[t], m_xs[t], m_wq->grad, /*accumulate=*/true);
        matmul_tn(dk[t], m_xs[t], m_wk->grad, /*accumulate=*/true);
        matmul_tn(dv[t], m_xs[t], m_wv->grad, /*accumulate=*/true);
        matmul(dq[t], m_wq->value, dxs[t], /*accumulate=*/true);
        matmul(dk[t], m_wk->value, dxs[t], /*accumulate=*/true);
        matmul(dv[t], m_wv->value, dxs[t], /*accumulate=*/true);
    }
    return dxs;
}

std::vector<double> SelfAttention::attention_row(size_t r, size_t t) const
{
    std::vector<double> row(m_steps);
    for (size_t s = 0; s < m_steps; ++s) row[s] = m_alpha[t](r, s);
    return row;
}

// ------------------------------------------------ WeightedAttention

WeightedAttention::WeightedAttention(ParamSet& params, const std::string& prefix, size_t hidden)
    : m_hidden(hidden)
{
    m_w = &params.add(prefix + "/W", {1, hidden});
}

const Tensor& WeightedAttention::forward(const std::vector<Tensor>& hs)
{
    if (hs.empty()) throw InvalidInput("weighted attention: empty sequence");
    m_steps = hs.size();
    m_batch = hs[0].rows();
    m_hs = hs;
    m_alpha = Tensor(m_batch, m_steps);
    Tensor score(m_batch, 1);
    for (size_t t = 0; t < m_steps; ++t) {
        matmul_nt(hs[t], m_w->value, score);
        for (size_t r = 0; r < m_batch; ++r) m_alpha(r, t) = score(r, 0);
    }
    softmax_rows(m_alpha);

    m_out = Tensor(m_batch, m_hidden);
    for (size_t t = 0; t < m_steps; ++t)
        for (size_t r = 0; r < m_batch; ++r) {
            const double a = m_alpha(r, t);
            const double* hr = hs[t].row(r);
            double* outr = m_out.row(r);
            for (size_t j = 0; j < m_hidden; ++j) outr[j] += a * hr[j];
        }
    return m_out;
}

std::vector<Tensor> WeightedAttention::backward(const Tensor& dout)
{
    std::vector<Tensor> dhs(m_steps, Tensor(m_batch, m_hidden));
    Tensor dalpha(m_batch, m_steps);
    for (size_t t = 0; t < m_steps; ++t)
        for (size_t r = 0; r < m_batch; ++r) {
            const double* doutr = dout.row(r);
            const double* hr = m_hs[t].row(r);
            double dot = 0.0;
            for (size_t j = 0; j < m_hidden; ++j) {
                dot += doutr[j] * hr[j];
                dhs[t](r, j) += m_alpha(r, t) * doutr[j];
            }
            dalpha(r, t) = dot;
        }
    Tensor dscore(m_batch, m_steps);
    for (size_t r = 0; r < m_batch; ++r)
        softmax_backward_row(m_alpha.row(r), dalpha.row(r), dscore.row(r), m_steps);
    Tensor dz(m_batch, 1);
    for (size_t t = 0; t < m_steps; ++t) {
        for (size_t r = 0; r < m_batch; ++r) dz(r, 0) = dscore(r, t);
        matmul_tn(dz, m_hs[t], m_w->grad, /*accumulate=*/true);
        matmul(dz, m_w->value, dhs[t], /*accumulate=*/true);
    }
    return dhs;
}

std::vector<double> WeightedAttention::attention_row(size_t r) const
{
    std::vector<double> row(m_steps);
    for (size_t t = 0; t < m_steps; ++t) row[t] = m_alpha(r, t);
    return row;
}

// ----------------------------------------------------------- MeanPool

const Tensor& MeanPool::forward(const std::vector<Tensor>& xs)
{
    if (xs.empty()) throw InvalidInput("mean pool: empty sequence");
    m_steps = xs.size();
    m_out = Tensor(xs[0].rows(), xs[0].cols());
    const double inv = 1.0 / static_cast<double>(m_steps);
    for (const Tensor& x : xs)
        for (size_t e = 0; e < x.size(); ++e) m_out.at(e) += x.at(e) * inv;
    return m_out;
}

std::vector<Tensor> MeanPool::backward(const Tensor& dout) const
{
    const double inv = 1.0 / static_cast<double>(m_steps);
    Tensor slice(dout.rows(), dout.cols());
    for (size_t e = 0; e < dout.size(); ++e) slice.at(e) = dout.at(e) * inv;
    return std::vector<Tensor>(m_steps, slice);
}

// ------------------------------------------------------------- losses

double mse_loss(const Tensor& pred, const std::vector<double>& target, Tensor& dpred)
{
    if (pred.size() != target.size()) throw InvalidInput("mse: size mismatch");
    dpred = Tensor(pred.rows(), pred.cols());
    const double inv = 1.0 / static_cast<double>(pred.size());
    double loss = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        const double diff = pred.at(i) - target[i];
        loss += diff * diff * inv;
        dpred.at(i) = 2.0 * diff * inv;
    }
    return loss;
}

double bce_logits_loss(const Tensor& logits, const std::vector<double>& labels, Tensor& dlogits)
{
    if (logits.size() != labels.size()) throw InvalidInput("bce: size mismatch");
    dlogits = Tensor(logits.rows(), logits.cols());
    const double inv = 1.0 / static_cast<double>(logits.size());
    double loss = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        const double z = logits.at(i);
        const double y = labels[i];
        loss += (std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)))) * inv;
        dlogits.at(i) = (sigmoid(z) - y) * inv;
    }
    return loss;
}

} // namespace feelab::nn
