// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_NN_LAYERS_H
#define FEELAB_NN_LAYERS_H

#include <nn/params.h>
#include <nn/tensor.h>

#include <string>
#include <vector>

namespace feelab::nn {

enum class Activation { Linear, Relu, Tanh, Sigmoid };

/**
 * Fully connected layer, y = act(x·Wᵀ + b), applied row-wise to a batch.
 * forward() caches what backward() needs; backward() accumulates parameter
 * gradients and returns the input gradient.
 */
class Dense {
public:
    Dense(ParamSet& params, const std::string& prefix, size_t in, size_t out, Activation act);

    const Tensor& forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    size_t in_dim() const { return m_in; }
    size_t out_dim() const { return m_out; }

private:
    size_t m_in, m_out;
    Activation m_act;
    Param* m_weight; // out×in
    Param* m_bias;   // out
    Tensor m_x, m_y;
};

/**
 * LSTM over a token sequence; gates carry no bias, matching the recurrence
 * this engine implements. The printed form of that recurrence emits
 * o⊙tanh(c_{t-1}); the standard form uses c_t. Both are supported, selected
 * at construction, and both pass finite-difference checks.
 */
class Lstm {
public:
    Lstm(ParamSet& params, const std::string& prefix, size_t in, size_t hidden, bool literal_output_gate = false);

    /** xs: one (batch×in) tensor per step. Returns h_1..h_T, each batch×hidden. */
    const std::vector<Tensor>& forward(const std::vector<Tensor>& xs);

    /** dhs: upstream gradient on every h_t. Returns gradients on every x_t. */
    std::vector<Tensor> backward(const std::vector<Tensor>& dhs);

    size_t hidden_dim() const { return m_hidden; }

private:
    size_t m_in, m_hidden;
    bool m_literal;
    Param *m_wi, *m_wf, *m_wo, *m_wc; // hidden×in
    Param *m_mi, *m_mf, *m_mo, *m_mc; // hidden×hidden
    std::vector<Tensor> m_xs, m_i, m_f, m_o, m_g, m_c, m_h, m_tanh_arg;
};

/**
 * Additive attention: pair scores from a one-hidden-layer network
 * (tanh(W_t·x_t + W_x·x_t'), squashed by a sigmoid before the softmax), then
 * each output token is the attention-weighted mix of the inputs.
 */
class AdditiveAttention {
public:
    AdditiveAttention(ParamSet& params, const std::string& prefix, size_t in, size_t hidden);

    const std::vector<Tensor>& forward(const std::vector<Tensor>& xs);
    std::vector<Tensor> backward(const std::vector<Tensor>& douts);

    /** Attention rows for batch row r and query position t (sums to 1). */
    std::vector<double> attention_row(size_t r, size_t t) const;

private:
    size_t m_in, m_hidden;
    Param *m_wt, *m_wx; // hidden×in
    Param *m_wa;        // 1×hidden
    size_t m_steps{0}, m_batch{0};
    std::vector<Tensor> m_xs, m_u /*per t*/, m_v /*per t'*/;
    std::vector<Tensor> m_hid;   // per (t,t'): batch×hidden
    std::vector<Tensor> m_sig;   // per (t,t'): batch×1, sigmoid scores
    std::vector<Tensor> m_alpha; // per t: batch×steps, softmax rows
    std::vector<Tensor> m_out;
};

/** Scaled dot-product self-attention; projects into query/key/value spaces. */
class SelfAttention {
public:
    SelfAttention(ParamSet& params, const std::string& prefix, size_t in, size_t dk);

    const std::vector<Tensor>& forward(const std::vector<Tensor>& xs);
    std::vector<Tensor> backward(const std::vector<Tensor>& douts);

    std::vector<double> attention_row(size_t r, size_t t) const;
    size_t out_dim() const { return m_dk; }

private:
    size_t m_in, m_dk;
    Param *m_wq, *m_wk, *m_wv; // dk×in
    size_t m_steps{0}, m_batch{0};
    std::vector<Tensor> m_xs, m_q, m_k, m_v;
    std::vector<Tensor> m_alpha; // per t: batch×steps
    std::vector<Tensor> m_out;
};

/**
 * Weighted attention over a hidden-state sequence: one scalar score per step
 * from a shared row vector, softmax across steps, output is the weighted sum
 * of the states (a single context vector).
 */
class WeightedAttention {
public:
    WeightedAttention(ParamSet& params, const std::string& prefix, size_t hidden);

    const Tensor& forward(const std::vector<Tensor>& hs);
    std::vector<Tensor> backward(const Tensor& dout);

    std::vector<double> attention_row(size_t r) const;

private:
    size_t m_hidden;
    Param* m_w; // 1×hidden
    size_t m_steps{0}, m_batch{0};
    std::vector<Tensor> m_hs;
    Tensor m_alpha; // batch×steps
    Tensor m_out;
};

/** Mean over the step dimension. */
class MeanPool {
public:
    const Tensor& forward(const std::vector<Tensor>& xs);
    std::vector<Tensor> backward(const Tensor& dout) const;

private:
    size_t m_steps{0};
    Tensor m_out;
};

/** Mean squared error; fills dpred with the gradient. */
double mse_loss(const Tensor& pred, const std::vector<double>& target, Tensor& dpred);

/** Numerically safe binary cross entropy on raw activations. */
double bce_logits_loss(const Tensor& logits, const std::vector<double>& labels, Tensor& dlogits);

} // namespace feelab::nn

#endif // FEELAB_NN_LAYERS_H
