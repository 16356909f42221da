// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_NN_TENSOR_H
#define FEELAB_NN_TENSOR_H

#include <cstddef>
#include <vector>

namespace feelab::nn {

/**
 * Row-major 64-bit float tensor. Everything in the engine is a matrix or a
 * vector; higher ranks are not needed. A 1-d tensor acts as a 1×n matrix.
 */
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<size_t> shape);
    Tensor(size_t rows, size_t cols) : Tensor(std::vector<size_t>{rows, cols}) {}

    static Tensor vector(size_t n) { return Tensor(std::vector<size_t>{n}); }

    const std::vector<size_t>& shape() const { return m_shape; }
    size_t ndim() const { return m_shape.size(); }
    size_t size() const { return m_data.size(); }
    size_t rows() const { return m_shape.size() == 1 ? 1 : m_shape[0]; }
    size_t cols() const { return m_shape.size() == 1 ? m_shape[0] : m_shape[1]; }
    bool same_shape(const Tensor& other) const { return m_shape == other.m_shape; }

    double& at(size_t i) { return m_data[i]; }
    double at(size_t i) const { return m_data[i]; }
    double& operator()(size_t r, size_t c) { return m_data[r * cols() + c]; }
    double operator()(size_t r, size_t c) const { return m_data[r * cols() + c]; }

    double* data() { return m_data.data(); }
    const double* data() const { return m_data.data(); }
    double* row(size_t r) { return m_data.data() + r * cols(); }
    const double* row(size_t r) const { return m_data.data() + r * cols(); }

    void fill(double value);
    void zero() { fill(0.0); }

private:
    std::vector<size_t> m_shape;
    std::vector<double> m_data;
};

/** C = A(m×k) · B(k×n); accumulate adds into C instead of overwriting. */
void matmul(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate = false);

/** C = Aᵀ(m×k) · B(k... ) with A stored k×m: C(m×n) = sum_k A(k,i)·B(k,j). */
void matmul_tn(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate = false);

/** C = A(m×k) · Bᵀ with B stored n×k: C(i,j) = dot(A row i, B row j). */
void matmul_nt(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate = false);

/** Adds a length-cols vector to every row. */
void add_row_vector(Tensor& x, const Tensor& bias);

/** In-place row-wise softmax. */
void softmax_rows(Tensor& x);

/**
 * Number of worker threads the GEMM kernels may use. Defaults to the
 * hardware count (capped), override with FEERATE_LAB_THREADS. Partitioning
 * is by output row, and every row is reduced serially in a fixed order, so
 * results are bitwise identical for any thread count.
 */
int gemm_threads();

} // namespace feelab::nn

#endif // FEELAB_NN_TENSOR_H
