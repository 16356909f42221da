// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <nn/tensor.h>

#include <core/errors.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>

namespace feelab::nn {

Tensor::Tensor(std::vector<size_t> shape) : m_shape(std::move(shape))
{
    size_t total = 1;
    for (size_t d : m_shape) total *= d;
    if (m_shape.empty()) total = 0;
    m_data.assign(total, 0.0);
}

void Tensor::fill(double value)
{
    std::fill(m_data.begin(), m_data.end(), value);
}

int gemm_threads()
{
    static const int count = [] {
        if (const char* env = std::getenv("FEERATE_LAB_THREADS")) {
            const int n = std::atoi(env);
            if (n >= 1) return std::min(n, 64);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return static_cast<int>(std::clamp(hw, 1u, 8u));
    }();
    return count;
}

namespace {

void check_dims(size_t a, size_t b, const char* what)
{
    if (a != b) throw InvalidInput(std::string("tensor: dimension mismatch in ") + what);
}

/** Runs fn(row_begin, row_end) over a partition of [0, rows). */
template <typename Fn>
void parallel_rows(size_t rows, size_t flops_per_row, const Fn& fn)
{
    const int threads = gemm_threads();
    // thread spawning only pays off for real work
    if (threads == 1 || rows * flops_per_row < 262144 || rows < 2) {
        fn(0, rows);
        return;
    }
    const int used = std::min<int>(threads, static_cast<int>(rows));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(used - 1));
    const size_t chunk = (rows + static_cast<size_t>(used) - 1) / static_cast<size_t>(used);
    for (int t = 1; t < used; ++t) {
        const size_t begin = chunk * static_cast<size_t>(t);
        const size_t end = std::min(rows, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(fn, begin, end);
    }
    fn(0, std::min(rows, chunk));
    for (auto& th : pool) th.join();
}

} // namespace

void matmul(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate)
{
    const size_t m = a.rows(), k = a.cols(), n = b.cols();
    check_dims(k, b.rows(), "matmul inner");
    check_dims(m, c.rows(), "matmul out rows");
    check_dims(n, c.cols(), "matmul out cols");
    parallel_rows(m, 2 * k * n, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            double* ci = c.row(i);
            if (!accumulate) std::memset(ci, 0, n * sizeof(double));
            const double* ai = a.row(i);
            for (size_t kk = 0; kk < k; ++kk) {
                const double av = ai[kk];
                const double* bk = b.row(kk);
                for (size_t j = 0; j < n; ++j) ci[j] += av * bk[j];
            }
        }
    });
}

void matmul_tn(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate)
{
    const size_t k = a.rows(), m = a.cols(), n = b.cols();
    check_dims(k, b.rows(), "matmul_tn inner");
    check_dims(m, c.rows(), "matmul_tn out rows");
    check_dims(n, c.cols(), "matmul_tn out cols");
    parallel_rows(m, 2 * k * n, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            double* ci = c.row(i);
            if (!accumulate) std::memset(ci, 0, n * sizeof(double));
            for (size_t kk = 0; kk < k; ++kk) {
                const double av = a(kk, i);
                const double* bk = b.row(kk);
                for (size_t j = 0; j < n; ++j) ci[j] += av * bk[j];
            }
        }
    });
}

void matmul_nt(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate)
{
    const size_t m = a.rows(), k = a.cols(), n = b.rows();
    check_dims(k, b.cols(), "matmul_nt inner");
    check_dims(m, c.rows(), "matmul_nt out rows");
    check_dims(n, c.cols(), "matmul_nt out cols");
    parallel_rows(m, 2 * k * n, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const double* ai = a.row(i);
            double* ci = c.row(i);
            for (size_t j = 0; j < n; ++j) {
                const double* bj = b.row(j);
                double sum = 0.0;
                for (size_t kk = 0; kk < k; ++kk) sum += ai[kk] * bj[kk];
                ci[j] = accumulate ? ci[j] + sum : sum;
            }
        }
    });
}

void add_row_vector(Tensor& x, const Tensor& bias)
{
    check_dims(x.cols(), bias.size(), "add_row_vector");
    for (size_t i = 0; i < x.rows(); ++i) {
        double* xi = x.row(i);
        for (size_t j = 0; j < x.cols(); ++j) xi[j] += bias.at(j);
    }
}

void softmax_rows(Tensor& x)
{
    for (size_t i = 0; i < x.rows(); ++i) {
        double* xi = x.row(i);
        double peak = xi[0];
        for (size_t j = 1; j < x.cols(); ++j) peak = std::max(peak, xi[j]);
        double total = 0.0;
        for (size_t j = 0; j < x.cols(); ++j) {
            xi[j] = std::exp(xi[j] - peak);
            total += xi[j];
        }
        for (size_t j = 0; j < x.cols(); ++j) xi[j] /= total;
    }
}

} // namespace feelab::nn
