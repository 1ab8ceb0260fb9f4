#include "branchfinder/kernels.hpp"

#include <cmath>

// Reference kernels. SIMD variants must reproduce these bit for bit: each
// output element accumulates in ascending k order, multiplies and adds round
// separately, and elementwise formulas keep the exact association used here.

namespace branchfinder::kernels {
namespace {

void gemm_bias_scalar(double* c, const double* a, const double* b,
                      const double* bias, std::size_t m, std::size_t k,
                      std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] = bias[i];
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
        }
    }
}

void gemm_acc_scalar(double* c, const double* a, const double* b,
                     std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
        }
    }
}

void transpose_scalar(double* dst, const double* src, std::size_t rows,
                      std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) dst[j * rows + i] = src[i * cols + j];
}

void row_sum_acc_scalar(double* dst, const double* src, std::size_t rows,
                        std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        double s = dst[i];
        const double* row = src + i * cols;
        for (std::size_t j = 0; j < cols; ++j) s += row[j];
        dst[i] = s;
    }
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void adam_step_scalar(double* p, double* m, double* v, const double* g,
                      std::size_t n, double lr, double decay1, double decay2,
                      double eps, double bias1, double bias2) {
    const double c1 = 1.0 - decay1;
    const double c2 = 1.0 - decay2;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = decay1 * m[i] + c1 * g[i];
        v[i] = decay2 * v[i] + c2 * g[i] * g[i];
        const double mhat = m[i] / bias1;
        const double vhat = v[i] / bias2;
        p[i] = p[i] - lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table = {
        "scalar",         gemm_bias_scalar, gemm_acc_scalar, transpose_scalar,
        row_sum_acc_scalar, axpy_scalar,      adam_step_scalar,
    };
    return table;
}

}  // namespace branchfinder::kernels
