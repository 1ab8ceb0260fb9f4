#include "branchfinder/kernels.hpp"

// AVX2 variants. Vectorization runs across output columns (j); every output
// element still accumulates in ascending k order with separate multiply and
// add roundings, so results match the scalar reference exactly. This file is
// built with -mavx2 and deliberately without -mfma.

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace branchfinder::kernels {
namespace {

constexpr std::size_t kLanes = 4;  // doubles per 256-bit vector

void gemm_bias_avx2(double* c, const double* a, const double* b,
                    const double* bias, std::size_t m, std::size_t k,
                    std::size_t n) {
    const std::size_t nv = n - n % kLanes;
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        const __m256d binit = _mm256_set1_pd(bias[i]);
        for (std::size_t j = 0; j < nv; j += kLanes) _mm256_storeu_pd(crow + j, binit);
        for (std::size_t j = nv; j < n; ++j) crow[j] = bias[i];
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            const __m256d av = _mm256_set1_pd(aip);
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < nv; j += kLanes) {
                const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(brow + j));
                _mm256_storeu_pd(crow + j, _mm256_add_pd(_mm256_loadu_pd(crow + j), prod));
            }
            for (std::size_t j = nv; j < n; ++j) crow[j] += aip * brow[j];
        }
    }
}

void gemm_acc_avx2(double* c, const double* a, const double* b, std::size_t m,
                   std::size_t k, std::size_t n) {
    const std::size_t nv = n - n % kLanes;
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            const __m256d av = _mm256_set1_pd(aip);
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < nv; j += kLanes) {
                const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(brow + j));
                _mm256_storeu_pd(crow + j, _mm256_add_pd(_mm256_loadu_pd(crow + j), prod));
            }
            for (std::size_t j = nv; j < n; ++j) crow[j] += aip * brow[j];
        }
    }
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
    const std::size_t nv = n - n % kLanes;
    const __m256d av = _mm256_set1_pd(alpha);
    for (std::size_t i = 0; i < nv; i += kLanes) {
        const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (std::size_t i = nv; i < n; ++i) y[i] += alpha * x[i];
}

void adam_step_avx2(double* p, double* m, double* v, const double* g,
                    std::size_t n, double lr, double decay1, double decay2,
                    double eps, double bias1, double bias2) {
    const double c1 = 1.0 - decay1;
    const double c2 = 1.0 - decay2;
    const std::size_t nv = n - n % kLanes;
    const __m256d d1 = _mm256_set1_pd(decay1);
    const __m256d d2 = _mm256_set1_pd(decay2);
    const __m256d c1v = _mm256_set1_pd(c1);
    const __m256d c2v = _mm256_set1_pd(c2);
    const __m256d b1 = _mm256_set1_pd(bias1);
    const __m256d b2 = _mm256_set1_pd(bias2);
    const __m256d lrv = _mm256_set1_pd(lr);
    const __m256d epsv = _mm256_set1_pd(eps);
    for (std::size_t i = 0; i < nv; i += kLanes) {
        const __m256d gv = _mm256_loadu_pd(g + i);
        const __m256d mv =
            _mm256_add_pd(_mm256_mul_pd(d1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(c1v, gv));
        _mm256_storeu_pd(m + i, mv);
        const __m256d g2 = _mm256_mul_pd(_mm256_mul_pd(c2v, gv), gv);
        const __m256d vv = _mm256_add_pd(_mm256_mul_pd(d2, _mm256_loadu_pd(v + i)), g2);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_div_pd(mv, b1);
        const __m256d vhat = _mm256_div_pd(vv, b2);
        const __m256d step =
            _mm256_div_pd(_mm256_mul_pd(lrv, mhat), _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv));
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
    }
    for (std::size_t i = nv; i < n; ++i) {
        m[i] = decay1 * m[i] + c1 * g[i];
        v[i] = decay2 * v[i] + c2 * g[i] * g[i];
        const double mhat = m[i] / bias1;
        const double vhat = v[i] / bias2;
        p[i] = p[i] - lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const KernelTable* avx2_table() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    // Memory-movement ops gain nothing from vectorizing here; reuse the
    // reference versions so the table stays complete.
    static const KernelTable table = {
        "avx2",
        gemm_bias_avx2,
        gemm_acc_avx2,
        scalar_table().transpose,
        scalar_table().row_sum_acc,
        axpy_avx2,
        adam_step_avx2,
    };
    return &table;
}

}  // namespace branchfinder::kernels

#else  // non-x86 or AVX2 not enabled for this translation unit

namespace branchfinder::kernels {

const KernelTable* avx2_table() { return nullptr; }

}  // namespace branchfinder::kernels

#endif
