#pragma once

#include <cstddef>

// Dense kernels behind network training. Every operation has a scalar
// reference implementation and may have SIMD variants; the dispatcher picks
// one at process start. Variants are required to be bitwise identical to the
// scalar reference (same per-element operation order, no FMA contraction), so
// results do not depend on which table is active.

namespace branchfinder::kernels {

// C[m x n] = A[m x k] * B[k x n] + bias[i] broadcast per row. Row-major.
using GemmBiasFn = void (*)(double* c, const double* a, const double* b,
                            const double* bias, std::size_t m, std::size_t k,
                            std::size_t n);

// C[m x n] += A[m x k] * B[k x n]. Row-major.
using GemmAccFn = void (*)(double* c, const double* a, const double* b,
                           std::size_t m, std::size_t k, std::size_t n);

// dst[cols x rows] = transpose of src[rows x cols].
using TransposeFn = void (*)(double* dst, const double* src, std::size_t rows,
                             std::size_t cols);

// dst[i] += sum over row i of src[rows x cols].
using RowSumAccFn = void (*)(double* dst, const double* src, std::size_t rows,
                             std::size_t cols);

// y[i] += alpha * x[i].
using AxpyFn = void (*)(double* y, double alpha, const double* x,
                        std::size_t n);

// One adaptive-moments update over a parameter array. bias1/bias2 are the
// precomputed corrections (1 - decay^step).
using AdamStepFn = void (*)(double* p, double* m, double* v, const double* g,
                            std::size_t n, double lr, double decay1,
                            double decay2, double eps, double bias1,
                            double bias2);

struct KernelTable {
    const char* name;
    GemmBiasFn gemm_bias;
    GemmAccFn gemm_acc;
    TransposeFn transpose;
    RowSumAccFn row_sum_acc;
    AxpyFn axpy;
    AdamStepFn adam_step;
};

/// Portable reference implementation.
const KernelTable& scalar_table();

/// AVX2 variant, or nullptr when the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Table selected at first use: AVX2 when available, else scalar. The
/// environment variable BRANCHFINDER_KERNELS=scalar|avx2|auto overrides.
const KernelTable& active();

}  // namespace branchfinder::kernels
