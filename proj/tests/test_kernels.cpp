#include "branchfinder/kernels.hpp"

#include <cmath>
#include <cstring>
#include <vector>

#include "branchfinder/rng.hpp"
#include "doctest.h"

using namespace branchfinder;

namespace {

// Independent oracle: plain jki triple loop, no accumulation-order tricks.
std::vector<double> naive_gemm(const std::vector<double>& a,
                               const std::vector<double>& b, std::size_t m,
                               std::size_t k, std::size_t n) {
    std::vector<double> c(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
            c[i * n + j] = s;
        }
    return c;
}

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

}  // namespace

TEST_CASE("gemm_bias matches naive oracle") {
    Rng rng(7);
    for (std::size_t m : {1u, 3u, 8u}) {
        for (std::size_t k : {1u, 5u, 16u}) {
            for (std::size_t n : {1u, 4u, 7u, 64u}) {
                auto a = random_vec(rng, m * k);
                auto b = random_vec(rng, k * n);
                auto bias = random_vec(rng, m);
                std::vector<double> c(m * n, -1.0);
                kernels::scalar_table().gemm_bias(c.data(), a.data(), b.data(),
                                                  bias.data(), m, k, n);
                auto want = naive_gemm(a, b, m, k, n);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        CHECK(c[i * n + j] ==
                              doctest::Approx(want[i * n + j] + bias[i]).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("gemm_acc accumulates on top of existing values") {
    Rng rng(11);
    const std::size_t m = 4, k = 6, n = 9;
    auto a = random_vec(rng, m * k);
    auto b = random_vec(rng, k * n);
    auto c0 = random_vec(rng, m * n);
    auto c = c0;
    kernels::scalar_table().gemm_acc(c.data(), a.data(), b.data(), m, k, n);
    auto want = naive_gemm(a, b, m, k, n);
    for (std::size_t i = 0; i < m * n; ++i)
        CHECK(c[i] == doctest::Approx(c0[i] + want[i]).epsilon(1e-13));
}

TEST_CASE("transpose round-trips") {
    Rng rng(13);
    const std::size_t r = 5, c = 8;
    auto src = random_vec(rng, r * c);
    std::vector<double> t(r * c), back(r * c);
    kernels::scalar_table().transpose(t.data(), src.data(), r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) CHECK(t[j * r + i] == src[i * c + j]);
    kernels::scalar_table().transpose(back.data(), t.data(), c, r);
    CHECK(back == src);
}

TEST_CASE("row_sum_acc adds row totals") {
    std::vector<double> src = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};  // 2 x 3
    std::vector<double> dst = {10.0, 20.0};
    kernels::scalar_table().row_sum_acc(dst.data(), src.data(), 2, 3);
    CHECK(dst[0] == 16.0);
    CHECK(dst[1] == 35.0);
}

TEST_CASE("axpy") {
    std::vector<double> y = {1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> x = {1.0, 1.0, 2.0, 2.0, 3.0};
    kernels::scalar_table().axpy(y.data(), -0.5, x.data(), 5);
    CHECK(y == std::vector<double>{0.5, 1.5, 2.0, 3.0, 3.5});
}

TEST_CASE("adam_step drives a parameter toward lower loss") {
    // Single parameter, constant gradient 1: the step size must approach lr.
    double p = 1.0, m = 0.0, v = 0.0;
    const double g = 1.0, lr = 0.1, d1 = 0.9, d2 = 0.999, eps = 1e-8;
    double prev = p;
    for (int t = 1; t <= 50; ++t) {
        const double bias1 = 1.0 - std::pow(d1, t);
        const double bias2 = 1.0 - std::pow(d2, t);
        kernels::scalar_table().adam_step(&p, &m, &v, &g, 1, lr, d1, d2, eps,
                                          bias1, bias2);
        CHECK(p < prev);
        prev = p;
    }
    CHECK(p == doctest::Approx(1.0 - 50 * lr).epsilon(0.02));
}

TEST_CASE("avx2 variants are bitwise identical to scalar") {
    const kernels::KernelTable* avx2 = kernels::avx2_table();
    if (avx2 == nullptr) {
        MESSAGE("AVX2 unavailable on this CPU; equivalence not exercised");
        return;
    }
    Rng rng(42);
    // Sizes straddle the 4-lane vector width to cover remainder paths.
    for (std::size_t m : {1u, 2u, 64u}) {
        for (std::size_t k : {1u, 3u, 64u}) {
            for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 63u, 64u, 65u}) {
                auto a = random_vec(rng, m * k);
                auto b = random_vec(rng, k * n);
                auto bias = random_vec(rng, m);
                std::vector<double> c1(m * n), c2(m * n);
                kernels::scalar_table().gemm_bias(c1.data(), a.data(), b.data(),
                                                  bias.data(), m, k, n);
                avx2->gemm_bias(c2.data(), a.data(), b.data(), bias.data(), m, k, n);
                CHECK(std::memcmp(c1.data(), c2.data(), m * n * sizeof(double)) == 0);

                auto acc = random_vec(rng, m * n);
                auto acc2 = acc;
                kernels::scalar_table().gemm_acc(acc.data(), a.data(), b.data(), m, k, n);
                avx2->gemm_acc(acc2.data(), a.data(), b.data(), m, k, n);
                CHECK(std::memcmp(acc.data(), acc2.data(), m * n * sizeof(double)) == 0);
            }
        }
    }

    for (std::size_t n : {1u, 4u, 5u, 127u, 1024u}) {
        auto x = random_vec(rng, n);
        auto y1 = random_vec(rng, n);
        auto y2 = y1;
        kernels::scalar_table().axpy(y1.data(), 0.37, x.data(), n);
        avx2->axpy(y2.data(), 0.37, x.data(), n);
        CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);

        auto g = random_vec(rng, n);
        auto p1 = random_vec(rng, n);
        auto p2 = p1;
        std::vector<double> m1(n, 0.01), v1(n, 0.02);
        auto m2 = m1;
        auto v2 = v1;
        for (int t = 1; t <= 3; ++t) {
            const double bias1 = 1.0 - std::pow(0.9, t);
            const double bias2 = 1.0 - std::pow(0.999, t);
            kernels::scalar_table().adam_step(p1.data(), m1.data(), v1.data(),
                                              g.data(), n, 1e-3, 0.9, 0.999,
                                              1e-8, bias1, bias2);
            avx2->adam_step(p2.data(), m2.data(), v2.data(), g.data(), n, 1e-3,
                            0.9, 0.999, 1e-8, bias1, bias2);
        }
        CHECK(std::memcmp(p1.data(), p2.data(), n * sizeof(double)) == 0);
        CHECK(std::memcmp(m1.data(), m2.data(), n * sizeof(double)) == 0);
        CHECK(std::memcmp(v1.data(), v2.data(), n * sizeof(double)) == 0);
    }
}
