#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace branchfinder {

// Deterministic random draws. std::mt19937_64's output sequence is pinned by
// the standard, but the std distributions are not, so the mappings from raw
// 64-bit words to doubles/ints live here and never change.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Standard normal via Box-Muller; consumes exactly two words.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();  // guard log(0)
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    /// Uniform integer in [0, bound) via rejection sampling (unbiased).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t raw = gen_();
        while (raw >= limit) raw = gen_();
        return raw % bound;
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace branchfinder
