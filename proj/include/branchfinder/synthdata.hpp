#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

#include "branchfinder/dataset.hpp"

namespace branchfinder {

// Two-branch test problems: a 1D quartic pair on [-6, 6] that coincides on
// [-6,-4] and [4,6], and a 2D pair of sigmoid-wrapped polynomial surfaces on
// [-1.5, 1.5]^2 that coincide on the axes.
enum class Problem { one_d, two_d };

const char* problem_name(Problem p);
Problem problem_from_name(std::string_view name);
int problem_dim(Problem p);

/// Per-axis input domain (same interval for every dimension).
std::pair<double, double> problem_domain(Problem p);

double phi1_1d(double x);  // ((x-4)(x+4))^2
double phi2_1d(double x);  // 0 on [-4,4], the quartic outside

double f1_2d(double x, double y);  // xy(2x+2y)
double f2_2d(double x, double y);  // xy(x^2+y^2)
double phi1_2d(double x, double y);  // sigmoid(f1)
double phi2_2d(double x, double y);  // sigmoid(f2)

/// Ground-truth value of the given branch (1 or 2) at x.
double branch_value(Problem p, int branch, std::span<const double> x);

struct MixSpec {
    int n_samples = 0;
    double fraction_branch1 = 0.5;
    double noise_sigma = 0.0;       // raw target units
    std::uint64_t seed = 0;
    bool exact_count = false;       // round(fraction*n) branch-1 samples exactly
};

/// Uniform inputs over the domain, per-sample branch choice, Gaussian noise
/// on y only. Deterministic given (problem, spec).
Dataset generate(Problem problem, const MixSpec& spec);

/// Seeded uniform shuffle, split at round(train_fraction * n).
std::pair<Dataset, Dataset> train_test_split(const Dataset& data,
                                             double train_fraction,
                                             std::uint64_t seed);

/// 0.02 * (raw target range of the noiseless mixture); the 1D pair spans
/// [0, 400], the 2D pair spans (sigmoid(-13.5), sigmoid(13.5)).
double default_noise_sigma(Problem p);

}  // namespace branchfinder
