#include "branchfinder/synthdata.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "branchfinder/error.hpp"
#include "branchfinder/rng.hpp"

namespace branchfinder {
namespace {

void check_1d(double x) {
    if (!(x >= -6.0 && x <= 6.0))
        fail(ErrorKind::domain_error,
             "x = " + std::to_string(x) + " outside 1D domain [-6, 6]");
}

void check_2d(double x, double y) {
    if (!(x >= -1.5 && x <= 1.5 && y >= -1.5 && y <= 1.5))
        fail(ErrorKind::domain_error, "(" + std::to_string(x) + ", " +
                                          std::to_string(y) +
                                          ") outside 2D domain [-1.5, 1.5]^2");
}

double quartic(double x) {
    const double p = (x - 4.0) * (x + 4.0);
    return p * p;
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

const char* problem_name(Problem p) {
    return p == Problem::one_d ? "1d" : "2d";
}

Problem problem_from_name(std::string_view name) {
    if (name == "1d") return Problem::one_d;
    if (name == "2d") return Problem::two_d;
    fail(ErrorKind::invalid_config, "unknown problem: " + std::string(name));
}

int problem_dim(Problem p) { return p == Problem::one_d ? 1 : 2; }

std::pair<double, double> problem_domain(Problem p) {
    return p == Problem::one_d ? std::pair{-6.0, 6.0} : std::pair{-1.5, 1.5};
}

double phi1_1d(double x) {
    check_1d(x);
    return quartic(x);
}

double phi2_1d(double x) {
    check_1d(x);
    if (x >= -4.0 && x <= 4.0) return 0.0;
    return quartic(x);
}

double f1_2d(double x, double y) {
    check_2d(x, y);
    return x * y * (2.0 * x + 2.0 * y);
}

double f2_2d(double x, double y) {
    check_2d(x, y);
    return x * y * (x * x + y * y);
}

double phi1_2d(double x, double y) { return sigmoid(f1_2d(x, y)); }

double phi2_2d(double x, double y) { return sigmoid(f2_2d(x, y)); }

double branch_value(Problem p, int branch, std::span<const double> x) {
    if (branch != 1 && branch != 2)
        fail(ErrorKind::invalid_input, "branch must be 1 or 2");
    if (static_cast<int>(x.size()) != problem_dim(p))
        fail(ErrorKind::invalid_input, "input dimension mismatch");
    if (p == Problem::one_d) return branch == 1 ? phi1_1d(x[0]) : phi2_1d(x[0]);
    return branch == 1 ? phi1_2d(x[0], x[1]) : phi2_2d(x[0], x[1]);
}

Dataset generate(Problem problem, const MixSpec& spec) {
    if (spec.n_samples <= 0)
        fail(ErrorKind::invalid_input, "n_samples must be positive");
    if (!(spec.fraction_branch1 >= 0.0 && spec.fraction_branch1 <= 1.0))
        fail(ErrorKind::invalid_config, "fraction_branch1 must lie in [0, 1]");
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma))
        fail(ErrorKind::invalid_config, "noise_sigma must be non-negative");

    const int d = problem_dim(problem);
    const auto [lo, hi] = problem_domain(problem);
    const long n1_exact = std::llround(spec.fraction_branch1 * spec.n_samples);

    Rng rng(spec.seed);
    Dataset data;
    data.input_dim = d;
    data.samples.resize(spec.n_samples);
    for (int i = 0; i < spec.n_samples; ++i) {
        Sample& s = data.samples[i];
        s.x.resize(d);
        for (int j = 0; j < d; ++j) s.x[j] = rng.uniform(lo, hi);
        int branch;
        if (spec.exact_count) {
            branch = i < n1_exact ? 1 : 2;
        } else {
            branch = rng.uniform() < spec.fraction_branch1 ? 1 : 2;
        }
        const double noise = rng.normal();
        s.y = branch_value(problem, branch, s.x) + spec.noise_sigma * noise;
        s.true_branch = branch;
    }
    return data;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data,
                                             double train_fraction,
                                             std::uint64_t seed) {
    if (data.samples.empty())
        fail(ErrorKind::invalid_input, "cannot split an empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        fail(ErrorKind::invalid_config, "train_fraction must lie in (0, 1)");
    const int n = data.n();
    const int n_train = static_cast<int>(std::llround(train_fraction * n));
    if (n_train <= 0 || n_train >= n)
        fail(ErrorKind::invalid_input,
             "split would leave an empty part (n=" + std::to_string(n) +
                 ", train_fraction=" + std::to_string(train_fraction) + ")");

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);

    Dataset train, test;
    train.input_dim = test.input_dim = data.input_dim;
    train.samples.reserve(n_train);
    test.samples.reserve(n - n_train);
    for (int i = 0; i < n; ++i) {
        (i < n_train ? train : test).samples.push_back(data.samples[idx[i]]);
    }
    return {std::move(train), std::move(test)};
}

double default_noise_sigma(Problem p) {
    if (p == Problem::one_d) return 0.02 * 400.0;
    // Extremes of both surfaces sit at the domain corners: f1(+-1.5,+-1.5)
    // = +-13.5 dominates f2's +-10.125.
    return 0.02 * (sigmoid(13.5) - sigmoid(-13.5));
}

}  // namespace branchfinder
