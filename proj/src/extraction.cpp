#include "branchfinder/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "branchfinder/error.hpp"

namespace branchfinder {
namespace {

// Type-7 quantile (linear interpolation between order statistics) on a
// pre-sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double median_inplace(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
}

std::vector<std::vector<double>> gather_inputs(const Dataset& data) {
    std::vector<std::vector<double>> xs;
    xs.reserve(data.samples.size());
    for (const Sample& s : data.samples) xs.push_back(s.x);
    return xs;
}

}  // namespace

double choose_beta(const Dataset& data) {
    if (data.samples.empty())
        fail(ErrorKind::insufficient_data, "choose_beta: empty dataset");
    std::vector<double> ys;
    ys.reserve(data.samples.size());
    for (const Sample& s : data.samples) ys.push_back(s.y);
    std::sort(ys.begin(), ys.end());
    const double iqr = quantile_sorted(ys, 0.75) - quantile_sorted(ys, 0.25);
    if (iqr <= 0.0) return 100.0;
    return std::clamp(8.0 / iqr, 1.0, 100.0);
}

double residual_threshold(const std::vector<double>& residuals, double k,
                          double target_range) {
    if (residuals.empty())
        fail(ErrorKind::invalid_input, "residual_threshold: empty residuals");
    if (!(k > 0.0))
        fail(ErrorKind::invalid_config, "residual_threshold: k must be positive");
    if (!(target_range >= 0.0))
        fail(ErrorKind::invalid_input, "residual_threshold: negative target range");

    std::vector<double> work = residuals;
    const double med = median_inplace(work);
    for (double& r : work) r = std::abs(r - med);
    const double mad = median_inplace(work);

    const double tau = std::max(k * 1.4826 * mad, 1e-9 * target_range);
    // Degenerate case: zero spread and zero range still needs a positive
    // threshold for the tau > 0 invariant.
    return tau > 0.0 ? tau : 1e-300;
}

NetworkModel fit_dominant_branch(const Dataset& data, const ExtractionConfig& cfg) {
    if (data.n() < cfg.min_branch_size)
        fail(ErrorKind::insufficient_data,
             "fit_dominant_branch: " + std::to_string(data.n()) +
                 " samples, need at least " + std::to_string(cfg.min_branch_size));

    TrainConfig tc = cfg.train_config;
    if (cfg.fixed_beta) {
        tc.loss.beta = *cfg.fixed_beta;
    } else {
        // Scale targets exactly as train() will, then size beta to the spread.
        Dataset scaled = data;
        double lo = data.samples[0].y, hi = data.samples[0].y;
        for (const Sample& s : data.samples) {
            lo = std::min(lo, s.y);
            hi = std::max(hi, s.y);
        }
        const double range = hi > lo ? hi - lo : 1.0;
        for (Sample& s : scaled.samples) s.y = (s.y - lo) / range;
        tc.loss.beta = choose_beta(scaled);
    }

    NetworkConfig nc = cfg.network_config;
    nc.input_dim = data.input_dim;
    NetworkModel model = init_model(nc);
    train(model, data, tc);
    return model;
}

std::pair<std::vector<int>, std::vector<int>> peel(const Dataset& data,
                                                   const NetworkModel& model,
                                                   double tau) {
    if (!(tau > 0.0)) fail(ErrorKind::invalid_config, "peel: tau must be positive");
    const std::vector<double> pred = forward_many(model, gather_inputs(data));
    std::vector<int> inliers, outliers;
    for (int i = 0; i < data.n(); ++i) {
        if (std::abs(data.samples[i].y - pred[i]) <= tau)
            inliers.push_back(i);
        else
            outliers.push_back(i);
    }
    return {std::move(inliers), std::move(outliers)};
}

ExtractionResult extract_branches(const Dataset& data, const ExtractionConfig& cfg) {
    if (data.samples.empty())
        fail(ErrorKind::insufficient_data, "extract_branches: empty dataset");
    if (!(cfg.stop_fraction > 0.0 && cfg.stop_fraction < 1.0))
        fail(ErrorKind::invalid_config, "stop_fraction must lie in (0, 1)");
    if (cfg.max_branches < 1)
        fail(ErrorKind::invalid_config, "max_branches must be >= 1");
    if (cfg.min_branch_size < 1)
        fail(ErrorKind::invalid_config, "min_branch_size must be >= 1");

    const int n0 = data.n();
    std::vector<int> remaining(n0);
    for (int i = 0; i < n0; ++i) remaining[i] = i;

    ExtractionResult result;
    for (int iteration = 0;; ++iteration) {
        const auto remaining_n = static_cast<double>(remaining.size());
        if (remaining_n < cfg.stop_fraction * n0) break;
        if (remaining_n < cfg.min_branch_size) break;
        if (static_cast<int>(result.branches.size()) >= cfg.max_branches) break;

        Dataset sub;
        sub.input_dim = data.input_dim;
        for (int idx : remaining) sub.samples.push_back(data.samples[idx]);

        ExtractionConfig it_cfg = cfg;
        it_cfg.network_config.seed = cfg.network_config.seed + iteration;
        it_cfg.train_config.seed = cfg.train_config.seed + iteration;
        NetworkModel model = fit_dominant_branch(sub, it_cfg);

        const std::vector<double> pred = forward_many(model, gather_inputs(sub));
        std::vector<double> residuals(sub.samples.size());
        double lo = sub.samples[0].y, hi = sub.samples[0].y;
        for (std::size_t i = 0; i < sub.samples.size(); ++i) {
            residuals[i] = sub.samples[i].y - pred[i];
            lo = std::min(lo, sub.samples[i].y);
            hi = std::max(hi, sub.samples[i].y);
        }
        const double tau =
            residual_threshold(residuals, cfg.threshold_multiplier, hi - lo);

        const auto [inliers, outliers] = peel(sub, model, tau);
        if (inliers.empty())
            fail(ErrorKind::no_progress,
                 "extraction claimed no inliers at iteration " +
                     std::to_string(iteration + 1));

        BranchModel branch;
        branch.index = static_cast<int>(result.branches.size()) + 1;
        branch.model = std::move(model);
        branch.tau = tau;
        for (int i : inliers) branch.member_indices.push_back(remaining[i]);
        result.branches.push_back(std::move(branch));

        std::vector<int> next;
        next.reserve(outliers.size());
        for (int i : outliers) next.push_back(remaining[i]);
        remaining = std::move(next);
    }
    result.leftover_indices = std::move(remaining);

    // Reassignment pass: every sample against every branch, claimed by the
    // branch with the smallest residual when within that branch's tau.
    const std::size_t n_branches = result.branches.size();
    std::vector<std::vector<double>> branch_pred(n_branches);
    const std::vector<std::vector<double>> all_inputs = gather_inputs(data);
    for (std::size_t b = 0; b < n_branches; ++b)
        branch_pred[b] = forward_many(result.branches[b].model, all_inputs);

    result.assignment.resize(n0);
    for (int i = 0; i < n0; ++i) {
        SampleAssignment& a = result.assignment[i];
        a.residuals.resize(n_branches);
        std::size_t best = 0;
        int within = 0;
        for (std::size_t b = 0; b < n_branches; ++b) {
            a.residuals[b] = std::abs(data.samples[i].y - branch_pred[b][i]);
            if (a.residuals[b] < a.residuals[best]) best = b;
            if (a.residuals[b] <= result.branches[b].tau) ++within;
        }
        if (n_branches > 0 && a.residuals[best] <= result.branches[best].tau)
            a.primary_branch = static_cast<int>(best) + 1;
        a.ambiguous = within >= 2;
    }
    return result;
}

}  // namespace branchfinder
