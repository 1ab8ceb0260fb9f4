#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "branchfinder/dataset.hpp"
#include "branchfinder/network.hpp"

namespace branchfinder {

// Iterative peel-and-refit: train on everything, keep what fits, repeat on
// the rest. Logcosh pulls each fit onto the currently dominant branch, so the
// loop discovers branches in decreasing order of sample share.

struct ExtractionConfig {
    TrainConfig train_config;           // loss variant defaults to logcosh
    NetworkConfig network_config;       // input_dim is taken from the data
    double threshold_multiplier = 3.0;  // k in the MAD threshold rule
    double stop_fraction = 0.10;        // stop when remaining < this * n
    int max_branches = 5;
    int min_branch_size = 50;
    // Residual scale for the loss. Unset: choose_beta on each iteration's
    // remaining data. Set: used verbatim every iteration.
    std::optional<double> fixed_beta;
};

struct BranchModel {
    int index = 0;  // 1-based, extraction order
    NetworkModel model;
    double tau = 0.0;  // residual threshold, raw target units
    std::vector<int> member_indices;  // original sample indices claimed at peel time
};

struct SampleAssignment {
    std::optional<int> primary_branch;  // 1-based ordinal; unset = unassigned
    bool ambiguous = false;
    std::vector<double> residuals;  // |y - prediction| against every branch
};

struct ExtractionResult {
    std::vector<BranchModel> branches;
    std::vector<SampleAssignment> assignment;  // aligned with the input dataset
    std::vector<int> leftover_indices;         // never claimed while peeling
};

/// beta = 8 / IQR(targets), clamped to [1, 100]; zero IQR returns the clamp
/// maximum. Callers pass targets already scaled to [0,1] by the network's
/// min-max convention so that 8/IQR lands cross-branch residuals in the
/// linear regime of logcosh.
double choose_beta(const Dataset& data);

/// k * 1.4826 * MAD of the residuals, floored at 1e-9 * target_range so
/// noiseless fits keep a positive threshold.
double residual_threshold(const std::vector<double>& residuals, double k,
                          double target_range);

/// Trains a fresh network on all of data with the configured loss variant and
/// the beta given by the beta rule. Requires at least min_branch_size samples.
NetworkModel fit_dominant_branch(const Dataset& data, const ExtractionConfig& cfg);

/// Splits indices into (inliers, outliers) by |y - forward(model, x)| <= tau.
std::pair<std::vector<int>, std::vector<int>> peel(const Dataset& data,
                                                   const NetworkModel& model,
                                                   double tau);

/// The full loop: fit, threshold, peel, repeat on the outliers until the
/// remainder is below stop_fraction * n or min_branch_size, or max_branches
/// is hit. Seeds are offset by the iteration index so every branch trains a
/// fresh network deterministically. Ends with a reassignment pass of every
/// sample against every branch (argmin residual, accepted within that
/// branch's tau; ambiguous when two or more branches are within theirs).
ExtractionResult extract_branches(const Dataset& data, const ExtractionConfig& cfg);

}  // namespace branchfinder
