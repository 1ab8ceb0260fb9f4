#pragma once

#include <functional>
#include <string>
#include <vector>

#include "branchfinder/extraction.hpp"
#include "branchfinder/network.hpp"

namespace branchfinder {

// Scalar scores for the qualitative claims about loss behavior: logcosh
// snaps to one branch, MSE sits between branches, MAE flips between them.
// Each metric has a value-level core (testable against stub predictions) and
// a model-level wrapper that evaluates the network on a grid.

using BranchFn = std::function<double(const std::vector<double>&)>;

struct AdherenceReport {
    double fraction_closer_to_majority = 0.0;  // strictly closer; ties count against
    double mean_abs_error_to_majority = 0.0;
    double mean_abs_error_to_minority = 0.0;
    std::string region;
};

AdherenceReport adherence_values(const std::vector<double>& pred,
                                 const std::vector<double>& majority,
                                 const std::vector<double>& minority,
                                 std::string region);
AdherenceReport adherence(const NetworkModel& model, const BranchFn& majority,
                          const BranchFn& minority,
                          const std::vector<std::vector<double>>& grid,
                          std::string region);

/// Fraction of genuinely multi-valued grid points (gap > 5% of the value
/// range across both functions) where the prediction lies between the
/// branches with a margin of 5% of the local gap. Empty filtered grid is a
/// domain error.
double betweenness_values(const std::vector<double>& pred,
                          const std::vector<double>& phi_a,
                          const std::vector<double>& phi_b);
double betweenness(const NetworkModel& model, const BranchFn& phi_a,
                   const BranchFn& phi_b,
                   const std::vector<std::vector<double>>& grid);

/// Nearest-branch assignment switches along an ordered grid, divided by grid
/// size. Requires at least 2 points.
double oscillation_index_values(const std::vector<double>& pred,
                                const std::vector<double>& phi_a,
                                const std::vector<double>& phi_b);
double oscillation_index(const NetworkModel& model, const BranchFn& phi_a,
                         const BranchFn& phi_b,
                         const std::vector<std::vector<double>>& ordered_grid);

struct ConfusionReport {
    double accuracy = 0.0;  // best bijection of found ordinals onto true labels
    std::vector<int> true_labels;             // column order of the matrix
    std::vector<std::vector<int>> confusion;  // [found branch][true label]
    int n_ambiguous = 0;
    int n_unassigned = 0;
};

/// Scores assignments against generator labels on the masked samples.
/// Ambiguous samples count correct when any branch within its tau maps to
/// the true label; unassigned samples count incorrect. The confusion matrix
/// counts assigned masked samples by (primary branch, true label).
ConfusionReport branch_accuracy(const ExtractionResult& result,
                                const std::vector<std::optional<int>>& truth,
                                const std::vector<bool>& mask);

}  // namespace branchfinder
