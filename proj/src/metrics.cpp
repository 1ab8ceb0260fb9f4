#include "branchfinder/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "branchfinder/error.hpp"

namespace branchfinder {
namespace {

void check_same_size(std::size_t a, std::size_t b, std::size_t c, const char* who) {
    if (a == 0) fail(ErrorKind::invalid_input, std::string(who) + ": empty grid");
    if (a != b || a != c)
        fail(ErrorKind::invalid_input, std::string(who) + ": length mismatch");
}

std::vector<double> eval_on_grid(const BranchFn& f,
                                 const std::vector<std::vector<double>>& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (const auto& x : grid) out.push_back(f(x));
    return out;
}

}  // namespace

AdherenceReport adherence_values(const std::vector<double>& pred,
                                 const std::vector<double>& majority,
                                 const std::vector<double>& minority,
                                 std::string region) {
    check_same_size(pred.size(), majority.size(), minority.size(), "adherence");
    AdherenceReport rep;
    rep.region = std::move(region);
    std::size_t closer = 0;
    double err_maj = 0.0, err_min = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double da = std::abs(pred[i] - majority[i]);
        const double db = std::abs(pred[i] - minority[i]);
        if (da < db) ++closer;
        err_maj += da;
        err_min += db;
    }
    const auto n = static_cast<double>(pred.size());
    rep.fraction_closer_to_majority = static_cast<double>(closer) / n;
    rep.mean_abs_error_to_majority = err_maj / n;
    rep.mean_abs_error_to_minority = err_min / n;
    return rep;
}

AdherenceReport adherence(const NetworkModel& model, const BranchFn& majority,
                          const BranchFn& minority,
                          const std::vector<std::vector<double>>& grid,
                          std::string region) {
    return adherence_values(forward_many(model, grid), eval_on_grid(majority, grid),
                            eval_on_grid(minority, grid), std::move(region));
}

double betweenness_values(const std::vector<double>& pred,
                          const std::vector<double>& phi_a,
                          const std::vector<double>& phi_b) {
    check_same_size(pred.size(), phi_a.size(), phi_b.size(), "betweenness");
    double all_lo = phi_a[0], all_hi = phi_a[0];
    for (std::size_t i = 0; i < phi_a.size(); ++i) {
        all_lo = std::min({all_lo, phi_a[i], phi_b[i]});
        all_hi = std::max({all_hi, phi_a[i], phi_b[i]});
    }
    const double range = all_hi - all_lo;

    std::size_t kept = 0, between = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double gap = std::abs(phi_a[i] - phi_b[i]);
        if (!(gap > 0.05 * range)) continue;  // not genuinely multi-valued here
        ++kept;
        const double margin = 0.05 * gap;
        const double lo = std::min(phi_a[i], phi_b[i]) + margin;
        const double hi = std::max(phi_a[i], phi_b[i]) - margin;
        if (pred[i] >= lo && pred[i] <= hi) ++between;
    }
    if (kept == 0)
        fail(ErrorKind::domain_error,
             "betweenness: no grid points with a gap above the filter");
    return static_cast<double>(between) / static_cast<double>(kept);
}

double betweenness(const NetworkModel& model, const BranchFn& phi_a,
                   const BranchFn& phi_b,
                   const std::vector<std::vector<double>>& grid) {
    return betweenness_values(forward_many(model, grid), eval_on_grid(phi_a, grid),
                              eval_on_grid(phi_b, grid));
}

double oscillation_index_values(const std::vector<double>& pred,
                                const std::vector<double>& phi_a,
                                const std::vector<double>& phi_b) {
    check_same_size(pred.size(), phi_a.size(), phi_b.size(), "oscillation_index");
    if (pred.size() < 2)
        fail(ErrorKind::invalid_input, "oscillation_index: need at least 2 points");
    std::size_t switches = 0;
    bool prev_a = true;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool near_a =
            std::abs(pred[i] - phi_a[i]) <= std::abs(pred[i] - phi_b[i]);
        if (i > 0 && near_a != prev_a) ++switches;
        prev_a = near_a;
    }
    return static_cast<double>(switches) / static_cast<double>(pred.size());
}

double oscillation_index(const NetworkModel& model, const BranchFn& phi_a,
                         const BranchFn& phi_b,
                         const std::vector<std::vector<double>>& ordered_grid) {
    return oscillation_index_values(forward_many(model, ordered_grid),
                                    eval_on_grid(phi_a, ordered_grid),
                                    eval_on_grid(phi_b, ordered_grid));
}

ConfusionReport branch_accuracy(const ExtractionResult& result,
                                const std::vector<std::optional<int>>& truth,
                                const std::vector<bool>& mask) {
    const std::size_t n = result.assignment.size();
    if (truth.size() != n || mask.size() != n)
        fail(ErrorKind::invalid_input,
             "branch_accuracy: truth/mask must match the assignment length");
    const int n_branches = static_cast<int>(result.branches.size());
    if (n_branches > 6)
        fail(ErrorKind::unsupported_size,
             "branch_accuracy: more than 6 branches, permutation matching "
             "not enumerable");

    // Distinct true labels among masked samples, in sorted order.
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        if (!truth[i])
            fail(ErrorKind::missing_truth,
                 "branch_accuracy: masked sample " + std::to_string(i) +
                     " has no true branch label");
        if (std::find(labels.begin(), labels.end(), *truth[i]) == labels.end())
            labels.push_back(*truth[i]);
    }
    std::sort(labels.begin(), labels.end());
    if (labels.size() > 6)
        fail(ErrorKind::unsupported_size,
             "branch_accuracy: more than 6 distinct true labels");

    ConfusionReport rep;
    rep.true_labels = labels;
    rep.confusion.assign(n_branches, std::vector<int>(labels.size(), 0));

    std::size_t n_masked = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        ++n_masked;
        const SampleAssignment& a = result.assignment[i];
        if (a.ambiguous) ++rep.n_ambiguous;
        if (!a.primary_branch) {
            ++rep.n_unassigned;
            continue;
        }
        const auto col = static_cast<std::size_t>(
            std::find(labels.begin(), labels.end(), *truth[i]) - labels.begin());
        rep.confusion[*a.primary_branch - 1][col]++;
    }
    if (n_masked == 0)
        fail(ErrorKind::invalid_input, "branch_accuracy: mask selects no samples");

    // Candidate mapping targets: true labels, padded with unmatchable
    // sentinels when there are more branches than labels. Permuting the
    // padded set enumerates every injective assignment of branches to labels.
    std::vector<int> slots = labels;
    int sentinel = (labels.empty() ? 0 : labels.front()) - 1;
    while (slots.size() < static_cast<std::size_t>(n_branches))
        slots.push_back(sentinel--);
    std::sort(slots.begin(), slots.end());

    std::size_t best_correct = 0;
    do {
        // slots[b] is the true label branch b+1 claims under this bijection.
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!mask[i]) continue;
            const SampleAssignment& a = result.assignment[i];
            const int want = *truth[i];
            if (a.ambiguous) {
                for (int b = 0; b < n_branches; ++b) {
                    if (a.residuals[b] <= result.branches[b].tau &&
                        slots[b] == want) {
                        ++correct;
                        break;
                    }
                }
            } else if (a.primary_branch && slots[*a.primary_branch - 1] == want) {
                ++correct;
            }
        }
        best_correct = std::max(best_correct, correct);
    } while (std::next_permutation(slots.begin(), slots.end()));

    rep.accuracy = static_cast<double>(best_correct) / static_cast<double>(n_masked);
    return rep;
}

}  // namespace branchfinder
