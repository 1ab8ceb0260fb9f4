#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "branchfinder/extraction.hpp"
#include "branchfinder/network.hpp"
#include "branchfinder/synthdata.hpp"
#include "json.hpp"

namespace branchfinder {

// One experiment description: which problem, how to mix the branches, how to
// train, how to extract, where artifacts go. Serializes to a JSON document;
// every field can be overridden on the command line with --dotted.path value.

struct ExtractionKnobs {
    double threshold_multiplier = 3.0;
    double stop_fraction = 0.10;
    int max_branches = 5;
    int min_branch_size = 50;
    std::optional<double> fixed_beta;  // unset: 8/IQR rule per iteration
};

struct RunConfig {
    Problem problem = Problem::one_d;
    MixSpec mix{/*n_samples=*/5000, /*fraction_branch1=*/0.6,
                /*noise_sigma=*/0.0, /*seed=*/1, /*exact_count=*/false};
    bool noise_auto = true;  // mix.noise_sigma ignored; 2% of target range
    NetworkConfig network;   // input_dim always follows the problem
    TrainConfig training;
    ExtractionKnobs extraction;
    std::string output_dir = "out";
    bool emit_plot_data = false;
};

nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

/// Sets doc at the dotted path (must name an existing scalar or array leaf).
/// The value text is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& dotted_key,
                    const std::string& value);

/// Defaults, overlaid with the config file when given, then the overrides in
/// order, then BRANCHFINDER_SEED (which rewrites every seed field) when set.
RunConfig load_run_config(
    const std::optional<std::string>& config_path,
    const std::vector<std::pair<std::string, std::string>>& overrides);

double resolved_noise_sigma(const RunConfig& c);

/// Extraction settings assembled from the run's network/training blocks and
/// the extraction knobs.
ExtractionConfig make_extraction_config(const RunConfig& c);

}  // namespace branchfinder
