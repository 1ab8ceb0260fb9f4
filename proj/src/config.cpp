#include "branchfinder/config.hpp"

#include <cstdlib>
#include <string>

#include "branchfinder/error.hpp"
#include "branchfinder/loss.hpp"
#include "branchfinder/serialize.hpp"

namespace branchfinder {
namespace {

[[noreturn]] void bad_config(const std::string& what) {
    fail(ErrorKind::invalid_config, what);
}

// Overlays file/override values onto the default document, insisting that
// every provided key already exists there; this is what catches typos.
void merge_onto(nlohmann::json& base, const nlohmann::json& patch,
                const std::string& prefix) {
    if (!patch.is_object())
        bad_config("config section " + (prefix.empty() ? "(root)" : prefix) +
                   " must be an object");
    for (const auto& [key, value] : patch.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        const auto it = base.find(key);
        if (it == base.end()) bad_config("unknown config key: " + path);
        if (it->is_object()) {
            if (!value.is_object())
                bad_config("config key is a section, not a value: " + path);
            merge_onto(*it, value, path);
        } else {
            *it = value;
        }
    }
}

const nlohmann::json& member(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) bad_config(std::string("missing config key: ") + key);
    return *it;
}

double require_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) bad_config(path + " must be a number");
    return j.get<double>();
}

int require_int(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_integer()) bad_config(path + " must be an integer");
    return j.get<int>();
}

std::uint64_t require_seed(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !j.is_number_integer())
        bad_config(path + " must be a non-negative integer");
    if (j.is_number_integer() && j.get<std::int64_t>() < 0)
        bad_config(path + " must be a non-negative integer");
    return j.get<std::uint64_t>();
}

bool require_bool(const nlohmann::json& j, const std::string& path) {
    if (!j.is_boolean()) bad_config(path + " must be a boolean");
    return j.get<bool>();
}

std::string require_string(const nlohmann::json& j, const std::string& path) {
    if (!j.is_string()) bad_config(path + " must be a string");
    return j.get<std::string>();
}

// "auto" or a number; unset optional encodes "auto".
std::optional<double> auto_or_number(const nlohmann::json& j,
                                     const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "auto") return std::nullopt;
        bad_config(path + " must be a number or \"auto\"");
    }
    return require_number(j, path);
}

}  // namespace

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["problem"] = problem_name(c.problem);
    j["mix"] = {
        {"n_samples", c.mix.n_samples},
        {"fraction_branch1", c.mix.fraction_branch1},
        {"noise_sigma",
         c.noise_auto ? nlohmann::json("auto") : nlohmann::json(c.mix.noise_sigma)},
        {"seed", c.mix.seed},
        {"exact_count", c.mix.exact_count},
    };
    j["network"] = {
        {"hidden_layers", c.network.hidden_layers},
        {"activation", activation_name(c.network.activation)},
        {"seed", c.network.seed},
    };
    j["training"] = {
        {"loss",
         {{"variant", loss_variant_name(c.training.loss.variant)},
          {"delta", c.training.loss.delta},
          {"beta", c.training.loss.beta}}},
        {"epochs", c.training.epochs},
        {"batch_size", c.training.batch_size},
        {"learning_rate", c.training.learning_rate},
        {"optimizer", optimizer_name(c.training.optimizer)},
        {"decay1", c.training.decay1},
        {"decay2", c.training.decay2},
        {"epsilon", c.training.epsilon},
        {"seed", c.training.seed},
    };
    j["extraction"] = {
        {"threshold_multiplier", c.extraction.threshold_multiplier},
        {"stop_fraction", c.extraction.stop_fraction},
        {"max_branches", c.extraction.max_branches},
        {"min_branch_size", c.extraction.min_branch_size},
        {"beta", c.extraction.fixed_beta ? nlohmann::json(*c.extraction.fixed_beta)
                                         : nlohmann::json("auto")},
    };
    j["output_dir"] = c.output_dir;
    j["emit_plot_data"] = c.emit_plot_data;
    return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.problem = problem_from_name(require_string(member(j, "problem"), "problem"));

    const auto& mix = member(j, "mix");
    c.mix.n_samples = require_int(member(mix, "n_samples"), "mix.n_samples");
    c.mix.fraction_branch1 =
        require_number(member(mix, "fraction_branch1"), "mix.fraction_branch1");
    const auto sigma = auto_or_number(member(mix, "noise_sigma"), "mix.noise_sigma");
    c.noise_auto = !sigma.has_value();
    c.mix.noise_sigma = sigma.value_or(0.0);
    c.mix.seed = require_seed(member(mix, "seed"), "mix.seed");
    c.mix.exact_count = require_bool(member(mix, "exact_count"), "mix.exact_count");

    const auto& net = member(j, "network");
    if (!member(net, "hidden_layers").is_array())
        bad_config("network.hidden_layers must be an array");
    c.network.hidden_layers.clear();
    for (const auto& h : member(net, "hidden_layers"))
        c.network.hidden_layers.push_back(require_int(h, "network.hidden_layers"));
    c.network.activation = activation_from_name(
        require_string(member(net, "activation"), "network.activation"));
    c.network.seed = require_seed(member(net, "seed"), "network.seed");
    c.network.input_dim = problem_dim(c.problem);

    const auto& tr = member(j, "training");
    const auto& loss = member(tr, "loss");
    c.training.loss.variant = loss_variant_from_name(
        require_string(member(loss, "variant"), "training.loss.variant"));
    c.training.loss.delta = require_number(member(loss, "delta"), "training.loss.delta");
    c.training.loss.beta = require_number(member(loss, "beta"), "training.loss.beta");
    c.training.epochs = require_int(member(tr, "epochs"), "training.epochs");
    c.training.batch_size = require_int(member(tr, "batch_size"), "training.batch_size");
    c.training.learning_rate =
        require_number(member(tr, "learning_rate"), "training.learning_rate");
    c.training.optimizer = optimizer_from_name(
        require_string(member(tr, "optimizer"), "training.optimizer"));
    c.training.decay1 = require_number(member(tr, "decay1"), "training.decay1");
    c.training.decay2 = require_number(member(tr, "decay2"), "training.decay2");
    c.training.epsilon = require_number(member(tr, "epsilon"), "training.epsilon");
    c.training.seed = require_seed(member(tr, "seed"), "training.seed");

    const auto& ex = member(j, "extraction");
    c.extraction.threshold_multiplier = require_number(
        member(ex, "threshold_multiplier"), "extraction.threshold_multiplier");
    c.extraction.stop_fraction =
        require_number(member(ex, "stop_fraction"), "extraction.stop_fraction");
    c.extraction.max_branches =
        require_int(member(ex, "max_branches"), "extraction.max_branches");
    c.extraction.min_branch_size =
        require_int(member(ex, "min_branch_size"), "extraction.min_branch_size");
    c.extraction.fixed_beta = auto_or_number(member(ex, "beta"), "extraction.beta");

    c.output_dir = require_string(member(j, "output_dir"), "output_dir");
    c.emit_plot_data = require_bool(member(j, "emit_plot_data"), "emit_plot_data");
    return c;
}

void apply_override(nlohmann::json& doc, const std::string& dotted_key,
                    const std::string& value) {
    nlohmann::json* node = &doc;
    std::size_t start = 0;
    std::string path_so_far;
    while (true) {
        const std::size_t dot = dotted_key.find('.', start);
        const std::string part = dotted_key.substr(
            start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) bad_config("bad override key: " + dotted_key);
        path_so_far += (path_so_far.empty() ? "" : ".") + part;
        const auto it = node->find(part);
        if (it == node->end()) bad_config("unknown config key: " + path_so_far);
        node = &*it;
        if (dot == std::string::npos) break;
        start = dot + 1;
        if (!node->is_object())
            bad_config("config key is not a section: " + path_so_far);
    }
    if (node->is_object())
        bad_config("config key is a section, not a value: " + dotted_key);

    const nlohmann::json parsed =
        nlohmann::json::parse(value, nullptr, /*allow_exceptions=*/false);
    if (!parsed.is_discarded() && !parsed.is_object())
        *node = parsed;
    else
        *node = value;  // bare words like tanh or auto arrive as strings
}

RunConfig load_run_config(
    const std::optional<std::string>& config_path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
    nlohmann::json doc = config_to_json(RunConfig{});
    if (config_path) merge_onto(doc, read_json_file(*config_path), "");
    for (const auto& [key, value] : overrides) apply_override(doc, key, value);

    if (const char* env = std::getenv("BRANCHFINDER_SEED")) {
        char* end = nullptr;
        const unsigned long long seed = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            bad_config("BRANCHFINDER_SEED must be an unsigned integer");
        doc["mix"]["seed"] = seed;
        doc["network"]["seed"] = seed;
        doc["training"]["seed"] = seed;
    }
    return config_from_json(doc);
}

double resolved_noise_sigma(const RunConfig& c) {
    return c.noise_auto ? default_noise_sigma(c.problem) : c.mix.noise_sigma;
}

ExtractionConfig make_extraction_config(const RunConfig& c) {
    ExtractionConfig ex;
    ex.train_config = c.training;
    ex.network_config = c.network;
    ex.threshold_multiplier = c.extraction.threshold_multiplier;
    ex.stop_fraction = c.extraction.stop_fraction;
    ex.max_branches = c.extraction.max_branches;
    ex.min_branch_size = c.extraction.min_branch_size;
    ex.fixed_beta = c.extraction.fixed_beta;
    return ex;
}

}  // namespace branchfinder
