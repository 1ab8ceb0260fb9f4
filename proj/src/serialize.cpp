#include "branchfinder/serialize.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "branchfinder/error.hpp"

namespace branchfinder {
namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void bad_document(const std::string& what) {
    fail(ErrorKind::parse_error, what);
}

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) bad_document(std::string("missing field: ") + key);
    return *it;
}

void check_version(const nlohmann::json& j) {
    const auto& v = field(j, "format_version");
    if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
        bad_document("unsupported format_version, expected " +
                     std::to_string(kFormatVersion));
}

std::vector<double> finite_doubles(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) bad_document(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) bad_document(std::string(what) + " holds a non-number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) bad_document(std::string(what) + " holds a non-finite value");
        out.push_back(d);
    }
    return out;
}

}  // namespace

nlohmann::json model_to_json(const NetworkModel& model) {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["config"] = {
        {"input_dim", model.config.input_dim},
        {"hidden_layers", model.config.hidden_layers},
        {"activation", activation_name(model.config.activation)},
        {"seed", model.config.seed},
    };
    nlohmann::json weights = nlohmann::json::array();
    for (const Matrix& W : model.weights) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < W.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t c = 0; c < W.cols; ++c) row.push_back(W.at(i, c));
            rows.push_back(std::move(row));
        }
        weights.push_back(std::move(rows));
    }
    j["weights"] = std::move(weights);
    j["biases"] = model.biases;
    j["standardizer"] = {
        {"mean", model.standardizer.mean},
        {"stddev", model.standardizer.stddev},
    };
    j["target_scaler"] = {
        {"shift", model.target_scaler.shift},
        {"scale", model.target_scaler.scale},
    };
    return j;
}

NetworkModel model_from_json(const nlohmann::json& j) {
    check_version(j);
    const nlohmann::json& cfg = field(j, "config");

    NetworkConfig config;
    config.input_dim = field(cfg, "input_dim").get<int>();
    config.hidden_layers = field(cfg, "hidden_layers").get<std::vector<int>>();
    config.activation =
        activation_from_name(field(cfg, "activation").get<std::string>());
    config.seed = field(cfg, "seed").get<std::uint64_t>();

    NetworkModel model;
    model.config = config;

    std::vector<int> widths;
    widths.push_back(config.input_dim);
    for (int h : config.hidden_layers) widths.push_back(h);
    widths.push_back(1);

    const nlohmann::json& weights = field(j, "weights");
    const nlohmann::json& biases = field(j, "biases");
    if (!weights.is_array() || weights.size() + 1 != widths.size())
        bad_document("weights do not chain through the configured layers");
    if (!biases.is_array() || biases.size() != weights.size())
        bad_document("biases do not match the layer count");

    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto rows = static_cast<std::size_t>(widths[l + 1]);
        const auto cols = static_cast<std::size_t>(widths[l]);
        const nlohmann::json& wl = weights[l];
        if (!wl.is_array() || wl.size() != rows)
            bad_document("weight matrix " + std::to_string(l) + " has wrong row count");
        Matrix W(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            const std::vector<double> row = finite_doubles(wl[i], "weight row");
            if (row.size() != cols)
                bad_document("weight matrix " + std::to_string(l) +
                             " has wrong column count");
            for (std::size_t c = 0; c < cols; ++c) W.at(i, c) = row[c];
        }
        model.weights.push_back(std::move(W));
        std::vector<double> b = finite_doubles(biases[l], "bias vector");
        if (b.size() != rows)
            bad_document("bias vector " + std::to_string(l) + " has wrong length");
        model.biases.push_back(std::move(b));
    }

    const nlohmann::json& st = field(j, "standardizer");
    model.standardizer.mean = finite_doubles(field(st, "mean"), "standardizer mean");
    model.standardizer.stddev =
        finite_doubles(field(st, "stddev"), "standardizer stddev");
    if (model.standardizer.mean.size() != static_cast<std::size_t>(config.input_dim) ||
        model.standardizer.stddev.size() != static_cast<std::size_t>(config.input_dim))
        bad_document("standardizer length does not match input_dim");
    for (double sd : model.standardizer.stddev)
        if (!(sd > 0.0)) bad_document("standardizer stddev must be positive");

    const nlohmann::json& sc = field(j, "target_scaler");
    model.target_scaler.shift = field(sc, "shift").get<double>();
    model.target_scaler.scale = field(sc, "scale").get<double>();
    if (!std::isfinite(model.target_scaler.shift) ||
        !(model.target_scaler.scale > 0.0) ||
        !std::isfinite(model.target_scaler.scale))
        bad_document("target_scaler must be finite with positive scale");
    return model;
}

nlohmann::json extraction_to_json(const ExtractionResult& result) {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    nlohmann::json branches = nlohmann::json::array();
    for (const BranchModel& b : result.branches) {
        branches.push_back({
            {"index", b.index},
            {"tau", b.tau},
            {"member_indices", b.member_indices},
            {"model", model_to_json(b.model)},
        });
    }
    j["branches"] = std::move(branches);
    nlohmann::json assignments = nlohmann::json::array();
    for (std::size_t i = 0; i < result.assignment.size(); ++i) {
        const SampleAssignment& a = result.assignment[i];
        nlohmann::json rec = {
            {"index", i},
            {"ambiguous", a.ambiguous},
            {"residuals", a.residuals},
        };
        if (a.primary_branch)
            rec["primary_branch"] = *a.primary_branch;
        else
            rec["primary_branch"] = nullptr;
        assignments.push_back(std::move(rec));
    }
    j["assignments"] = std::move(assignments);
    j["leftover_indices"] = result.leftover_indices;
    return j;
}

ExtractionResult extraction_from_json(const nlohmann::json& j) {
    check_version(j);
    ExtractionResult result;
    for (const auto& bj : field(j, "branches")) {
        BranchModel b;
        b.index = field(bj, "index").get<int>();
        b.tau = field(bj, "tau").get<double>();
        if (!(b.tau > 0.0)) bad_document("branch tau must be positive");
        b.member_indices = field(bj, "member_indices").get<std::vector<int>>();
        b.model = model_from_json(field(bj, "model"));
        result.branches.push_back(std::move(b));
    }
    for (const auto& aj : field(j, "assignments")) {
        SampleAssignment a;
        const nlohmann::json& pb = field(aj, "primary_branch");
        if (!pb.is_null()) {
            a.primary_branch = pb.get<int>();
            if (*a.primary_branch < 1 ||
                *a.primary_branch > static_cast<int>(result.branches.size()))
                bad_document("primary_branch out of range");
        }
        a.ambiguous = field(aj, "ambiguous").get<bool>();
        a.residuals = finite_doubles(field(aj, "residuals"), "residuals");
        result.assignment.push_back(std::move(a));
    }
    result.leftover_indices = field(j, "leftover_indices").get<std::vector<int>>();
    return result;
}

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io_error, "cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) fail(ErrorKind::io_error, "write failed: " + path.string());
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io_error, "cannot open for reading: " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::parse_error, path.string() + ": " + e.what());
    }
}

void save_model(const NetworkModel& model, const std::filesystem::path& path) {
    write_json_file(model_to_json(model), path);
}

NetworkModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_json_file(path));
}

void save_extraction(const ExtractionResult& result,
                     const std::filesystem::path& path) {
    write_json_file(extraction_to_json(result), path);
}

ExtractionResult load_extraction(const std::filesystem::path& path) {
    return extraction_from_json(read_json_file(path));
}

void write_assignments_csv(const ExtractionResult& result,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io_error, "cannot open for writing: " + path.string());
    out << "index,primary_branch,ambiguous\n";
    for (std::size_t i = 0; i < result.assignment.size(); ++i) {
        const SampleAssignment& a = result.assignment[i];
        out << i << ',';
        if (a.primary_branch)
            out << *a.primary_branch;
        else
            out << "NA";
        out << ',' << (a.ambiguous ? 1 : 0) << '\n';
    }
    if (!out) fail(ErrorKind::io_error, "write failed: " + path.string());
}

}  // namespace branchfinder
