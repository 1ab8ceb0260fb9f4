// Command-line driver: dataset generation, network training, branch
// extraction, metric evaluation and loss comparison, all steered by one JSON
// run configuration. Every command is deterministic given its config, so
// reruns produce byte-identical artifacts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "branchfinder/config.hpp"
#include "branchfinder/dataset_io.hpp"
#include "branchfinder/error.hpp"
#include "branchfinder/extraction.hpp"
#include "branchfinder/metrics.hpp"
#include "branchfinder/network.hpp"
#include "branchfinder/serialize.hpp"
#include "branchfinder/synthdata.hpp"
#include "json.hpp"

namespace bf = branchfinder;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        bf::fail(bf::ErrorKind::io_error, "cannot open for writing: " + path.string());
    out << text;
    if (!out) bf::fail(bf::ErrorKind::io_error, "write failed: " + path.string());
}

// Evaluation grids matching the acceptance setup: 400 interior midpoints of
// (-3.8, 3.8) in 1D; an 80x80 midpoint lattice over [-1.5, 1.5]^2 with the
// near-coinciding axis band |u| <= 0.1 removed in 2D. Both are ordered, so
// the 1D grid doubles as the oscillation path.
std::vector<std::vector<double>> eval_grid(bf::Problem p) {
    std::vector<std::vector<double>> grid;
    if (p == bf::Problem::one_d) {
        const int n = 400;
        for (int i = 0; i < n; ++i)
            grid.push_back({-3.8 + (i + 0.5) * 7.6 / n});
        return grid;
    }
    const int n = 80;
    for (int i = 0; i < n; ++i) {
        const double x = -1.5 + (i + 0.5) * 3.0 / n;
        if (std::abs(x) <= 0.1) continue;
        for (int j = 0; j < n; ++j) {
            const double y = -1.5 + (j + 0.5) * 3.0 / n;
            if (std::abs(y) <= 0.1) continue;
            grid.push_back({x, y});
        }
    }
    return grid;
}

std::string region_label(bf::Problem p) {
    return p == bf::Problem::one_d ? "x in (-3.8, 3.8)" : "off-axis [-1.5, 1.5]^2";
}

bf::BranchFn branch_fn(bf::Problem p, int branch) {
    return [p, branch](const std::vector<double>& x) {
        return bf::branch_value(p, branch, x);
    };
}

// Branch 1 is the majority when it holds at least half the mixture.
int majority_branch(const bf::RunConfig& rc) {
    return rc.mix.fraction_branch1 >= 0.5 ? 1 : 2;
}

// Where the two branches (nearly) agree, labels are inherently ambiguous:
// |x| >= 4 in 1D, the |u| <= 0.1 axis band in 2D.
bool in_coinciding_region(bf::Problem p, const std::vector<double>& x) {
    if (p == bf::Problem::one_d) return std::abs(x[0]) >= 4.0;
    return std::min(std::abs(x[0]), std::abs(x[1])) <= 0.1;
}

void check_dims(const bf::Dataset& data, const bf::RunConfig& rc,
                const std::string& path) {
    if (data.input_dim != rc.network.input_dim)
        bf::fail(bf::ErrorKind::invalid_input,
                 path + " has " + std::to_string(data.input_dim) +
                     " input column(s) but problem " +
                     bf::problem_name(rc.problem) + " expects " +
                     std::to_string(rc.network.input_dim));
}

fs::path ensure_output_dir(const bf::RunConfig& rc) {
    const fs::path dir = rc.output_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);  // failures surface as write errors below
    return dir;
}

int cmd_gen(const bf::RunConfig& rc) {
    bf::MixSpec spec = rc.mix;
    spec.noise_sigma = bf::resolved_noise_sigma(rc);
    const bf::Dataset all = bf::generate(rc.problem, spec);
    const std::uint64_t split_seed = rc.mix.seed + 1;  // stream distinct from generation
    const auto [train_part, test_part] = bf::train_test_split(all, 0.8, split_seed);

    const fs::path dir = ensure_output_dir(rc);
    bf::write_csv((dir / "train.csv").string(), train_part);
    bf::write_csv((dir / "test.csv").string(), test_part);

    nlohmann::json meta;
    meta["format_version"] = 1;
    meta["config"] = bf::config_to_json(rc);
    meta["resolved_noise_sigma"] = spec.noise_sigma;
    meta["split"] = {{"train_fraction", 0.8}, {"seed", split_seed}};
    meta["rows"] = {{"train", train_part.n()}, {"test", test_part.n()}};
    bf::write_json_file(meta, dir / "gen_meta.json");

    std::cout << "train_rows=" << train_part.n() << " test_rows=" << test_part.n()
              << "\n";
    return 0;
}

int cmd_train(const bf::RunConfig& rc, const std::string& data_path,
              const std::string& test_path) {
    const bf::Dataset train_set = bf::read_csv(data_path);
    const bf::Dataset test_set = bf::read_csv(test_path);
    check_dims(train_set, rc, data_path);
    check_dims(test_set, rc, test_path);

    bf::NetworkModel model = bf::init_model(rc.network);
    const bf::TrainReport report = bf::train(model, train_set, rc.training);
    const double test_loss = bf::scaled_batch_loss(model, test_set, rc.training.loss);

    const fs::path dir = ensure_output_dir(rc);
    bf::save_model(model, dir / "model.json");
    nlohmann::json rep;
    rep["format_version"] = 1;
    rep["loss"] = {
        {"variant", bf::loss_variant_name(rc.training.loss.variant)},
        {"delta", rc.training.loss.delta},
        {"beta", rc.training.loss.beta},
    };
    rep["epochs_run"] = report.epochs_run;
    rep["final_train_loss"] = report.final_train_loss;
    rep["final_test_loss"] = test_loss;
    rep["epoch_loss"] = report.epoch_loss;
    bf::write_json_file(rep, dir / "train_report.json");

    std::cout << "final_train_loss=" << fmt17(report.final_train_loss)
              << " final_test_loss=" << fmt17(test_loss) << "\n";
    return 0;
}

int cmd_extract(const bf::RunConfig& rc, const std::string& data_path) {
    const bf::Dataset data = bf::read_csv(data_path);
    check_dims(data, rc, data_path);
    const bf::ExtractionResult res =
        bf::extract_branches(data, bf::make_extraction_config(rc));

    const fs::path dir = ensure_output_dir(rc);
    bf::save_extraction(res, dir / "extraction.json");
    bf::write_assignments_csv(res, dir / "assignments.csv");
    for (const bf::BranchModel& b : res.branches)
        bf::save_model(b.model,
                       dir / ("branch_" + std::to_string(b.index) + "_model.json"));

    int assigned = 0, ambiguous = 0;
    for (const bf::SampleAssignment& a : res.assignment) {
        assigned += a.primary_branch.has_value();
        ambiguous += a.ambiguous;
    }
    std::cout << "branches=" << res.branches.size() << " assigned=" << assigned
              << " ambiguous=" << ambiguous
              << " unassigned=" << (static_cast<int>(res.assignment.size()) - assigned)
              << "\n";
    return 0;
}

int cmd_eval(const bf::RunConfig& rc, const std::string& data_path,
             const std::string& extraction_path) {
    const bf::Dataset data = bf::read_csv(data_path);
    check_dims(data, rc, data_path);
    const bf::ExtractionResult res = bf::load_extraction(extraction_path);
    if (static_cast<int>(res.assignment.size()) != data.n())
        bf::fail(bf::ErrorKind::invalid_input,
                 extraction_path + " covers " +
                     std::to_string(res.assignment.size()) + " samples but " +
                     data_path + " has " + std::to_string(data.n()));

    const int maj = majority_branch(rc);
    const auto grid = eval_grid(rc.problem);
    const bf::BranchFn fmaj = branch_fn(rc.problem, maj);
    const bf::BranchFn fmin = branch_fn(rc.problem, maj == 1 ? 2 : 1);

    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["majority_branch"] = maj;

    std::optional<double> adher, betw, osc;
    if (!res.branches.empty()) {
        const bf::NetworkModel& first = res.branches.front().model;
        const bf::AdherenceReport ar =
            bf::adherence(first, fmaj, fmin, grid, region_label(rc.problem));
        adher = ar.fraction_closer_to_majority;
        doc["adherence"] = {
            {"fraction_closer_to_majority", ar.fraction_closer_to_majority},
            {"mean_abs_error_to_majority", ar.mean_abs_error_to_majority},
            {"mean_abs_error_to_minority", ar.mean_abs_error_to_minority},
            {"region", ar.region},
        };
        betw = bf::betweenness(first, branch_fn(rc.problem, 1),
                               branch_fn(rc.problem, 2), grid);
        doc["betweenness"] = *betw;
        if (rc.problem == bf::Problem::one_d) {
            osc = bf::oscillation_index(first, branch_fn(rc.problem, 1),
                                        branch_fn(rc.problem, 2), grid);
            doc["oscillation_index"] = *osc;
        } else {
            doc["oscillation_index"] = nullptr;  // no natural 1D path to walk
        }
    } else {
        doc["adherence"] = nullptr;
        doc["betweenness"] = nullptr;
        doc["oscillation_index"] = nullptr;
    }

    std::vector<std::optional<int>> truth;
    std::vector<bool> mask;
    truth.reserve(data.samples.size());
    mask.reserve(data.samples.size());
    for (const bf::Sample& s : data.samples) {
        truth.push_back(s.true_branch);
        mask.push_back(!in_coinciding_region(rc.problem, s.x));
    }
    const bf::ConfusionReport cr = bf::branch_accuracy(res, truth, mask);
    doc["branch_accuracy"] = {
        {"accuracy", cr.accuracy},
        {"true_labels", cr.true_labels},
        {"confusion", cr.confusion},
        {"n_ambiguous", cr.n_ambiguous},
        {"n_unassigned", cr.n_unassigned},
    };

    int coinciding = 0, coinciding_ambiguous = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) continue;
        ++coinciding;
        coinciding_ambiguous += res.assignment[i].ambiguous;
    }
    std::optional<double> amb_frac;
    if (coinciding > 0)
        amb_frac = static_cast<double>(coinciding_ambiguous) / coinciding;
    doc["n_coinciding"] = coinciding;
    doc["coinciding_ambiguous_fraction"] =
        amb_frac ? nlohmann::json(*amb_frac) : nlohmann::json(nullptr);

    const fs::path dir = ensure_output_dir(rc);
    bf::write_json_file(doc, dir / "metrics.json");

    const auto cell = [](const std::optional<double>& v) {
        return v ? fmt17(*v) : std::string("NA");
    };
    std::string csv =
        "adherence_fraction,betweenness,oscillation_index,branch_accuracy,"
        "n_ambiguous,n_unassigned,coinciding_ambiguous_fraction\n";
    csv += cell(adher) + ',' + cell(betw) + ',' + cell(osc) + ',' +
           fmt17(cr.accuracy) + ',' + std::to_string(cr.n_ambiguous) + ',' +
           std::to_string(cr.n_unassigned) + ',' + cell(amb_frac) + '\n';
    write_text_file(dir / "metrics.csv", csv);

    std::cout << "branch_accuracy=" << fmt17(cr.accuracy) << "\n";
    return 0;
}

int cmd_compare_losses(const bf::RunConfig& rc) {
    bf::MixSpec spec = rc.mix;
    spec.noise_sigma = bf::resolved_noise_sigma(rc);
    const bf::Dataset data = bf::generate(rc.problem, spec);

    const auto grid = eval_grid(rc.problem);
    const int maj = majority_branch(rc);
    const bf::BranchFn fmaj = branch_fn(rc.problem, maj);
    const bf::BranchFn fmin = branch_fn(rc.problem, maj == 1 ? 2 : 1);
    const bf::BranchFn phi1 = branch_fn(rc.problem, 1);
    const bf::BranchFn phi2 = branch_fn(rc.problem, 2);

    const fs::path dir = ensure_output_dir(rc);
    std::string table = "loss,adherence_fraction,betweenness,oscillation_index\n";
    for (const bf::LossVariant variant :
         {bf::LossVariant::mse, bf::LossVariant::mae, bf::LossVariant::logcosh}) {
        // fit_dominant_branch sizes beta from the scaled target spread, so all
        // three losses see residuals on the same scale.
        bf::ExtractionConfig ex = bf::make_extraction_config(rc);
        ex.train_config.loss.variant = variant;
        const bf::NetworkModel model = bf::fit_dominant_branch(data, ex);

        const bf::AdherenceReport ar =
            bf::adherence(model, fmaj, fmin, grid, region_label(rc.problem));
        const double bw = bf::betweenness(model, phi1, phi2, grid);
        std::optional<double> osc;
        if (rc.problem == bf::Problem::one_d)
            osc = bf::oscillation_index(model, phi1, phi2, grid);

        const char* name = bf::loss_variant_name(variant);
        table += std::string(name) + ',' + fmt17(ar.fraction_closer_to_majority) +
                 ',' + fmt17(bw) + ',' + (osc ? fmt17(*osc) : std::string("NA")) +
                 '\n';
        std::cout << "loss=" << name
                  << " adherence_fraction=" << fmt17(ar.fraction_closer_to_majority)
                  << " betweenness=" << fmt17(bw) << " oscillation_index="
                  << (osc ? fmt17(*osc) : std::string("NA")) << "\n";

        if (rc.emit_plot_data) {
            const std::vector<double> pred = bf::forward_many(model, grid);
            std::string curve;
            for (int d = 1; d <= rc.network.input_dim; ++d)
                curve += "x" + std::to_string(d) + ",";
            curve += "y_pred,phi1,phi2\n";
            for (std::size_t i = 0; i < grid.size(); ++i) {
                for (const double c : grid[i]) curve += fmt17(c) + ",";
                curve += fmt17(pred[i]) + ',' + fmt17(phi1(grid[i])) + ',' +
                         fmt17(phi2(grid[i])) + '\n';
            }
            write_text_file(dir / ("curve_" + std::string(name) + ".csv"), curve);
        }
    }
    write_text_file(dir / "comparison.csv", table);
    return 0;
}

int cmd_print_config(const bf::RunConfig& rc) {
    std::cout << bf::config_to_json(rc).dump(2) << "\n";
    return 0;
}

std::vector<std::pair<std::string, std::string>> parse_override_tokens(
    const std::vector<std::string>& rest) {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        const std::string& tok = rest[i];
        if (tok.rfind("--", 0) != 0)
            bf::fail(bf::ErrorKind::invalid_input, "unexpected argument: " + tok);
        std::string key = tok.substr(2);
        std::string value;
        const std::size_t eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else {
            if (++i >= rest.size())
                bf::fail(bf::ErrorKind::invalid_input, "missing value for --" + key);
            value = rest[i];
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"two-branch regression workbench: generate mixtures, train "
                 "networks, peel branches, score the results"};
    app.require_subcommand(1);

    std::string config_path;
    std::string data_path;
    std::string test_data_path;
    std::string extraction_path;
    std::string loss_flag;
    std::string huber_delta_flag;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration file");
        sub->allow_extras();  // --dotted.path value overrides
        return sub;
    };

    CLI::App* gen =
        add_common(app.add_subcommand("gen", "generate a mixed dataset and its 80/20 split"));
    CLI::App* train =
        add_common(app.add_subcommand("train", "fit one network to a dataset"));
    train->add_option("--data", data_path, "training CSV (default <output_dir>/train.csv)");
    train->add_option("--test-data", test_data_path,
                      "held-out CSV (default <output_dir>/test.csv)");
    train->add_option("--loss", loss_flag, "loss variant: mse|mae|huber|logcosh");
    train->add_option("--huber-delta", huber_delta_flag, "huber transition point");
    CLI::App* extract = add_common(
        app.add_subcommand("extract", "iteratively fit and peel branches"));
    extract->add_option("--data", data_path, "input CSV (default <output_dir>/train.csv)");
    CLI::App* eval = add_common(
        app.add_subcommand("eval", "score an extraction against ground truth"));
    eval->add_option("--data", data_path,
                     "dataset the extraction ran on (default <output_dir>/train.csv)");
    eval->add_option("--extraction", extraction_path,
                     "extraction document (default <output_dir>/extraction.json)");
    CLI::App* cmp = add_common(app.add_subcommand(
        "compare-losses", "train mse, mae and logcosh on one seeded mixture"));
    CLI::App* pc = add_common(
        app.add_subcommand("print-config", "echo the fully resolved configuration"));
    (void)pc;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        bf::fail(bf::ErrorKind::invalid_input, e.what());
    }

    CLI::App* sub = app.get_subcommands().front();
    auto overrides = parse_override_tokens(sub->remaining());
    if (!loss_flag.empty()) overrides.emplace_back("training.loss.variant", loss_flag);
    if (!huber_delta_flag.empty())
        overrides.emplace_back("training.loss.delta", huber_delta_flag);

    const std::optional<std::string> cfg =
        config_path.empty() ? std::nullopt : std::optional(config_path);
    const bf::RunConfig rc = bf::load_run_config(cfg, overrides);
    const fs::path dir = rc.output_dir;
    const auto or_default = [](const std::string& given, const fs::path& fallback) {
        return given.empty() ? fallback.string() : given;
    };

    if (sub == gen) return cmd_gen(rc);
    if (sub == train)
        return cmd_train(rc, or_default(data_path, dir / "train.csv"),
                         or_default(test_data_path, dir / "test.csv"));
    if (sub == extract)
        return cmd_extract(rc, or_default(data_path, dir / "train.csv"));
    if (sub == eval)
        return cmd_eval(rc, or_default(data_path, dir / "train.csv"),
                        or_default(extraction_path, dir / "extraction.json"));
    if (sub == cmp) return cmd_compare_losses(rc);
    return cmd_print_config(rc);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const bf::Error& e) {
        std::cerr << "error_kind=" << bf::error_kind_name(e.kind()) << ": "
                  << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error_kind=internal: " << e.what() << "\n";
        return 1;
    }
}
