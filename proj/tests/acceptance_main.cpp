// Acceptance gate: one line per criterion, [PASS] or [FAIL], with the
// measured quantities and the pinned bars printed next to each other. The
// process exits nonzero when any executed criterion fails.
//
// Usage: acceptance [--cli <path>] [--only <id>]
// The --cli path is required by criterion 9 (it reruns every subcommand and
// hashes the artifacts); all other criteria use the library directly.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "branchfinder/config.hpp"
#include "branchfinder/dataset_io.hpp"
#include "branchfinder/error.hpp"
#include "branchfinder/extraction.hpp"
#include "branchfinder/loss.hpp"
#include "branchfinder/metrics.hpp"
#include "branchfinder/network.hpp"
#include "branchfinder/rng.hpp"
#include "branchfinder/serialize.hpp"
#include "branchfinder/synthdata.hpp"
#include "json.hpp"

namespace bf = branchfinder;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;  // path to the command-line binary, for criterion 9

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Shared fixtures and measurement helpers.

// The 1D acceptance fixture: n=5000, default noise, seeded.
bf::Dataset one_d_fixture(double fraction1, std::uint64_t seed) {
    bf::MixSpec spec;
    spec.n_samples = 5000;
    spec.fraction_branch1 = fraction1;
    spec.noise_sigma = bf::default_noise_sigma(bf::Problem::one_d);
    spec.seed = seed;
    return bf::generate(bf::Problem::one_d, spec);
}

bf::Dataset two_d_fixture(double fraction1, std::uint64_t seed) {
    bf::MixSpec spec;
    spec.n_samples = 8000;
    spec.fraction_branch1 = fraction1;
    spec.noise_sigma = bf::default_noise_sigma(bf::Problem::two_d);
    spec.seed = seed;
    return bf::generate(bf::Problem::two_d, spec);
}

// Training settings every model-level criterion shares.
// Three hidden layers resolve the steep branch wall near the edge of the
// evaluation grid; batch 512 keeps the batch-gradient jitter small enough
// that the fit stays on the majority branch where the branch gap shrinks
// below the noise level.
const std::vector<int> kHidden = {64, 64, 64};
constexpr int kEpochs = 2500;
constexpr int kBatch = 512;

bf::NetworkModel fit_branch(const bf::Dataset& data, bf::LossVariant variant,
                            std::uint64_t net_seed, std::uint64_t train_seed,
                            int epochs = kEpochs, int batch = kBatch) {
    bf::ExtractionConfig cfg;
    cfg.network_config.hidden_layers = kHidden;
    cfg.network_config.seed = net_seed;
    cfg.train_config.loss.variant = variant;
    cfg.train_config.epochs = epochs;
    cfg.train_config.batch_size = batch;
    cfg.train_config.learning_rate = 1e-3;
    cfg.train_config.seed = train_seed;
    return bf::fit_dominant_branch(data, cfg);
}

std::vector<std::vector<double>> grid_1d() {
    std::vector<std::vector<double>> grid;
    for (int i = 0; i < 400; ++i) grid.push_back({-3.8 + (i + 0.5) * 7.6 / 400});
    return grid;
}

std::vector<std::vector<double>> grid_2d() {
    std::vector<std::vector<double>> grid;
    for (int i = 0; i < 80; ++i) {
        const double x = -1.5 + (i + 0.5) * 3.0 / 80;
        if (std::abs(x) <= 0.1) continue;
        for (int j = 0; j < 80; ++j) {
            const double y = -1.5 + (j + 0.5) * 3.0 / 80;
            if (std::abs(y) <= 0.1) continue;
            grid.push_back({x, y});
        }
    }
    return grid;
}

bf::BranchFn branch_fn(bf::Problem p, int branch) {
    return [p, branch](const std::vector<double>& x) {
        return bf::branch_value(p, branch, x);
    };
}

double adherence_to(const bf::NetworkModel& model, bf::Problem p, int majority,
                    const std::vector<std::vector<double>>& grid) {
    return bf::adherence(model, branch_fn(p, majority),
                         branch_fn(p, majority == 1 ? 2 : 1), grid, "acceptance")
        .fraction_closer_to_majority;
}

// ---------------------------------------------------------------------------
// Criterion 1: loss and gradient unit suite.

bool criterion_loss_suite(std::string& detail) {
    const double ln2 = std::log(2.0);
    std::vector<bf::LossKind> kinds;
    for (const bf::LossVariant v : {bf::LossVariant::mse, bf::LossVariant::mae,
                                    bf::LossVariant::huber, bf::LossVariant::logcosh})
        for (const double beta : {0.5, 1.0, 3.0})
            kinds.push_back({v, 1.0, beta});
    kinds.push_back({bf::LossVariant::huber, 0.25, 1.0});
    kinds.push_back({bf::LossVariant::huber, 4.0, 2.0});

    bool ok = true;
    std::string why;

    // Symmetry and monotonicity in |r|.
    for (const bf::LossKind& k : kinds) {
        double prev = 0.0;
        for (int i = 0; i <= 300; ++i) {
            const double r = i * 0.1;
            const double lp = bf::loss_value(k, r);
            const double lm = bf::loss_value(k, -r);
            if (std::abs(lp - lm) > 1e-12 * std::max(1.0, std::abs(lp))) {
                ok = false;
                why = "symmetry broken at r=" + fmt("%.2f", r);
            }
            if (lp + 1e-15 < prev) {
                ok = false;
                why = "not monotone at r=" + fmt("%.2f", r);
            }
            prev = lp;
        }
    }

    // Logcosh bounds and the linear asymptote.
    const bf::LossKind lc{bf::LossVariant::logcosh, 1.0, 1.0};
    for (int i = 0; i <= 600; ++i) {
        const double s = -30.0 + i * 0.1;
        const double v = bf::loss_value(lc, s);
        if (v < 0.0 || v > 0.5 * s * s + 1e-12 ||
            v < std::abs(s) - ln2 - 1e-12) {
            ok = false;
            why = "logcosh bound violated at s=" + fmt("%.2f", s);
        }
        if (std::abs(s) >= 2.0 &&
            std::abs(v - (std::abs(s) - ln2)) > std::exp(-2.0 * std::abs(s)) + 1e-12) {
            ok = false;
            why = "logcosh asymptote violated at s=" + fmt("%.2f", s);
        }
    }

    // Huber joins its two pieces with matching value and slope.
    for (const double delta : {0.25, 1.0, 4.0}) {
        const bf::LossKind hu{bf::LossVariant::huber, delta, 1.0};
        const double eps = 1e-7;
        const double dv =
            std::abs(bf::loss_value(hu, delta + eps) - bf::loss_value(hu, delta - eps));
        const double dg = std::abs(bf::loss_gradient(hu, delta + eps) -
                                   bf::loss_gradient(hu, delta - eps));
        if (dv > 3.0 * delta * eps || dg > 1e-5) {
            ok = false;
            why = "huber not continuous at delta=" + fmt("%.2f", delta);
        }
    }

    // Loss-level finite differences, away from the kinks.
    bf::Rng rng(0xACCE5501);
    double worst_loss_fd = 0.0;
    for (int draw = 0; draw < 400; ++draw) {
        const bf::LossKind& k = kinds[draw % kinds.size()];
        double r = rng.uniform(-20.0, 20.0);
        if (k.variant == bf::LossVariant::mae && std::abs(r) < 1e-2) r += 0.5;
        if (k.variant == bf::LossVariant::huber &&
            std::abs(std::abs(k.beta * r) - k.delta) < 1e-2)
            r += 0.5;
        const double h = 1e-6 * std::max(1.0, std::abs(r));
        const double fd =
            (bf::loss_value(k, r + h) - bf::loss_value(k, r - h)) / (2.0 * h);
        const double g = bf::loss_gradient(k, r);
        const double rel =
            std::abs(fd - g) / std::max({std::abs(fd), std::abs(g), 1e-9});
        worst_loss_fd = std::max(worst_loss_fd, rel);
    }
    if (worst_loss_fd > 1e-6) {
        ok = false;
        why = "loss FD rel err " + fmt("%.2e", worst_loss_fd);
    }

    // Network-level finite differences on small random models.
    double worst_net_fd = 0.0;
    const bf::Activation acts[] = {bf::Activation::tanh, bf::Activation::sigmoid,
                                   bf::Activation::relu};
    int draws_done = 0;
    for (int attempt = 0; attempt < 400 && draws_done < 100; ++attempt) {
        bf::NetworkConfig nc;
        nc.input_dim = 1 + static_cast<int>(rng.below(3));
        const int layers = 1 + static_cast<int>(rng.below(3));
        nc.hidden_layers.clear();
        for (int l = 0; l < layers; ++l)
            nc.hidden_layers.push_back(2 + static_cast<int>(rng.below(9)));
        nc.activation = acts[draws_done % 3];
        nc.seed = 1000 + static_cast<std::uint64_t>(attempt);
        bf::NetworkModel model = bf::init_model(nc);
        for (double& m : model.standardizer.mean) m = rng.uniform(-1.0, 1.0);
        for (double& s : model.standardizer.stddev) s = rng.uniform(0.5, 2.0);
        model.target_scaler.shift = rng.uniform(-1.0, 1.0);
        model.target_scaler.scale = rng.uniform(0.5, 3.0);

        bf::LossKind k;
        k.variant = static_cast<bf::LossVariant>(rng.below(4));
        k.delta = rng.uniform(0.3, 2.0);
        k.beta = rng.uniform(0.5, 3.0);

        bf::Dataset batch;
        batch.input_dim = nc.input_dim;
        const int B = 1 + static_cast<int>(rng.below(8));
        for (int b = 0; b < B; ++b) {
            bf::Sample s;
            for (int d = 0; d < nc.input_dim; ++d) s.x.push_back(rng.uniform(-2.0, 2.0));
            s.y = rng.uniform(-2.0, 2.0);
            batch.samples.push_back(std::move(s));
        }
        // Resample when a sample sits on a kink of the piecewise losses; the
        // relu preactivation kink is handled the same way below.
        bool near_kink = false;
        for (const bf::Sample& s : batch.samples) {
            const double resid = bf::forward(model, s.x) -
                                 s.y;  // raw-space proxy; scaled residual has the
                                       // same zero set up to the scale factor
            const double sr = resid / model.target_scaler.scale;
            if (k.variant == bf::LossVariant::mae && std::abs(sr) < 1e-3)
                near_kink = true;
            if (k.variant == bf::LossVariant::huber &&
                std::abs(std::abs(k.beta * sr) - k.delta) < 1e-3)
                near_kink = true;
        }
        if (near_kink) continue;

        const bf::Gradients grads = bf::parameter_gradients(model, batch, k);
        const double h = 1e-5;
        bool relu_kink = false;
        double draw_worst = 0.0;
        for (std::size_t l = 0; l < model.weights.size() && !relu_kink; ++l) {
            for (std::size_t idx = 0; idx < model.weights[l].size(); ++idx) {
                double& w = model.weights[l].v[idx];
                const double keep = w;
                w = keep + h;
                const double up = bf::scaled_batch_loss(model, batch, k);
                w = keep - h;
                const double dn = bf::scaled_batch_loss(model, batch, k);
                w = keep;
                const double fd = (up - dn) / (2.0 * h);
                const double g = grads.weights[l].v[idx];
                const double rel =
                    std::abs(fd - g) / std::max({std::abs(fd), std::abs(g), 1e-7});
                if (nc.activation == bf::Activation::relu && rel > 1e-4) {
                    relu_kink = true;  // crossed a relu corner; retry the draw
                    break;
                }
                draw_worst = std::max(draw_worst, rel);
            }
        }
        if (relu_kink) continue;
        worst_net_fd = std::max(worst_net_fd, draw_worst);
        ++draws_done;
    }
    if (draws_done < 100) {
        ok = false;
        why = "only " + std::to_string(draws_done) + " FD draws accepted";
    }
    if (worst_net_fd > 1e-4) {
        ok = false;
        why = "network FD rel err " + fmt("%.2e", worst_net_fd);
    }

    detail = "loss FD max rel " + fmt("%.1e", worst_loss_fd) + " (bar 1e-6), network FD max rel " +
             fmt("%.1e", worst_net_fd) + " (bar 1e-4) over " +
             std::to_string(draws_done) + " draws";
    if (!ok) detail += "; " + why;
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 2: constant-model minimizer oracle on the 60/40 target mix.

double mix_objective(const bf::LossKind& k, double c) {
    return 0.6 * bf::loss_value(k, c - 10.0) + 0.4 * bf::loss_value(k, c);
}

double ternary_minimize(const bf::LossKind& k, double lo, double hi) {
    for (int it = 0; it < 300; ++it) {
        const double a = lo + (hi - lo) / 3.0;
        const double b = hi - (hi - lo) / 3.0;
        if (mix_objective(k, a) < mix_objective(k, b))
            hi = b;
        else
            lo = a;
    }
    return 0.5 * (lo + hi);
}

bool criterion_minimizer_oracle(std::string& detail) {
    const double c_mse = ternary_minimize({bf::LossVariant::mse, 1.0, 1.0}, -5.0, 15.0);
    const double c_mae = ternary_minimize({bf::LossVariant::mae, 1.0, 1.0}, -5.0, 15.0);
    const double c_lc =
        ternary_minimize({bf::LossVariant::logcosh, 1.0, 1.0}, -5.0, 15.0);

    // Independent oracle for the logcosh root: bisect the stationarity
    // condition 0.6 tanh(c-10) + 0.4 tanh(c) = 0 without the library.
    double lo = 0.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = 0.6 * std::tanh(mid - 10.0) + 0.4 * std::tanh(mid);
        (g < 0.0 ? lo : hi) = mid;
    }
    const double c_root = 0.5 * (lo + hi);

    const bool ok = std::abs(c_mse - 6.0) <= 1e-4 &&
                    std::abs(c_mae - 10.0) <= 1e-3 &&
                    std::abs(c_lc - 9.195) <= 0.01 &&
                    std::abs(c_root - c_lc) <= 1e-6;
    detail = "mse " + fmt("%.6f", c_mse) + " (want 6 +- 1e-4), mae " +
             fmt("%.6f", c_mae) + " (want 10 +- 1e-3), logcosh " +
             fmt("%.6f", c_lc) + " vs bisection root " + fmt("%.6f", c_root) +
             " (want 9.195 +- 0.01)";
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: 1D dominant-branch adherence, four mixtures.

bool criterion_dominant_1d(std::string& detail) {
    const auto grid = grid_1d();
    struct Run {
        double fraction1;
        int majority;
    };
    const Run runs[] = {{0.6, 1}, {0.4, 2}, {0.75, 1}, {0.25, 2}};
    bool ok = true;
    detail.clear();
    for (std::size_t i = 0; i < 4; ++i) {
        const auto t0 = Clock::now();
        const bf::Dataset data = one_d_fixture(runs[i].fraction1, 101 + i);
        const bf::NetworkModel model =
            fit_branch(data, bf::LossVariant::logcosh, 1 + i, 2 + i);
        const double adh = adherence_to(model, bf::Problem::one_d, runs[i].majority, grid);
        const double secs = seconds_since(t0);
        ok = ok && adh >= 0.90 && secs < 180.0;
        if (!detail.empty()) detail += ", ";
        detail += "phi" + std::to_string(runs[i].majority) + "@" +
                  fmt("%.2f", std::max(runs[i].fraction1, 1.0 - runs[i].fraction1)) +
                  " adh " + fmt("%.3f", adh) + " in " + fmt("%.0f", secs) + "s";
    }
    detail += " (bar 0.90, 180s per run)";
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: MSE sits between the branches on the same fixture.

bool criterion_mse_between(std::string& detail) {
    const auto t0 = Clock::now();
    const bf::Dataset data = one_d_fixture(0.6, 101);
    const bf::NetworkModel model = fit_branch(data, bf::LossVariant::mse, 1, 2);
    const auto grid = grid_1d();
    const double bw = bf::betweenness(model, branch_fn(bf::Problem::one_d, 1),
                                      branch_fn(bf::Problem::one_d, 2), grid);
    const double adh = adherence_to(model, bf::Problem::one_d, 1, grid);
    const double secs = seconds_since(t0);
    const bool ok = bw >= 0.80 && adh <= 0.5 && secs < 180.0;
    detail = "betweenness " + fmt("%.3f", bw) + " (bar >= 0.80), adherence " +
             fmt("%.3f", adh) + " (bar <= 0.5), " + fmt("%.0f", secs) + "s";
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: MAE oscillates more than logcosh, majority vote over seeds.

bool criterion_mae_oscillation(std::string& detail) {
    const auto t0 = Clock::now();
    const auto grid = grid_1d();
    const bf::BranchFn phi1 = branch_fn(bf::Problem::one_d, 1);
    const bf::BranchFn phi2 = branch_fn(bf::Problem::one_d, 2);
    int votes = 0;
    detail.clear();
    // The MAE arm trains with a small batch on purpose: at a 50/50 mixture
    // every value between the branches minimizes MAE, so the fit only visits
    // the gap through gradient noise, and larger batches freeze it onto
    // whichever side it approached from. The logcosh arm uses the same
    // settled recipe as the adherence criteria.
    for (int k = 0; k < 3; ++k) {
        const bf::Dataset half = one_d_fixture(0.5, 301 + 10 * k);
        const bf::NetworkModel mae_model =
            fit_branch(half, bf::LossVariant::mae, 11 + k, 12 + k, 1500, 16);
        const double osc_mae = bf::oscillation_index(mae_model, phi1, phi2, grid);

        const bf::Dataset sixty = one_d_fixture(0.6, 302 + 10 * k);
        const bf::NetworkModel lc_model =
            fit_branch(sixty, bf::LossVariant::logcosh, 13 + k, 14 + k);
        const double osc_lc = bf::oscillation_index(lc_model, phi1, phi2, grid);

        votes += osc_mae > osc_lc;
        if (!detail.empty()) detail += ", ";
        detail += "seed" + std::to_string(k) + " mae " + fmt("%.4f", osc_mae) +
                  " vs logcosh " + fmt("%.4f", osc_lc);
    }
    const double secs = seconds_since(t0);
    detail += "; votes " + std::to_string(votes) + "/3 (need >= 2), " +
              fmt("%.0f", secs) + "s";
    return votes >= 2 && secs < 600.0;
}

// ---------------------------------------------------------------------------
// Criterion 6: extraction end to end on the fraction-0.6 fixture.

bf::ExtractionConfig acceptance_extraction_config() {
    bf::ExtractionConfig cfg;
    cfg.network_config.hidden_layers = kHidden;
    cfg.network_config.seed = 1;
    cfg.train_config.loss.variant = bf::LossVariant::logcosh;
    cfg.train_config.epochs = kEpochs;
    cfg.train_config.batch_size = kBatch;
    cfg.train_config.learning_rate = 1e-3;
    cfg.train_config.seed = 2;
    return cfg;
}

bool criterion_extraction(std::string& detail) {
    const auto t0 = Clock::now();
    const bf::Dataset data = one_d_fixture(0.6, 101);
    const bf::ExtractionResult res =
        bf::extract_branches(data, acceptance_extraction_config());

    std::vector<std::optional<int>> truth;
    std::vector<bool> mask;
    int coinciding = 0, coinciding_ambiguous = 0;
    for (int i = 0; i < data.n(); ++i) {
        truth.push_back(data.samples[i].true_branch);
        const bool multi = std::abs(data.samples[i].x[0]) < 4.0;
        mask.push_back(multi);
        if (!multi) {
            ++coinciding;
            coinciding_ambiguous += res.assignment[i].ambiguous;
        }
    }
    const double accuracy =
        res.branches.empty() ? 0.0 : bf::branch_accuracy(res, truth, mask).accuracy;
    const double amb_frac =
        coinciding > 0 ? static_cast<double>(coinciding_ambiguous) / coinciding : 0.0;

    const bf::Dataset single = one_d_fixture(1.0, 401);
    const bf::ExtractionResult res1 =
        bf::extract_branches(single, acceptance_extraction_config());

    const double secs = seconds_since(t0);
    const bool ok = res.branches.size() == 2 && accuracy >= 0.90 &&
                    amb_frac >= 0.80 && res1.branches.size() == 1 && secs < 360.0;
    detail = "branches " + std::to_string(res.branches.size()) +
             " (want 2), accuracy " + fmt("%.3f", accuracy) +
             " (bar 0.90), coinciding ambiguous " + fmt("%.3f", amb_frac) +
             " (bar 0.80), single-branch run found " +
             std::to_string(res1.branches.size()) + " (want 1), " +
             fmt("%.0f", secs) + "s";
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 7: 2D dominant-branch adherence both ways.

bool criterion_dominant_2d(std::string& detail) {
    const auto grid = grid_2d();
    bool ok = true;
    detail.clear();
    const double fractions[] = {0.6, 0.4};
    for (int i = 0; i < 2; ++i) {
        const auto t0 = Clock::now();
        const int majority = i == 0 ? 1 : 2;
        const bf::Dataset data = two_d_fixture(fractions[i], 202 + i);
        // The 2D fields also coincide on a circle through the origin, not
        // just the excluded axes, so the fit error must drop further before
        // the losing band around that arc thins out; these runs train longer.
        const bf::NetworkModel model =
            fit_branch(data, bf::LossVariant::logcosh, 21 + i, 22 + i, 3500);
        const double adh = adherence_to(model, bf::Problem::two_d, majority, grid);
        const double secs = seconds_since(t0);
        ok = ok && adh >= 0.85 && secs < 300.0;
        if (!detail.empty()) detail += ", ";
        detail += "phi" + std::to_string(majority) + " adh " + fmt("%.3f", adh) +
                  " in " + fmt("%.0f", secs) + "s";
    }
    detail += " (bar 0.85, 300s per run)";
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: synthetic-data invariants on dense grids.

bool criterion_synthdata(std::string& detail) {
    const double tol = 1e-12;
    bool ok = true;
    std::string why;

    // Coinciding region, even symmetry and separation for the 1D pair.
    int checked = 0;
    for (int i = 0; i <= 12000; ++i) {
        const double x = -6.0 + i * 12.0 / 12000.0;
        const double p1 = bf::phi1_1d(x);
        const double p2 = bf::phi2_1d(x);
        if (std::abs(p1 - bf::phi1_1d(-x)) > tol ||
            std::abs(p2 - bf::phi2_1d(-x)) > tol) {
            ok = false;
            why = "1d evenness at x=" + fmt("%.4f", x);
        }
        if (std::abs(x) >= 4.0 && std::abs(p1 - p2) > tol) {
            ok = false;
            why = "1d coincidence at x=" + fmt("%.4f", x);
        }
        if (std::abs(x) < 4.0 && x != 0.0 &&
            p1 - p2 != (x - 4.0) * (x - 4.0) * (x + 4.0) * (x + 4.0)) {
            // separation equals the quartic exactly; positivity follows
            const double q = ((x - 4.0) * (x + 4.0)) * ((x - 4.0) * (x + 4.0));
            if (std::abs((p1 - p2) - q) > tol) {
                ok = false;
                why = "1d separation at x=" + fmt("%.4f", x);
            }
        }
        ++checked;
    }
    if (std::abs(bf::phi1_1d(0.0) - bf::phi2_1d(0.0) - 256.0) > tol) {
        ok = false;
        why = "1d separation maximum is not 256";
    }

    // 2D joint-negation symmetry and the coinciding axes.
    for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= 100; ++j) {
            const double x = -1.5 + i * 3.0 / 100.0;
            const double y = -1.5 + j * 3.0 / 100.0;
            if (std::abs(bf::f1_2d(-x, -y) + bf::f1_2d(x, y)) > tol ||
                std::abs(bf::f2_2d(-x, -y) - bf::f2_2d(x, y)) > tol ||
                std::abs(bf::phi1_2d(-x, -y) - (1.0 - bf::phi1_2d(x, y))) > tol ||
                std::abs(bf::phi2_2d(-x, -y) - bf::phi2_2d(x, y)) > tol) {
                ok = false;
                why = "2d symmetry at (" + fmt("%.3f", x) + "," + fmt("%.3f", y) + ")";
            }
            ++checked;
        }
    }
    for (int i = 0; i <= 1000; ++i) {
        const double u = -1.5 + i * 3.0 / 1000.0;
        if (std::abs(bf::phi1_2d(u, 0.0) - 0.5) > tol ||
            std::abs(bf::phi2_2d(0.0, u) - 0.5) > tol) {
            ok = false;
            why = "2d axes are not 0.5 at u=" + fmt("%.4f", u);
        }
    }

    // Generator determinism and degenerate mixtures.
    bf::MixSpec spec;
    spec.n_samples = 2000;
    spec.fraction_branch1 = 0.6;
    spec.noise_sigma = 1.0;
    spec.seed = 7;
    const bf::Dataset a = bf::generate(bf::Problem::one_d, spec);
    const bf::Dataset b = bf::generate(bf::Problem::one_d, spec);
    for (int i = 0; i < a.n(); ++i) {
        if (a.samples[i].x[0] != b.samples[i].x[0] ||
            a.samples[i].y != b.samples[i].y ||
            a.samples[i].true_branch != b.samples[i].true_branch) {
            ok = false;
            why = "generator not deterministic at row " + std::to_string(i);
        }
    }
    for (const double f : {0.0, 1.0}) {
        bf::MixSpec pure = spec;
        pure.fraction_branch1 = f;
        pure.noise_sigma = 0.0;
        const bf::Dataset d = bf::generate(bf::Problem::one_d, pure);
        const int want = f == 1.0 ? 1 : 2;
        for (const bf::Sample& s : d.samples) {
            if (s.true_branch != want ||
                s.y != bf::branch_value(bf::Problem::one_d, want, s.x)) {
                ok = false;
                why = "pure mixture off branch at fraction " + fmt("%.0f", f);
            }
        }
    }

    detail = std::to_string(checked) + " grid points to 1e-12, determinism and pure mixtures exact";
    if (!ok) detail += "; " + why;
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 9: CLI reproducibility, every command twice, artifacts hashed.

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::uint64_t> hash_tree(const fs::path& dir) {
    std::map<std::string, std::uint64_t> hashes;
    if (!fs::exists(dir)) return hashes;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        hashes[entry.path().lexically_relative(dir).string()] =
            fnv1a(slurp_file(entry.path()));
    }
    return hashes;
}

bool criterion_cli_reproducibility(std::string& detail) {
    if (g_cli.empty()) {
        detail = "no --cli path given";
        return false;
    }
    const auto t0 = Clock::now();
    const fs::path work = fs::temp_directory_path() / "branchfinder_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);
    const fs::path out = work / "out";

    // The criterion-3/6 data fixture as a config file, plot data included so
    // the comparison curves are covered too. Reruns only have to be
    // byte-identical, so a shorter schedule keeps the twelve command
    // invocations affordable.
    bf::RunConfig rc;
    rc.mix.n_samples = 5000;
    rc.mix.fraction_branch1 = 0.6;
    rc.mix.seed = 101;
    rc.network.hidden_layers = kHidden;
    rc.network.seed = 1;
    rc.training.epochs = 300;
    rc.training.batch_size = 256;
    rc.training.learning_rate = 1e-3;
    rc.training.seed = 2;
    rc.output_dir = out.string();
    rc.emit_plot_data = true;
    const fs::path cfg = work / "config.json";
    bf::write_json_file(bf::config_to_json(rc), cfg);

    const char* commands[] = {"gen",  "train",          "extract",
                              "eval", "compare-losses", "print-config"};
    int files_checked = 0;
    for (const char* cmd : commands) {
        std::uint64_t stdout_hash[2] = {0, 0};
        std::map<std::string, std::uint64_t> tree[2];
        for (int pass = 0; pass < 2; ++pass) {
            const fs::path log = work / (std::string(cmd) + "_" +
                                         std::to_string(pass) + ".out");
            const std::string shell = std::string(g_cli) + " " + cmd +
                                      " --config " + cfg.string() + " >" +
                                      log.string() + " 2>&1";
            const int status = std::system(shell.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                detail = std::string(cmd) + " exited nonzero: " + slurp_file(log);
                return false;
            }
            stdout_hash[pass] = fnv1a(slurp_file(log));
            tree[pass] = hash_tree(out);
        }
        if (stdout_hash[0] != stdout_hash[1]) {
            detail = std::string(cmd) + " printed different output on rerun";
            return false;
        }
        if (tree[0] != tree[1]) {
            for (const auto& [name, h] : tree[0]) {
                const auto it = tree[1].find(name);
                if (it == tree[1].end() || it->second != h) {
                    detail = std::string(cmd) + " artifact differs on rerun: " + name;
                    return false;
                }
            }
            detail = std::string(cmd) + " artifact set changed on rerun";
            return false;
        }
        files_checked = static_cast<int>(tree[0].size());
    }
    detail = "6 commands rerun, " + std::to_string(files_checked) +
             " artifacts byte-identical, " + fmt("%.0f", seconds_since(t0)) + "s";
    return true;
}

// ---------------------------------------------------------------------------

struct Criterion {
    int id;
    const char* name;
    bool (*run)(std::string&);
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) {
            g_cli = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--cli <path>] [--only <id>]\n";
            return 2;
        }
    }

    const Criterion criteria[] = {
        {1, "loss and gradient suite", criterion_loss_suite},
        {2, "constant-model minimizers", criterion_minimizer_oracle},
        {3, "1d dominant-branch adherence", criterion_dominant_1d},
        {4, "mse between branches", criterion_mse_between},
        {5, "mae oscillation vs logcosh", criterion_mae_oscillation},
        {6, "branch extraction end to end", criterion_extraction},
        {7, "2d dominant-branch adherence", criterion_dominant_2d},
        {8, "synthetic-data invariants", criterion_synthdata},
        {9, "cli reproducibility", criterion_cli_reproducibility},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (only != 0 && c.id != only) continue;
        std::string detail;
        bool passed = false;
        try {
            passed = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        failures += !passed;
        std::cout << (passed ? "[PASS]" : "[FAIL]") << " criterion " << c.id
                  << ": " << c.name << " (" << detail << ")" << std::endl;
    }
    if (only == 0)
        std::cout << (9 - failures) << "/9 criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
