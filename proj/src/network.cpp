#include "branchfinder/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "branchfinder/error.hpp"
#include "branchfinder/kernels.hpp"
#include "branchfinder/rng.hpp"

namespace branchfinder {
namespace {

void check_network_config(const NetworkConfig& c) {
    if (c.input_dim < 1)
        fail(ErrorKind::invalid_config, "input_dim must be >= 1");
    if (c.hidden_layers.empty())
        fail(ErrorKind::invalid_config, "at least one hidden layer required");
    for (int w : c.hidden_layers)
        if (w < 1) fail(ErrorKind::invalid_config, "zero-width hidden layer");
}

void check_loss_kind(const LossKind& k) {
    loss_value(k, 0.0);  // validates beta/delta as a side effect
}

std::vector<int> layer_widths(const NetworkConfig& c) {
    std::vector<int> w;
    w.push_back(c.input_dim);
    for (int h : c.hidden_layers) w.push_back(h);
    w.push_back(1);
    return w;
}

void check_dataset(const Dataset& data, int input_dim) {
    if (data.samples.empty())
        fail(ErrorKind::insufficient_data, "dataset is empty");
    if (data.input_dim != input_dim)
        fail(ErrorKind::invalid_input,
             "dataset input_dim " + std::to_string(data.input_dim) +
                 " does not match network input_dim " + std::to_string(input_dim));
    for (const Sample& s : data.samples) {
        if (static_cast<int>(s.x.size()) != input_dim)
            fail(ErrorKind::invalid_input, "sample dimension mismatch");
        if (!std::isfinite(s.y)) fail(ErrorKind::invalid_input, "non-finite target");
        for (double v : s.x)
            if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "non-finite input");
    }
}

// Scratch buffers for one mini-batch; sized for capacity columns, used with
// the current batch width.
struct BatchWork {
    std::vector<std::vector<double>> z;   // pre-activations per layer
    std::vector<std::vector<double>> a;   // activations per layer
    std::vector<std::vector<double>> d;   // deltas per layer
    std::vector<double> x;                // standardized inputs [dim x B]
    std::vector<double> t;                // scaled targets [B]
    std::vector<double> scratch;          // transposes
};

BatchWork make_work(const std::vector<int>& widths, int capacity) {
    BatchWork w;
    const std::size_t layers = widths.size() - 1;
    w.z.resize(layers);
    w.a.resize(layers);
    w.d.resize(layers);
    std::size_t max_side = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        w.z[l].resize(static_cast<std::size_t>(widths[l + 1]) * capacity);
        w.a[l].resize(static_cast<std::size_t>(widths[l + 1]) * capacity);
        w.d[l].resize(static_cast<std::size_t>(widths[l + 1]) * capacity);
        max_side = std::max(max_side, static_cast<std::size_t>(
                                          std::max(widths[l], widths[l + 1])));
    }
    w.x.resize(static_cast<std::size_t>(widths[0]) * capacity);
    w.t.resize(capacity);
    w.scratch.resize(std::max(max_side * max_side, max_side * capacity));
    return w;
}

// Applies the hidden activation z -> a and rejects non-finite values.
void activate(Activation act, const std::vector<double>& z,
              std::vector<double>& a, std::size_t count, std::size_t layer) {
    for (std::size_t i = 0; i < count; ++i) {
        const double v = z[i];
        if (!std::isfinite(v))
            fail(ErrorKind::numerical_failure,
                 "non-finite activation in layer " + std::to_string(layer + 1));
        switch (act) {
            case Activation::tanh: a[i] = std::tanh(v); break;
            case Activation::relu: a[i] = v > 0.0 ? v : 0.0; break;
            case Activation::sigmoid: a[i] = 1.0 / (1.0 + std::exp(-v)); break;
        }
    }
}

// Forward pass over a standardized batch X [dim x B]; fills work.z / work.a.
// The last layer is linear; its output row is work.a.back() == work.z.back().
void forward_scaled(const NetworkModel& model, BatchWork& work, std::size_t B) {
    const auto& kt = kernels::active();
    const std::size_t layers = model.weights.size();
    const double* in = work.x.data();
    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& W = model.weights[l];
        kt.gemm_bias(work.z[l].data(), W.data(), in, model.biases[l].data(),
                     W.rows, W.cols, B);
        if (l + 1 < layers) {
            activate(model.config.activation, work.z[l], work.a[l], W.rows * B, l);
        } else {
            for (std::size_t i = 0; i < B; ++i) {
                const double v = work.z[l][i];
                if (!std::isfinite(v))
                    fail(ErrorKind::numerical_failure,
                         "non-finite activation in layer " + std::to_string(l + 1));
                work.a[l][i] = v;
            }
        }
        in = work.a[l].data();
    }
}

// Reverse pass; accumulates batch-mean gradients into grads (caller zeroes).
// Returns the summed per-sample loss for the batch.
double backward_scaled(const NetworkModel& model, BatchWork& work, std::size_t B,
                       const LossKind& loss, Gradients& grads) {
    const auto& kt = kernels::active();
    const std::size_t layers = model.weights.size();
    const double invB = 1.0 / static_cast<double>(B);

    double loss_sum = 0.0;
    const std::vector<double>& pred = work.a[layers - 1];
    std::vector<double>& dlast = work.d[layers - 1];
    for (std::size_t j = 0; j < B; ++j) {
        const double r = pred[j] - work.t[j];
        loss_sum += loss_value(loss, r);
        dlast[j] = loss_gradient(loss, r) * invB;
    }

    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& W = model.weights[l];
        const std::size_t rows = W.rows, cols = W.cols;
        const double* a_prev = l == 0 ? work.x.data() : work.a[l - 1].data();

        // dW = delta . a_prev^T via a transpose then plain GEMM.
        double* at = work.scratch.data();
        kt.transpose(at, a_prev, cols, B);
        kt.gemm_acc(grads.weights[l].data(), work.d[l].data(), at, rows, B, cols);
        kt.row_sum_acc(grads.biases[l].data(), work.d[l].data(), rows, B);

        if (l == 0) break;
        double* wt = work.scratch.data();
        kt.transpose(wt, W.data(), rows, cols);
        std::fill_n(work.d[l - 1].data(), cols * B, 0.0);
        kt.gemm_acc(work.d[l - 1].data(), wt, work.d[l].data(), cols, rows, B);

        // Multiply by the activation derivative, from cached activations.
        const std::vector<double>& a = work.a[l - 1];
        std::vector<double>& dl = work.d[l - 1];
        switch (model.config.activation) {
            case Activation::tanh:
                for (std::size_t i = 0; i < cols * B; ++i)
                    dl[i] *= 1.0 - a[i] * a[i];
                break;
            case Activation::relu:
                for (std::size_t i = 0; i < cols * B; ++i)
                    dl[i] *= a[i] > 0.0 ? 1.0 : 0.0;
                break;
            case Activation::sigmoid:
                for (std::size_t i = 0; i < cols * B; ++i)
                    dl[i] *= a[i] * (1.0 - a[i]);
                break;
        }
    }
    return loss_sum;
}

Gradients make_gradients(const NetworkModel& model) {
    Gradients g;
    for (const Matrix& W : model.weights) {
        g.weights.emplace_back(W.rows, W.cols);
        g.biases.emplace_back(W.rows, 0.0);
    }
    return g;
}

void zero_gradients(Gradients& g) {
    for (Matrix& m : g.weights) std::fill(m.v.begin(), m.v.end(), 0.0);
    for (auto& b : g.biases) std::fill(b.begin(), b.end(), 0.0);
}

void standardize_into(const NetworkModel& model, const Dataset& data,
                      const std::vector<int>& order, std::size_t offset,
                      std::size_t B, std::vector<double>& x,
                      std::vector<double>& t) {
    const int d = model.config.input_dim;
    for (std::size_t j = 0; j < B; ++j) {
        const Sample& s = data.samples[order[offset + j]];
        for (int k = 0; k < d; ++k)
            x[static_cast<std::size_t>(k) * B + j] =
                (s.x[k] - model.standardizer.mean[k]) / model.standardizer.stddev[k];
        t[j] = (s.y - model.target_scaler.shift) / model.target_scaler.scale;
    }
}

}  // namespace

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
    }
    return "?";
}

Activation activation_from_name(std::string_view name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    fail(ErrorKind::invalid_config, "unknown activation: " + std::string(name));
}

const char* optimizer_name(OptimizerKind o) {
    return o == OptimizerKind::sgd ? "sgd" : "adaptive_moments";
}

OptimizerKind optimizer_from_name(std::string_view name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "adaptive_moments") return OptimizerKind::adaptive_moments;
    fail(ErrorKind::invalid_config, "unknown optimizer: " + std::string(name));
}

NetworkModel init_model(const NetworkConfig& config) {
    check_network_config(config);
    NetworkModel model;
    model.config = config;
    const auto widths = layer_widths(config);
    Rng rng(config.seed);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto fan_in = static_cast<std::size_t>(widths[l]);
        const auto fan_out = static_cast<std::size_t>(widths[l + 1]);
        Matrix W(fan_out, fan_in);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& w : W.v) w = rng.uniform(-bound, bound);
        model.weights.push_back(std::move(W));
        model.biases.emplace_back(fan_out, 0.0);
    }
    model.standardizer.mean.assign(config.input_dim, 0.0);
    model.standardizer.stddev.assign(config.input_dim, 1.0);
    model.target_scaler = TargetScaler{};
    return model;
}

void fit_scalers(NetworkModel& model, const Dataset& data) {
    check_dataset(data, model.config.input_dim);
    const int d = model.config.input_dim;
    const double n = static_cast<double>(data.n());
    for (int k = 0; k < d; ++k) {
        double mean = 0.0;
        for (const Sample& s : data.samples) mean += s.x[k];
        mean /= n;
        double var = 0.0;
        for (const Sample& s : data.samples) {
            const double c = s.x[k] - mean;
            var += c * c;
        }
        var /= n;
        const double sd = std::sqrt(var);
        model.standardizer.mean[k] = mean;
        model.standardizer.stddev[k] = sd > 0.0 ? sd : 1.0;
    }
    double lo = data.samples[0].y, hi = data.samples[0].y;
    for (const Sample& s : data.samples) {
        lo = std::min(lo, s.y);
        hi = std::max(hi, s.y);
    }
    model.target_scaler.shift = lo;
    model.target_scaler.scale = hi > lo ? hi - lo : 1.0;
}

double forward(const NetworkModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.config.input_dim)
        fail(ErrorKind::invalid_input, "forward: input dimension mismatch");
    for (double v : x)
        if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "forward: non-finite input");

    const auto widths = layer_widths(model.config);
    BatchWork work = make_work(widths, 1);
    for (int k = 0; k < model.config.input_dim; ++k)
        work.x[k] = (x[k] - model.standardizer.mean[k]) / model.standardizer.stddev[k];
    forward_scaled(model, work, 1);
    return work.a.back()[0] * model.target_scaler.scale + model.target_scaler.shift;
}

std::vector<double> forward_many(const NetworkModel& model,
                                 const std::vector<std::vector<double>>& xs) {
    if (xs.empty()) return {};
    const int d = model.config.input_dim;
    const std::size_t B = xs.size();
    const auto widths = layer_widths(model.config);
    BatchWork work = make_work(widths, static_cast<int>(B));
    for (std::size_t j = 0; j < B; ++j) {
        if (static_cast<int>(xs[j].size()) != d)
            fail(ErrorKind::invalid_input, "forward_many: input dimension mismatch");
        for (int k = 0; k < d; ++k) {
            if (!std::isfinite(xs[j][k]))
                fail(ErrorKind::invalid_input, "forward_many: non-finite input");
            work.x[static_cast<std::size_t>(k) * B + j] =
                (xs[j][k] - model.standardizer.mean[k]) / model.standardizer.stddev[k];
        }
    }
    forward_scaled(model, work, B);
    std::vector<double> out(B);
    for (std::size_t j = 0; j < B; ++j)
        out[j] = work.a.back()[j] * model.target_scaler.scale + model.target_scaler.shift;
    return out;
}

double scaled_batch_loss(const NetworkModel& model, const Dataset& data,
                         const LossKind& loss) {
    check_loss_kind(loss);
    check_dataset(data, model.config.input_dim);
    const std::size_t B = data.samples.size();
    const auto widths = layer_widths(model.config);
    BatchWork work = make_work(widths, static_cast<int>(B));
    std::vector<int> order(B);
    std::iota(order.begin(), order.end(), 0);
    standardize_into(model, data, order, 0, B, work.x, work.t);
    forward_scaled(model, work, B);
    double sum = 0.0;
    for (std::size_t j = 0; j < B; ++j)
        sum += loss_value(loss, work.a.back()[j] - work.t[j]);
    return sum / static_cast<double>(B);
}

Gradients parameter_gradients(const NetworkModel& model, const Dataset& batch,
                              const LossKind& loss) {
    check_loss_kind(loss);
    check_dataset(batch, model.config.input_dim);
    const std::size_t B = batch.samples.size();
    const auto widths = layer_widths(model.config);
    BatchWork work = make_work(widths, static_cast<int>(B));
    std::vector<int> order(B);
    std::iota(order.begin(), order.end(), 0);
    standardize_into(model, batch, order, 0, B, work.x, work.t);
    forward_scaled(model, work, B);
    Gradients grads = make_gradients(model);
    backward_scaled(model, work, B, loss, grads);
    return grads;
}

TrainReport train(NetworkModel& model, const Dataset& data, const TrainConfig& tc) {
    check_loss_kind(tc.loss);
    check_dataset(data, model.config.input_dim);
    const int n = data.n();
    if (tc.epochs < 1) fail(ErrorKind::invalid_config, "epochs must be >= 1");
    if (tc.batch_size < 1) fail(ErrorKind::invalid_config, "batch_size must be >= 1");
    if (tc.batch_size > n)
        fail(ErrorKind::invalid_config,
             "batch_size " + std::to_string(tc.batch_size) +
                 " exceeds dataset size " + std::to_string(n));
    if (!(tc.learning_rate > 0.0) || !std::isfinite(tc.learning_rate))
        fail(ErrorKind::invalid_config, "learning_rate must be positive");
    if (!(tc.decay1 > 0.0 && tc.decay1 < 1.0) || !(tc.decay2 > 0.0 && tc.decay2 < 1.0))
        fail(ErrorKind::invalid_config, "decay rates must lie in (0, 1)");
    if (!(tc.epsilon > 0.0))
        fail(ErrorKind::invalid_config, "epsilon must be positive");

    fit_scalers(model, data);

    const auto widths = layer_widths(model.config);
    const int B = tc.batch_size;
    BatchWork work = make_work(widths, B);
    Gradients grads = make_gradients(model);

    // Adaptive-moment state; untouched for plain SGD.
    Gradients m1 = make_gradients(model);
    Gradients m2 = make_gradients(model);
    double pow1 = 1.0, pow2 = 1.0;

    const auto& kt = kernels::active();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(tc.seed);

    TrainReport report;
    report.epoch_loss.reserve(tc.epochs);

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (int start = 0; start < n; start += B) {
            const std::size_t bsz = static_cast<std::size_t>(std::min(B, n - start));
            standardize_into(model, data, order, start, bsz, work.x, work.t);
            try {
                forward_scaled(model, work, bsz);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::numerical_failure) throw;
                fail(ErrorKind::training_diverged,
                     "training diverged at epoch " + std::to_string(epoch));
            }
            zero_gradients(grads);
            loss_sum += backward_scaled(model, work, bsz, tc.loss, grads);

            if (tc.optimizer == OptimizerKind::sgd) {
                for (std::size_t l = 0; l < model.weights.size(); ++l) {
                    kt.axpy(model.weights[l].data(), -tc.learning_rate,
                            grads.weights[l].data(), model.weights[l].size());
                    kt.axpy(model.biases[l].data(), -tc.learning_rate,
                            grads.biases[l].data(), model.biases[l].size());
                }
            } else {
                pow1 *= tc.decay1;
                pow2 *= tc.decay2;
                const double bias1 = 1.0 - pow1;
                const double bias2 = 1.0 - pow2;
                for (std::size_t l = 0; l < model.weights.size(); ++l) {
                    kt.adam_step(model.weights[l].data(), m1.weights[l].data(),
                                 m2.weights[l].data(), grads.weights[l].data(),
                                 model.weights[l].size(), tc.learning_rate,
                                 tc.decay1, tc.decay2, tc.epsilon, bias1, bias2);
                    kt.adam_step(model.biases[l].data(), m1.biases[l].data(),
                                 m2.biases[l].data(), grads.biases[l].data(),
                                 model.biases[l].size(), tc.learning_rate,
                                 tc.decay1, tc.decay2, tc.epsilon, bias1, bias2);
                }
            }
        }
        const double epoch_loss = loss_sum / static_cast<double>(n);
        if (!std::isfinite(epoch_loss) ||
            (epoch > 0 && report.epoch_loss[0] > 0.0 &&
             epoch_loss > 1e6 * report.epoch_loss[0]))
            fail(ErrorKind::training_diverged,
                 "training diverged at epoch " + std::to_string(epoch));
        report.epoch_loss.push_back(epoch_loss);
    }

    report.epochs_run = tc.epochs;
    report.final_train_loss = report.epoch_loss.back();
    return report;
}

}  // namespace branchfinder
