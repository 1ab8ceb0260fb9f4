#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "branchfinder/dataset.hpp"
#include "branchfinder/loss.hpp"
#include "branchfinder/matrix.hpp"

namespace branchfinder {

enum class Activation { tanh, relu, sigmoid };

const char* activation_name(Activation a);
Activation activation_from_name(std::string_view name);

struct NetworkConfig {
    int input_dim = 1;
    std::vector<int> hidden_layers = {64, 64};
    Activation activation = Activation::tanh;
    std::uint64_t seed = 0;
};

/// Per-dimension z-score parameters fitted on training inputs.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;
};

/// Affine target map: scaled = (y - shift) / scale. Training minimizes loss
/// in scaled space; prediction inverts the map.
struct TargetScaler {
    double shift = 0.0;
    double scale = 1.0;
};

struct NetworkModel {
    NetworkConfig config;
    std::vector<Matrix> weights;              // per layer, [out x in]
    std::vector<std::vector<double>> biases;  // per layer, [out]
    Standardizer standardizer;
    TargetScaler target_scaler;
};

enum class OptimizerKind { sgd, adaptive_moments };

const char* optimizer_name(OptimizerKind o);
OptimizerKind optimizer_from_name(std::string_view name);

struct TrainConfig {
    LossKind loss;
    int epochs = 2000;
    int batch_size = 64;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::adaptive_moments;
    double decay1 = 0.9;    // first-moment decay
    double decay2 = 0.999;  // second-moment decay
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> epoch_loss;  // mean training loss per epoch, scaled space
    double final_train_loss = 0.0;
    std::optional<double> final_validation_loss;
    int epochs_run = 0;
};

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

/// Weights uniform on +-sqrt(1/fan-in), biases zero, deterministic from
/// config.seed; scalers start as identity.
NetworkModel init_model(const NetworkConfig& config);

/// Standardize, run the layer chain (linear output), invert the target map.
double forward(const NetworkModel& model, std::span<const double> x);

/// Batched forward over many inputs; one pass through the kernels.
std::vector<double> forward_many(const NetworkModel& model,
                                 const std::vector<std::vector<double>>& xs);

/// Reverse-mode gradients of the scaled-space mean batch loss with respect
/// to every weight and bias.
Gradients parameter_gradients(const NetworkModel& model, const Dataset& batch,
                              const LossKind& loss);

/// Fits standardizer and target scaler from data, then runs seeded
/// mini-batch gradient descent in place. Deterministic given seeds.
TrainReport train(NetworkModel& model, const Dataset& data,
                  const TrainConfig& tc);

/// Fits the input standardizer and the min-max target scaler from data
/// without touching the weights (train does this itself).
void fit_scalers(NetworkModel& model, const Dataset& data);

/// Mean loss over data in scaled-target space; the exact objective train
/// descends, exposed for validation loss and gradient verification.
double scaled_batch_loss(const NetworkModel& model, const Dataset& data,
                         const LossKind& loss);

}  // namespace branchfinder
