#pragma once

#include <span>
#include <string_view>

namespace branchfinder {

enum class LossVariant { mse, mae, huber, logcosh };

/// Loss family selector. The residual is scaled as s = beta * r before the
/// per-sample formula applies; delta is the Huber transition point in loss
/// units (only meaningful for huber).
struct LossKind {
    LossVariant variant = LossVariant::logcosh;
    double delta = 1.0;
    double beta = 1.0;
};

const char* loss_variant_name(LossVariant v);
LossVariant loss_variant_from_name(std::string_view name);

/// Per-sample loss of residual r (prediction minus target).
/// MSE -> s^2, MAE -> |s|, Huber -> 0.5 s^2 if |s| <= delta else
/// delta |s| - 0.5 delta^2, LogCosh -> ln(cosh(s)), with s = beta * r.
double loss_value(const LossKind& kind, double r);

/// d/dr of loss_value. MAE returns the subgradient 0 at r = 0; the Huber
/// kink uses the quadratic-side formula (both one-sided limits coincide).
double loss_gradient(const LossKind& kind, double r);

/// Mean of loss_value over paired residuals.
double batch_loss(const LossKind& kind, std::span<const double> predictions,
                  std::span<const double> targets);

/// argmin over constant c of batch_loss(kind, [c,...], targets), located by
/// golden-section search over [min(targets), max(targets)], tolerance 1e-6.
double constant_model_minimizer(const LossKind& kind,
                                std::span<const double> targets);

}  // namespace branchfinder
