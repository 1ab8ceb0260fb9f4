#include "branchfinder/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "branchfinder/error.hpp"

namespace branchfinder {
namespace {

void check_kind(const LossKind& kind) {
    if (!(kind.beta > 0.0) || !std::isfinite(kind.beta))
        fail(ErrorKind::invalid_config, "loss beta must be positive and finite");
    if (kind.variant == LossVariant::huber &&
        (!(kind.delta > 0.0) || !std::isfinite(kind.delta)))
        fail(ErrorKind::invalid_config, "huber delta must be positive and finite");
}

void check_residual(double r) {
    if (!std::isfinite(r))
        fail(ErrorKind::invalid_input, "residual must be finite");
}

// ln(cosh(s)) = |s| + ln(1 + e^(-2|s|)) - ln 2; the naive form overflows
// near |s| ~ 710.
double stable_logcosh(double s) {
    const double a = std::abs(s);
    const double v = a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    return std::max(0.0, v);
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

const char* loss_variant_name(LossVariant v) {
    switch (v) {
        case LossVariant::mse: return "mse";
        case LossVariant::mae: return "mae";
        case LossVariant::huber: return "huber";
        case LossVariant::logcosh: return "logcosh";
    }
    return "?";
}

LossVariant loss_variant_from_name(std::string_view name) {
    if (name == "mse") return LossVariant::mse;
    if (name == "mae") return LossVariant::mae;
    if (name == "huber") return LossVariant::huber;
    if (name == "logcosh") return LossVariant::logcosh;
    fail(ErrorKind::invalid_config, "unknown loss variant: " + std::string(name));
}

double loss_value(const LossKind& kind, double r) {
    check_kind(kind);
    check_residual(r);
    const double s = kind.beta * r;
    switch (kind.variant) {
        case LossVariant::mse:
            return s * s;
        case LossVariant::mae:
            return std::abs(s);
        case LossVariant::huber: {
            const double a = std::abs(s);
            if (a <= kind.delta) return 0.5 * s * s;
            return kind.delta * a - 0.5 * kind.delta * kind.delta;
        }
        case LossVariant::logcosh:
            return stable_logcosh(s);
    }
    fail(ErrorKind::invalid_config, "unknown loss variant");
}

double loss_gradient(const LossKind& kind, double r) {
    check_kind(kind);
    check_residual(r);
    const double b = kind.beta;
    const double s = b * r;
    switch (kind.variant) {
        case LossVariant::mse:
            return 2.0 * b * b * r;
        case LossVariant::mae:
            return b * sign(s);
        case LossVariant::huber:
            if (std::abs(s) <= kind.delta) return b * b * r;
            return b * kind.delta * sign(s);
        case LossVariant::logcosh:
            return b * std::tanh(s);
    }
    fail(ErrorKind::invalid_config, "unknown loss variant");
}

double batch_loss(const LossKind& kind, std::span<const double> predictions,
                  std::span<const double> targets) {
    if (predictions.empty() || predictions.size() != targets.size())
        fail(ErrorKind::invalid_input,
             "batch_loss requires non-empty sequences of equal length");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (!std::isfinite(predictions[i]) || !std::isfinite(targets[i]))
            fail(ErrorKind::invalid_input, "batch_loss values must be finite");
        sum += loss_value(kind, predictions[i] - targets[i]);
    }
    return sum / static_cast<double>(predictions.size());
}

double constant_model_minimizer(const LossKind& kind,
                                std::span<const double> targets) {
    if (targets.empty())
        fail(ErrorKind::invalid_input, "constant_model_minimizer on empty targets");
    check_kind(kind);
    double lo = targets[0], hi = targets[0];
    for (double t : targets) {
        if (!std::isfinite(t))
            fail(ErrorKind::invalid_input, "targets must be finite");
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (lo == hi) return lo;

    auto objective = [&](double c) {
        double sum = 0.0;
        for (double t : targets) sum += loss_value(kind, c - t);
        return sum / static_cast<double>(targets.size());
    };

    // Golden-section search; all four objectives are convex in c.
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > 1e-7) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = objective(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace branchfinder
