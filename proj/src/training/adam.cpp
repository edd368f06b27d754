#include "training/adam.hpp"

#include "core/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dgp {

AdamConfig AdamConfig::adversarial(double lr0, std::size_t total_steps)
{
    AdamConfig c;
    c.lr0 = lr0;
    c.beta1 = 0.5;
    c.beta2 = 0.9;
    c.total_steps = total_steps;
    return c;
}

void AdamConfig::validate() const
{
    require(lr0 >= 0.0 && std::isfinite(lr0), "adam: lr0 must be finite and >= 0");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "adam: betas must lie in [0, 1)");
    require(eps > 0.0, "adam: eps must be > 0");
    require(total_steps >= 1, "adam: total_steps must be >= 1");
}

double cosine_lr(double lr0, std::size_t t, std::size_t total)
{
    if (total == 0) return lr0;
    const double frac = static_cast<double>(std::min(t, total)) / static_cast<double>(total);
    return lr0 * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

double adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, std::size_t step_index,
                 const AdamConfig& cfg)
{
    require(params.size() == grads.size() && state.m.size() == params.size() && state.v.size() == params.size(),
            ErrorCode::ShapeMismatch, "adam: parameter, gradient and state sizes differ");
    require(step_index >= 1, "adam: step_index must be >= 1");
    for (std::size_t i = 0; i < grads.size(); ++i)
        if (!std::isfinite(grads[i]))
            throw Error(ErrorCode::NonFinite,
                        "adam: non-finite gradient at coordinate " + std::to_string(i) + " on step " +
                            std::to_string(step_index));

    const double lr = cosine_lr(cfg.lr0, step_index - 1, cfg.total_steps);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_index));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_index));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        if (lr == 0.0) continue;
        const double mhat = state.m[i] / bc1, vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    return lr;
}

} // namespace dgp
