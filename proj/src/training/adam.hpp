#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dgp {

struct AdamConfig {
    double lr0 = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t total_steps = 1; // T of the cosine schedule

    static AdamConfig adversarial(double lr0, std::size_t total_steps);
    void validate() const;
};

// lr0 * 0.5 * (1 + cos(pi t / T)); t is clamped to [0, T].
double cosine_lr(double lr0, std::size_t t, std::size_t total);

struct AdamState {
    std::vector<double> m, v;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam update for 1-based step_index. The learning rate is
// the cosine schedule evaluated at t = step_index - 1, so the first step uses
// lr0. Returns the learning rate that was applied.
double adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, std::size_t step_index,
                 const AdamConfig& cfg);

} // namespace dgp
