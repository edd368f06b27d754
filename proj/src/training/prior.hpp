#pragma once

#include "neuralop/fno.hpp"
#include "training/dataset.hpp"
#include "training/train_config.hpp"

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace dgp {

// A scalar critic d(a) with first-order parameter gradients.
class Critic {
public:
    virtual ~Critic() = default;
    virtual std::size_t param_count() const = 0;
    virtual double value(const Field& a) const = 0;
    // Returns d(a) and accumulates weight * dd/dparams into d_params.
    virtual double value_and_grad(const Field& a, double weight, std::span<double> d_params) const = 0;
};

// FNO critic d(a, u) on the channel concatenation [a, u].
class FnoCritic final : public Critic {
public:
    FnoCritic(const FnoParams& params, const Field& u) : params_(params), u_(u) {}
    std::size_t param_count() const override { return params_.size(); }
    double value(const Field& a) const override;
    double value_and_grad(const Field& a, double weight, std::span<double> d_params) const override;

private:
    const FnoParams& params_;
    const Field& u_;
};

struct GpResult {
    double penalty = 0.0;
    double directional = 0.0; // finite-difference estimate D
};

// Gradient penalty lambda * (D - 1)^2 where D is the central difference of
// the critic along the unit (cell-weighted) direction from fake to real,
// taken at the interpolate r a_fake + (1 - r) a_real with step
// h * max(1, ||interpolate||). weight * dpenalty/dparams is accumulated into
// d_params when it is non-empty.
GpResult gp_penalty_fd(const Critic& critic, const Field& a_real, const Field& a_fake, double r, double h,
                       double lambda, std::span<double> d_params = {}, double weight = 1.0);

struct PriorModel {
    FnoParams generator; // [q, u] -> a, all normalized
    FnoParams critic;    // [a, u] -> scalar
    int q_channels = 1;

    Field generate(const Field& q, const Field& u_norm) const;
    Field sample_latent(const Grid& g, RngStream& rng) const;

    void save(const std::filesystem::path& dir) const;
    static PriorModel load(const std::filesystem::path& dir);
};

struct PriorResult {
    PriorModel model;
    std::vector<CurvePoint> curve; // Wasserstein estimate per generator step
    // Fraction of outer iterations whose critic objective (real - fake -
    // penalty on that iteration's batch) was non-decreasing across the inner
    // critic steps.
    double critic_monotone_fraction = 0.0;
};

// Initial generator and critic used by train_prior for this dataset and seed.
PriorModel init_prior(const Dataset& ds, const FnoConfig& generator_net, const FnoConfig& critic_net, int q_channels,
                      std::uint64_t seed);

// Alternating WGAN training with n_critic critic steps per generator step.
// Each outer iteration draws one minibatch of pairs, one latent and one
// interpolation weight r per pair; the critic steps reuse them.
using PriorObserver = std::function<void(std::size_t step, const PriorModel& model, double wasserstein)>;
PriorResult train_prior(const Dataset& ds, const FnoConfig& generator_net, const FnoConfig& critic_net, int q_channels,
                        const TrainConfig& cfg, const PriorObserver& observer = {});

} // namespace dgp
