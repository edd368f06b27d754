#pragma once

#include "core/field.hpp"
#include "core/rng.hpp"

#include <functional>
#include <vector>

namespace dgp {

// Target log-density over a flat state vector. Returns log p(x) and writes
// its gradient into grad (same size as x).
class MalaTarget {
public:
    virtual ~MalaTarget() = default;
    virtual double log_density(const std::vector<double>& x, std::vector<double>& grad) const = 0;
};

// log q(to | from) up to a constant for the proposal
// to = from + tau * grad(from) + sqrt(2 tau) * xi.
double mala_log_proposal(const std::vector<double>& to, const std::vector<double>& from,
                         const std::vector<double>& grad_from, double tau);

// Log acceptance ratio for a move x -> y (clamped to <= 0).
double mala_log_accept(const std::vector<double>& x, double logp_x, const std::vector<double>& grad_x,
                       const std::vector<double>& y, double logp_y, const std::vector<double>& grad_y, double tau);

struct MalaConfig {
    double step_size = 1e-3;
    int n_steps = 1000;
    int burn_in = 200;
    void validate() const;
};

struct MalaChainResult {
    std::vector<double> mean;                 // mean of kept states
    std::vector<double> variance;             // per-coordinate variance of kept states
    std::vector<std::vector<double>> kept;    // only when keep_states
    std::size_t accepted = 0;
    std::size_t rejected_nonfinite = 0;
};

// Runs a chain from x0. `on_keep` (optional) sees every post-burn-in state.
MalaChainResult mala_run(const MalaTarget& target, std::vector<double> x0, const MalaConfig& cfg, RngStream& rng,
                         bool keep_states = false,
                         const std::function<void(const std::vector<double>&)>& on_keep = {});

// Decoder/forward pair used by the observation-perturbation chain. The state
// is eps with the same shape as u*; the design is decode(u* + eps).
struct PerturbationModel {
    std::function<Field(const Field& u_obs)> decode;
    // Cotangent of decode at u_obs: returns d/du_obs <cot, decode(u_obs)>.
    std::function<Field(const Field& u_obs, const Field& cot)> decode_vjp;
    std::function<Field(const Field& a)> forward;
    std::function<Field(const Field& a, const Field& cot)> forward_vjp;
};

// log p(eps) = -||u* - F(decode(u* + eps))||^2 / (2 sigma^2) - ||eps||^2 / 2
// with plain sums. With likelihood disabled only the prior term remains.
class PerturbationTarget final : public MalaTarget {
public:
    PerturbationTarget(PerturbationModel model, Field u_star, double obs_sigma, bool likelihood = true);
    double log_density(const std::vector<double>& x, std::vector<double>& grad) const override;
    Field design(const std::vector<double>& x) const;
    const Field& u_star() const { return u_star_; }

private:
    PerturbationModel model_;
    Field u_star_;
    double sigma_;
    bool likelihood_;
};

struct MalaDesignResult {
    Field mean_design;
    MalaChainResult chain;
};

// Chain over eps starting at 0; returns the posterior mean of decoded designs.
MalaDesignResult mala_chain(const PerturbationTarget& target, const MalaConfig& cfg, RngStream& rng);

} // namespace dgp

#include "neuralop/fno.hpp"

namespace dgp {

// decode(u) = G(q0, u), forward(a) = F(a), all in standardized units. The
// parameter objects must outlive the returned model.
PerturbationModel fno_perturbation_model(const FnoParams& surrogate, const FnoParams& generator, Field q0);

} // namespace dgp
