#pragma once

#include "core/field.hpp"
#include "core/rng.hpp"
#include "neuralop/fno.hpp"
#include "training/dataset.hpp"
#include "training/prior.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dgp {

enum class InverseMode { Map, Posterior };
enum class InverseVariant { WithPrior, NoPriorRandomInit, NoPriorConditionInit, PriorOnly };

std::string to_string(InverseMode m);
std::string to_string(InverseVariant v);
InverseMode inverse_mode_from_string(const std::string& s);
InverseVariant inverse_variant_from_string(const std::string& s);

struct InverseConfig {
    double gamma = 0.01;
    double l2_lambda = 1e-2;
    int steps = 100;
    InverseMode mode = InverseMode::Map;
    int n_samples = 5;
    int burn_in = 50;
    int thinning = 10;
    InverseVariant variant = InverseVariant::WithPrior;
    // Unset means on for Map and off for Posterior.
    std::optional<bool> precondition;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
    bool preconditioned() const { return precondition.value_or(mode == InverseMode::Map); }
    nlohmann::json to_json() const;
    static InverseConfig from_json(const nlohmann::json& j);
};

// phi(z) = ||u* - F(D(z))||^2 + lambda ||z||^2 in standardized units with
// plain (unweighted) sums. The decoder D is G(z, u*) when a generator is
// given and the identity otherwise.
class LatentObjective {
public:
    LatentObjective(const FnoParams& surrogate, const FnoParams* generator, Field u_star_norm, double lambda);

    bool has_generator() const { return generator_ != nullptr; }
    const Field& u_star() const { return u_star_; }
    Field decode(const Field& z) const;
    // Data term ||u* - F(D(z))||^2.
    double data_term(const Field& z) const;
    double value(const Field& z) const;
    double value_and_grad(const Field& z, Field& grad) const;

private:
    const FnoParams& surrogate_;
    const FnoParams* generator_;
    Field u_star_;
    double lambda_;
};

struct LatentState {
    Field z; // q for the prior variants, the normalized design otherwise
    RngStream rng;
    std::size_t step = 0;
    std::vector<double> m, v; // preconditioner moments
};

// One update z <- z - gamma * P(grad phi) + sqrt(2 gamma) * xi (noise term
// only when `noise`). P is the identity, or the bias-corrected adaptive-moment
// rescaling when the config enables preconditioning.
void langevin_step(LatentState& state, const LatentObjective& objective, const InverseConfig& cfg, bool noise);

struct CandidateSolution {
    Field a;                      // design in physical units
    double surrogate_loss = 0.0;  // data term at the final state
    Field q_final;                // final latent (or normalized design)
    std::vector<double> trace;    // objective value before each step
    double seconds = 0.0;
};

struct InverseModels {
    const FnoParams* surrogate = nullptr;
    const PriorModel* prior = nullptr;
    ChannelStats a_stats, u_stats;
};

// Runs one inversion for target u_star (physical units). Map and the
// baselines return one candidate; Posterior returns n_samples decoded states
// taken every `thinning` steps after burn_in.
std::vector<CandidateSolution> run_inverse(const Field& u_star, const InverseModels& models, const InverseConfig& cfg);

} // namespace dgp
