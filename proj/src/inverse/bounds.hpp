#pragma once

#include "core/field.hpp"
#include "core/rng.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace dgp {

using ForwardMap = std::function<Field(const Field&)>;
// Draws one design from the generator at a fresh latent.
using DesignSampler = std::function<Field(RngStream&)>;

struct BoundInputs {
    ForwardMap surrogate;
    ForwardMap true_solver;
    DesignSampler sample_design;
    Field u_star;
    Field candidate;             // design under test
    std::optional<Field> a_ref;  // reference design, if one is known
    int n_probes = 8;
    int n_pairs = 8;
    int n_restarts = 8;
};

struct BoundDiagnostics {
    double eps_F = 0.0;
    double lipschitz_F = 0.0;            // lower bound on the true constant
    std::optional<double> eps_G;
    std::optional<double> loss_ref;
    std::optional<double> bound_value;
    double loss_candidate = 0.0;         // ||true(a_hat) - u*||
    double residual = 0.0;               // <F(a_hat) - u*, true(a_hat) - F(a_hat)>
};

// Max ratio ||F(a_i) - F(b_i)|| / ||a_i - b_i|| over the given pairs; pairs
// with identical designs are skipped.
double lipschitz_estimate(const ForwardMap& f, const std::vector<std::pair<Field, Field>>& pairs);

BoundDiagnostics bound_diagnostics(const BoundInputs& in, RngStream& rng);

} // namespace dgp
