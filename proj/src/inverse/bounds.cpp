#include "inverse/bounds.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <limits>

namespace dgp {

double lipschitz_estimate(const ForwardMap& f, const std::vector<std::pair<Field, Field>>& pairs)
{
    double best = 0.0;
    for (const auto& [a, b] : pairs) {
        const double da = l2_norm(axpy(-1.0, b, a));
        if (da == 0.0) continue;
        best = std::max(best, l2_norm(axpy(-1.0, f(b), f(a))) / da);
    }
    return best;
}

BoundDiagnostics bound_diagnostics(const BoundInputs& in, RngStream& rng)
{
    require(static_cast<bool>(in.true_solver), "bounds: a true solver is required");
    require(in.surrogate && in.sample_design, "bounds: surrogate and design sampler are required");
    require(in.n_probes >= 1 && in.n_pairs >= 1 && in.n_restarts >= 1, "bounds: probe counts must be >= 1");

    BoundDiagnostics d;
    for (int i = 0; i < in.n_probes; ++i) {
        const Field a = in.sample_design(rng);
        d.eps_F = std::max(d.eps_F, l2_norm(axpy(-1.0, in.surrogate(a), in.true_solver(a))));
    }
    std::vector<std::pair<Field, Field>> pairs;
    for (int i = 0; i < in.n_pairs; ++i) {
        Field a = in.sample_design(rng);
        pairs.emplace_back(std::move(a), in.sample_design(rng));
    }
    d.lipschitz_F = lipschitz_estimate(in.surrogate, pairs);

    const Field true_hat = in.true_solver(in.candidate);
    const Field sur_hat = in.surrogate(in.candidate);
    d.loss_candidate = l2_norm(axpy(-1.0, in.u_star, true_hat));
    d.residual = dot(axpy(-1.0, in.u_star, sur_hat), axpy(-1.0, sur_hat, true_hat));

    if (in.a_ref) {
        double eg = std::numeric_limits<double>::infinity();
        for (int i = 0; i < in.n_restarts; ++i)
            eg = std::min(eg, l2_norm(axpy(-1.0, *in.a_ref, in.sample_design(rng))));
        d.eps_G = eg;
        d.loss_ref = l2_norm(axpy(-1.0, in.u_star, in.true_solver(*in.a_ref)));
        d.bound_value = *d.loss_ref + d.lipschitz_F * eg + 2.0 * d.eps_F;
    }
    return d;
}

} // namespace dgp
