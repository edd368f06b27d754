#include "neuralop/grad_check.hpp"

#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dgp {

GradCheckReport grad_check(const FnoParams& params, const Field& input, const LossSpec& loss, const GradCheckOptions& opt)
{
    require(opt.epsilon > 0.0 && std::isfinite(opt.epsilon), "grad_check epsilon must be positive");
    return grad_check_against(params, input, loss, fno_grad(params, input, loss), opt);
}

GradCheckReport grad_check_against(const FnoParams& params, const Field& input, const LossSpec& loss,
                                   const GradientBundle& analytic, const GradCheckOptions& opt)
{
    require(opt.epsilon > 0.0 && std::isfinite(opt.epsilon), "grad_check epsilon must be positive");
    require(opt.tolerance > 0.0, "grad_check tolerance must be positive");
    const std::size_t np = params.size();
    const std::size_t total = np + input.size();

    std::vector<std::size_t> coords(total);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (total > opt.max_coords) {
        RngStream rng(opt.seed, 0x67c);
        for (std::size_t i = 0; i < opt.max_coords; ++i) std::swap(coords[i], coords[i + rng.below(total - i)]);
        coords.resize(opt.max_coords);
        std::sort(coords.begin(), coords.end());
    }

    GradCheckReport rep;
    FnoParams p = params;
    Field x = input;
    for (std::size_t idx : coords) {
        double* slot = idx < np ? &p.values[idx] : &x[idx - np];
        const double saved = *slot;
        *slot = saved + opt.epsilon;
        const double up = fno_loss(p, x, loss);
        *slot = saved - opt.epsilon;
        const double down = fno_loss(p, x, loss);
        *slot = saved;
        const double fd = (up - down) / (2.0 * opt.epsilon);
        const double a = idx < np ? analytic.d_params[idx] : analytic.d_input[idx - np];
        const double denom = std::max({std::abs(a), std::abs(fd), opt.abs_floor});
        const double rel = std::abs(a - fd) / denom;
        const std::string name = idx < np ? params.layout.describe(idx) : "input[" + std::to_string(idx - np) + "]";
        if (!(rel <= opt.tolerance)) rep.failures.push_back({name, a, fd, rel});
        if (rel > rep.max_rel_error || rep.checked == 0 || std::isnan(rel)) {
            rep.max_rel_error = std::isnan(rel) ? INFINITY : std::max(rep.max_rel_error, rel);
            rep.worst_coordinate = name;
        }
        ++rep.checked;
    }
    rep.passed = rep.failures.empty();
    return rep;
}

} // namespace dgp
