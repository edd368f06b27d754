#include "solvers/litho.hpp"

#include "core/fft.hpp"

#include <cmath>
#include <numbers>

namespace dgp {

void LithoConfig::validate() const
{
    require(sigma_optical > 0.0 && sigma_resist > 0.0 && beta > 0.0, "litho widths and beta must be positive");
    require(tau_resist > 0.0 && tau_resist < 1.0, "litho resist threshold must lie in (0, 1)");
}

Field gaussian_blur(const Field& f, double sigma)
{
    require(f.grid().periodic() && f.channels() == 1, "gaussian_blur needs a periodic single-channel field");
    const int ny = f.ny(), nx = f.nx();
    const RealFft2 fft(ny, nx);
    std::vector<cplx> spec(fft.half_size());
    fft.forward(f.values(), spec);
    const double c = 2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma;
    const int hx = fft.half_nx();
    for (int j = 0; j < ny; ++j) {
        const double fy = static_cast<double>(signed_mode(j, ny)) / ny;
        for (int i = 0; i < hx; ++i) {
            const double fx = static_cast<double>(i) / nx;
            spec[static_cast<std::size_t>(j) * hx + i] *= std::exp(-c * (fx * fx + fy * fy)) / static_cast<double>(f.grid().points());
        }
    }
    Field out(f.grid(), 1);
    fft.inverse(spec, out.values());
    return out;
}

Field litho_resist_image(const Field& mask, const LithoConfig& cfg)
{
    cfg.validate();
    require(mask.channels() == 1, ErrorCode::ShapeMismatch, "mask must be single-channel");
    mask.require_finite("litho mask");
    for (double m : mask.values())
        require(m >= -1e-9 && m <= 1.0 + 1e-9, "mask values must lie in [0, 1]");
    return gaussian_blur(gaussian_blur(mask, cfg.sigma_optical), cfg.sigma_resist);
}

Field litho_forward(const Field& mask, const LithoConfig& cfg, bool soft)
{
    Field r = litho_resist_image(mask, cfg);
    for (double& v : r.storage()) {
        if (soft)
            v = 1.0 / (1.0 + std::exp(-(v - cfg.tau_resist) / cfg.beta));
        else
            v = v > cfg.tau_resist ? 1.0 : 0.0;
    }
    return r;
}

} // namespace dgp
