#include "grf/grf.hpp"

#include "core/fft.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace dgp {

using std::numbers::pi;

std::string to_string(PsiKind k)
{
    switch (k) {
    case PsiKind::Clip: return "clip";
    case PsiKind::Exp: return "exp";
    case PsiKind::Identity: return "identity";
    }
    return "identity";
}

PsiKind psi_kind_from_string(const std::string& s)
{
    if (s == "clip") return PsiKind::Clip;
    if (s == "exp") return PsiKind::Exp;
    if (s == "identity") return PsiKind::Identity;
    throw Error(ErrorCode::InvalidArgument, "unknown psi mode '" + s + "'");
}

void GrfSpec::validate() const
{
    require(alpha > 0.0 && std::isfinite(alpha), "GRF alpha must be positive");
    require(tau > 0.0 && std::isfinite(tau), "GRF tau must be positive");
    if (psi.kind == PsiKind::Clip) require(psi.low < psi.high, "psi clip requires low < high");
}

void GrfHyperPrior::validate() const
{
    require(alpha_range.first <= alpha_range.second, "alpha range must satisfy lo <= hi");
    require(tau_range.first <= tau_range.second, "tau range must satisfy lo <= hi");
    require(alpha_range.first > 0.0 && tau_range.first > 0.0, "GRF hyper-prior ranges must be positive");
}

GrfSpec GrfHyperPrior::draw(RngStream& rng, PsiMode psi) const
{
    GrfSpec s;
    s.alpha = alpha_range.first + (alpha_range.second - alpha_range.first) * rng.uniform();
    s.tau = tau_range.first + (tau_range.second - tau_range.first) * rng.uniform();
    s.psi = psi;
    return s;
}

double grf_mode_std(const GrfSpec& spec, int k1, int k2, Boundary boundary)
{
    const double scale = boundary == Boundary::Periodic ? 4.0 * pi * pi : pi * pi;
    const double lambda = scale * static_cast<double>(k1 * k1 + k2 * k2);
    return std::pow(lambda + spec.tau * spec.tau, -0.5 * spec.alpha);
}

namespace {

Field sample_cosine(const GrfSpec& spec, const Grid& grid, RngStream& rng)
{
    const int n = grid.nx;
    Eigen::MatrixXd basis(n, n); // basis(i, k) = c_k cos(pi k x_i)
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) basis(i, k) = (k == 0 ? 1.0 : std::numbers::sqrt2) * std::cos(pi * k * grid.x(i));

    Eigen::MatrixXd coeff(n, n); // coeff(k2, k1)
    for (int k2 = 0; k2 < n; ++k2)
        for (int k1 = 0; k1 < n; ++k1) coeff(k2, k1) = rng.normal() * grf_mode_std(spec, k1, k2, grid.boundary);

    const Eigen::MatrixXd values = basis * coeff * basis.transpose(); // (iy, ix)
    Field f(grid, 1);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) f.at(iy, ix) = values(iy, ix);
    return f;
}

Field sample_torus(const GrfSpec& spec, const Grid& grid, RngStream& rng)
{
    const int n = grid.nx;
    const double npts = static_cast<double>(grid.points());
    SpectralField s{grid, 1, std::vector<cplx>(grid.points())};
    s.at(0, 0) = npts * grf_mode_std(spec, 0, 0, grid.boundary) * rng.normal();
    const int kmax = (n - 1) / 2; // excludes the Nyquist bin for even n
    for (int ky = 0; ky <= kmax; ++ky) {
        for (int kx = -kmax; kx <= kmax; ++kx) {
            if (ky == 0 && kx <= 0) continue;
            const double sd = grf_mode_std(spec, kx, ky, grid.boundary);
            const double c = rng.normal(), sn = rng.normal();
            const cplx z = npts * sd * cplx(c, -sn) / std::numbers::sqrt2;
            s.at(ky, (kx + n) % n) = z;
            s.at((n - ky) % n, (n - kx) % n) = std::conj(z);
        }
    }
    return ifft2(s);
}

} // namespace

Field sample_grf(const GrfSpec& spec, const Grid& grid, RngStream& rng)
{
    spec.validate();
    require(grid.nx == grid.ny, "sample_grf requires a square grid");
    Field f = grid.periodic() ? sample_torus(spec, grid, rng) : sample_cosine(spec, grid, rng);
    return apply_psi(f, spec.psi);
}

double apply_psi(double x, const PsiMode& mode)
{
    switch (mode.kind) {
    case PsiKind::Clip: return x >= 0.0 ? mode.high : mode.low;
    case PsiKind::Exp: return std::exp(x);
    case PsiKind::Identity: return x;
    }
    return x;
}

Field apply_psi(const Field& f, const PsiMode& mode)
{
    if (mode.kind == PsiKind::Identity) return f;
    Field out = f;
    for (double& v : out.storage()) v = apply_psi(v, mode);
    return out;
}

} // namespace dgp
