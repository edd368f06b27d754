#include "solvers/navier_stokes.hpp"

#include "core/fft.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dgp {

using std::numbers::pi;

void NsConfig::validate(const Grid& grid) const
{
    require(nu > 0.0 && T > 0.0 && dt > 0.0, "NS nu, T and dt must be positive");
    require(dt <= T, "NS dt must not exceed T");
    require(n_snapshots >= 1, "NS needs at least one snapshot");
    if (forcing.channels() > 0) {
        require(forcing.grid() == grid && forcing.channels() == 1, ErrorCode::ShapeMismatch,
                "NS forcing must match the vorticity grid");
        forcing.require_finite("NS forcing");
    }
}

Field ns_default_forcing(const Grid& grid)
{
    return Field::sample(grid, [](double x, double y) {
        return 0.1 * (std::sin(2.0 * pi * (x + y)) + std::cos(2.0 * pi * (x + y)));
    });
}

namespace {

// Half-spectrum wavenumbers 2 pi k with the Nyquist derivative zeroed.
struct Wavenumbers {
    int ny, nx, hx;
    std::vector<double> kx, ky;
    std::vector<char> keep; // 2/3-rule mask over the half spectrum

    Wavenumbers(int ny_, int nx_) : ny(ny_), nx(nx_), hx(nx_ / 2 + 1), kx(hx), ky(ny_), keep(static_cast<std::size_t>(ny_) * hx)
    {
        for (int i = 0; i < hx; ++i) kx[i] = (nx % 2 == 0 && i == nx / 2) ? 0.0 : 2.0 * pi * i;
        for (int j = 0; j < ny; ++j) {
            const int s = signed_mode(j, ny);
            ky[j] = (ny % 2 == 0 && j == ny / 2) ? 0.0 : 2.0 * pi * s;
        }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < hx; ++i) keep[j * hx + i] = (3 * std::abs(signed_mode(j, ny)) < ny) && (3 * i < nx);
    }

    double k2(int j, int i) const
    {
        const double a = 2.0 * pi * signed_mode(j, ny), b = 2.0 * pi * i;
        return a * a + b * b;
    }
};

void require_torus(const Field& w)
{
    require(w.grid().periodic(), "vorticity fields require a periodic grid");
    require(w.channels() == 1, ErrorCode::ShapeMismatch, "vorticity must be single-channel");
}

} // namespace

Field vorticity_to_velocity(const Field& w)
{
    require_torus(w);
    w.require_finite("vorticity_to_velocity");
    const int ny = w.ny(), nx = w.nx();
    const RealFft2 fft(ny, nx);
    const Wavenumbers k(ny, nx);
    std::vector<cplx> wh(fft.half_size()), uh(fft.half_size()), vh(fft.half_size());
    fft.forward(w.values(), wh);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < k.hx; ++i) {
            const std::size_t p = static_cast<std::size_t>(j) * k.hx + i;
            const double kk = k.k2(j, i);
            const cplx psi = kk > 0.0 ? wh[p] / kk : cplx(0.0);
            uh[p] = cplx(0.0, k.ky[j]) * psi;
            vh[p] = -cplx(0.0, k.kx[i]) * psi;
        }
    Field out(w.grid(), 2);
    std::vector<double> tmp(w.grid().points());
    const double inv_n = 1.0 / static_cast<double>(w.grid().points());
    fft.inverse(uh, tmp);
    for (std::size_t p = 0; p < tmp.size(); ++p) out[2 * p] = tmp[p] * inv_n;
    fft.inverse(vh, tmp);
    for (std::size_t p = 0; p < tmp.size(); ++p) out[2 * p + 1] = tmp[p] * inv_n;
    return out;
}

Field spectral_divergence(const Field& uv)
{
    require(uv.grid().periodic() && uv.channels() == 2, ErrorCode::ShapeMismatch, "divergence needs a periodic 2-channel field");
    const int ny = uv.ny(), nx = uv.nx();
    const RealFft2 fft(ny, nx);
    const Wavenumbers k(ny, nx);
    std::vector<cplx> uh(fft.half_size()), vh(fft.half_size());
    fft.forward(uv.channel(0).values(), uh);
    fft.forward(uv.channel(1).values(), vh);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < k.hx; ++i) {
            const std::size_t p = static_cast<std::size_t>(j) * k.hx + i;
            uh[p] = cplx(0.0, k.kx[i]) * uh[p] + cplx(0.0, k.ky[j]) * vh[p];
        }
    Field div(uv.grid(), 1);
    fft.inverse(uh, div.values());
    for (double& v : div.storage()) v /= static_cast<double>(uv.grid().points());
    return div;
}

NsTrajectory solve_ns(const Field& w0, const NsConfig& cfg)
{
    require_torus(w0);
    w0.require_finite("solve_ns initial vorticity");
    require(w0.nx() == w0.ny(), "solve_ns requires a square grid");
    cfg.validate(w0.grid());

    const int n = w0.nx();
    const std::size_t npts = w0.grid().points();
    const double inv_n = 1.0 / static_cast<double>(npts);
    const RealFft2 fft(n, n);
    const Wavenumbers k(n, n);
    const std::size_t hs = fft.half_size();

    const long steps = std::lround(cfg.T / cfg.dt);
    require(steps >= 1 && std::abs(steps * cfg.dt - cfg.T) <= 1e-9 * cfg.T, "NS T must be an integer multiple of dt");

    std::vector<cplx> w_hat(hs), f_hat(hs, cplx(0.0)), nl_prev(hs), nl(hs);
    fft.forward(w0.values(), w_hat);
    if (cfg.forcing.channels() > 0) fft.forward(cfg.forcing.values(), f_hat);

    std::vector<double> lhs(hs), rhs_diff(hs);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < k.hx; ++i) {
            const double a = 0.5 * cfg.nu * cfg.dt * k.k2(j, i);
            lhs[j * k.hx + i] = 1.0 / (1.0 + a);
            rhs_diff[j * k.hx + i] = 1.0 - a;
        }

    std::vector<cplx> bu(hs), bv(hs), bwx(hs), bwy(hs);
    std::vector<double> u(npts), v(npts), wx(npts), wy(npts), prod(npts);
    const double h = 1.0 / n;

    // Explicit tendency -u.grad(w) + f in spectral space.
    auto tendency = [&](long step, std::vector<cplx>& out) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < k.hx; ++i) {
                const std::size_t p = static_cast<std::size_t>(j) * k.hx + i;
                if (!k.keep[p]) {
                    bu[p] = bv[p] = bwx[p] = bwy[p] = cplx(0.0);
                    continue;
                }
                const double kk = k.k2(j, i);
                const cplx psi = kk > 0.0 ? w_hat[p] / kk : cplx(0.0);
                bu[p] = cplx(0.0, k.ky[j]) * psi;
                bv[p] = -cplx(0.0, k.kx[i]) * psi;
                bwx[p] = cplx(0.0, k.kx[i]) * w_hat[p];
                bwy[p] = cplx(0.0, k.ky[j]) * w_hat[p];
            }
        fft.inverse(bu, u);
        fft.inverse(bv, v);
        fft.inverse(bwx, wx);
        fft.inverse(bwy, wy);
        double cfl = 0.0;
        for (std::size_t p = 0; p < npts; ++p) {
            u[p] *= inv_n;
            v[p] *= inv_n;
            prod[p] = u[p] * wx[p] * inv_n + v[p] * wy[p] * inv_n;
            cfl = std::max(cfl, cfg.dt * (std::abs(u[p]) + std::abs(v[p])) / h);
        }
        if (!std::isfinite(cfl)) {
            std::ostringstream os;
            os << "NS solution diverged (non-finite velocity) at step " << step;
            throw Error(ErrorCode::Divergence, os.str());
        }
        if (cfl > 0.5) {
            std::ostringstream os;
            os << "NS advective CFL " << cfl << " exceeds 0.5 at step " << step;
            throw Error(ErrorCode::CflViolation, os.str());
        }
        fft.forward(prod, out);
        for (std::size_t p = 0; p < hs; ++p) out[p] = k.keep[p] ? f_hat[p] - out[p] : f_hat[p];
        // u.grad(w) = div(u w) has zero mean.
        out[0] = f_hat[0];
    };

    NsTrajectory traj;
    std::vector<long> snap_steps(cfg.n_snapshots);
    for (int s = 0; s < cfg.n_snapshots; ++s) snap_steps[s] = std::lround(static_cast<double>(steps) * (s + 1) / cfg.n_snapshots);

    std::vector<cplx> scratch(hs);
    std::size_t next_snap = 0;
    for (long step = 1; step <= steps; ++step) {
        tendency(step, nl);
        const bool first = step == 1;
        for (std::size_t p = 0; p < hs; ++p) {
            const cplx explicit_part = first ? nl[p] : 1.5 * nl[p] - 0.5 * nl_prev[p];
            w_hat[p] = (rhs_diff[p] * w_hat[p] + cfg.dt * explicit_part) * lhs[p];
        }
        std::swap(nl, nl_prev);
        if (!std::isfinite(w_hat[0].real()) || !std::isfinite(std::norm(w_hat[hs / 2]))) {
            std::ostringstream os;
            os << "NS solution diverged at step " << step;
            throw Error(ErrorCode::Divergence, os.str());
        }
        while (next_snap < snap_steps.size() && snap_steps[next_snap] == step) {
            Field w(w0.grid(), 1);
            scratch = w_hat;
            fft.inverse(scratch, w.values());
            for (double& x : w.storage()) x *= inv_n;
            if (!w.all_finite()) {
                std::ostringstream os;
                os << "NS solution diverged at step " << step;
                throw Error(ErrorCode::Divergence, os.str());
            }
            traj.snapshots.push_back(std::move(w));
            traj.times.push_back(cfg.T * static_cast<double>(next_snap + 1) / cfg.n_snapshots);
            ++next_snap;
        }
    }
    return traj;
}

} // namespace dgp
