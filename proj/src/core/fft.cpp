#include "core/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace dgp {
namespace {

// The FFTW planner is not reentrant; plans are created once and reused with
// the new-array execute functions, which are. FFTW_ESTIMATE keeps the chosen
// algorithm (and therefore the rounding) identical across runs.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

enum class PlanKind { ComplexFwd, ComplexInv, R2C, C2R };
using PlanKey = std::tuple<PlanKind, int, int, int>;

fftw_plan cached_plan(PlanKind kind, int ny, int nx, int howmany)
{
    static std::map<PlanKey, fftw_plan> cache;
    std::lock_guard lock(planner_mutex());
    const PlanKey key{kind, ny, nx, howmany};
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const std::size_t n = static_cast<std::size_t>(ny) * nx;
    fftw_plan plan = nullptr;
    switch (kind) {
    case PlanKind::ComplexFwd:
    case PlanKind::ComplexInv: {
        std::vector<fftw_complex> a(n * howmany), b(n * howmany);
        int dims[2] = {ny, nx};
        plan = fftw_plan_many_dft(2, dims, howmany, a.data(), nullptr, howmany, 1, b.data(), nullptr, howmany, 1,
                                  kind == PlanKind::ComplexFwd ? FFTW_FORWARD : FFTW_BACKWARD, flags);
        break;
    }
    case PlanKind::R2C: {
        std::vector<double> a(n);
        std::vector<fftw_complex> b(static_cast<std::size_t>(ny) * (nx / 2 + 1));
        plan = fftw_plan_dft_r2c_2d(ny, nx, a.data(), b.data(), flags);
        break;
    }
    case PlanKind::C2R: {
        std::vector<fftw_complex> a(static_cast<std::size_t>(ny) * (nx / 2 + 1));
        std::vector<double> b(n);
        plan = fftw_plan_dft_c2r_2d(ny, nx, a.data(), b.data(), flags);
        break;
    }
    }
    if (!plan) throw Error(ErrorCode::InvalidArgument, "FFTW failed to create a plan");
    cache.emplace(key, plan);
    return plan;
}

void require_spectral_input(const Grid& g)
{
    require(g.periodic(), "FFT requires a periodic grid");
}

// Per-axis spectral index map: list of (target index, weight) for a source
// index when moving between n_from and n_to points.
std::vector<std::pair<int, double>> axis_targets(int k, int n_from, int n_to)
{
    if (n_from == n_to) return {{k, 1.0}};
    const int s = signed_mode(k, n_from);
    if (n_to > n_from) {
        if (n_from % 2 == 0 && s == n_from / 2) return {{n_from / 2, 0.5}, {n_to - n_from / 2, 0.5}};
        return {{s >= 0 ? s : s + n_to, 1.0}};
    }
    const int limit = n_to / 2;
    if (s > limit || s < -limit) return {};
    if (n_to % 2 == 0 && (s == limit || s == -limit)) return {{limit, 1.0}};
    return {{s >= 0 ? s : s + n_to, 1.0}};
}

} // namespace

SpectralField fft2(const Field& f)
{
    require_spectral_input(f.grid());
    f.require_finite("fft2");
    const int ch = f.channels();
    SpectralField s{f.grid(), ch, std::vector<cplx>(f.size())};
    std::vector<cplx> in(f.values().begin(), f.values().end());
    fftw_plan plan = cached_plan(PlanKind::ComplexFwd, f.ny(), f.nx(), ch);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(s.coeffs.data()));
    return s;
}

Field ifft2(const SpectralField& s)
{
    require_spectral_input(s.grid);
    for (const cplx& c : s.coeffs)
        require(std::isfinite(c.real()) && std::isfinite(c.imag()), ErrorCode::NonFinite, "ifft2: non-finite coefficient");
    std::vector<cplx> in = s.coeffs, out(s.coeffs.size());
    fftw_plan plan = cached_plan(PlanKind::ComplexInv, s.grid.ny, s.grid.nx, s.channels);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    Field f(s.grid, s.channels);
    const double inv_n = 1.0 / static_cast<double>(s.grid.points());
    for (std::size_t i = 0; i < out.size(); ++i) f[i] = out[i].real() * inv_n;
    return f;
}

Field resample_spectral(const Field& f, const Grid& new_grid)
{
    require_spectral_input(f.grid());
    require_spectral_input(new_grid);
    const SpectralField src = fft2(f);
    const int ch = f.channels();
    SpectralField dst{new_grid, ch, std::vector<cplx>(new_grid.points() * ch)};
    const double scale = static_cast<double>(new_grid.points()) / static_cast<double>(f.grid().points());
    for (int ky = 0; ky < f.ny(); ++ky) {
        const auto ty = axis_targets(ky, f.ny(), new_grid.ny);
        if (ty.empty()) continue;
        for (int kx = 0; kx < f.nx(); ++kx) {
            const auto tx = axis_targets(kx, f.nx(), new_grid.nx);
            for (auto [iy, wy] : ty)
                for (auto [ix, wx] : tx)
                    for (int c = 0; c < ch; ++c) dst.at(iy, ix, c) += src.at(ky, kx, c) * (wy * wx * scale);
        }
    }
    return ifft2(dst);
}

RealFft2::RealFft2(int ny, int nx)
    : ny_(ny), nx_(nx),
      fwd_(cached_plan(PlanKind::R2C, ny, nx, 1)),
      inv_(cached_plan(PlanKind::C2R, ny, nx, 1))
{
}

void RealFft2::forward(std::span<const double> in, std::span<cplx> out) const
{
    fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft2::inverse(std::span<cplx> in, std::span<double> out) const
{
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

} // namespace dgp
