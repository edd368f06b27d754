#include "doctest.h"

#include "grf/grf.hpp"
#include "solvers/darcy.hpp"
#include "solvers/litho.hpp"
#include "solvers/navier_stokes.hpp"
#include "core/fft.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace dgp;
using std::numbers::pi;

namespace {

double manufactured_error(int n)
{
    const Grid g = Grid::square(n, Boundary::DirichletZero);
    const Field exact = Field::sample(g, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
    DarcyProblem p{Field(g, 1, 1.0), scaled(exact, 2.0 * pi * pi)};
    return dgp::test::max_abs_diff(solve_darcy(p), exact);
}

} // namespace

TEST_CASE("Darcy: homogeneous problem gives zero")
{
    const Grid g = Grid::square(16, Boundary::DirichletZero);
    const Field u = solve_darcy(DarcyProblem{Field(g, 1, 3.0), Field(g, 1, 0.0)});
    CHECK(dgp::test::max_abs(u) == 0.0);
}

TEST_CASE("Darcy: second-order convergence on a manufactured solution")
{
    double prev = manufactured_error(16);
    for (int n : {32, 64, 128}) {
        const double e = manufactured_error(n);
        INFO("n = " << n << " ratio " << prev / e);
        CHECK(prev / e >= 3.5);
        CHECK(prev / e <= 4.5);
        prev = e;
    }
}

TEST_CASE("Darcy: x<->y symmetric data gives a symmetric solution and the energy identity holds")
{
    const int n = 24;
    const Grid g = Grid::square(n, Boundary::DirichletZero);
    RngStream rng(4, 0);
    Field a = sample_grf(GrfSpec{2.0, 3.0, PsiMode::exp()}, g, rng);
    Field sym(g, 1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) sym.at(j, i) = 0.5 * (a.at(j, i) + a.at(i, j));
    const DarcyProblem p = DarcyProblem::with_unit_source(sym);
    const Field u = solve_darcy(p);
    double asym = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) asym = std::max(asym, std::abs(u.at(j, i) - u.at(i, j)));
    CHECK(asym < 1e-9);

    const double uau = dot(u, darcy_apply(sym, u));
    double uf = 0.0;
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) uf += u.at(j, i);
    CHECK(uau > 0.0);
    CHECK(std::abs(uau - uf) / uf < 1e-8);
}

TEST_CASE("Darcy: error paths")
{
    const Grid g = Grid::square(16, Boundary::DirichletZero);
    Field a(g, 1, 1.0);
    a.at(3, 3) = 0.0;
    CHECK_THROWS_AS(solve_darcy(DarcyProblem::with_unit_source(a)), Error);
    try {
        DarcyOptions opt;
        opt.max_iter = 2;
        solve_darcy(DarcyProblem::with_unit_source(Field(g, 1, 1.0)), opt);
        FAIL("expected a solver failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SolverFailure);
    }
    CHECK_THROWS_AS(solve_darcy(DarcyProblem::with_unit_source(Field(Grid::square(16), 1, 1.0))), Error);
}

TEST_CASE("vorticity to velocity")
{
    const Grid g = Grid::square(32);
    CHECK(dgp::test::max_abs(vorticity_to_velocity(Field(g, 1))) == 0.0);

    const Field w = Field::sample(g, [](double x, double) { return std::cos(2 * pi * x); });
    const Field uv = vorticity_to_velocity(w);
    for (int iy = 0; iy < 32; ++iy)
        for (int ix = 0; ix < 32; ++ix) {
            CHECK(std::abs(uv.at(iy, ix, 0)) < 1e-10);
            CHECK(std::abs(uv.at(iy, ix, 1) - std::sin(2 * pi * g.x(ix)) / (2 * pi)) < 1e-10);
        }

    RngStream rng(5, 0);
    const Field r = dgp::test::random_field(g, 1, rng);
    CHECK(dgp::test::max_abs(spectral_divergence(vorticity_to_velocity(r))) <= 1e-10);
    CHECK_THROWS_AS(vorticity_to_velocity(Field(Grid::square(8, Boundary::Neumann), 1)), Error);
}

TEST_CASE("NS: zero stays zero")
{
    NsConfig cfg;
    cfg.T = 0.1;
    cfg.n_snapshots = 2;
    const NsTrajectory t = solve_ns(Field(Grid::square(16), 1), cfg);
    REQUIRE(t.snapshots.size() == 2);
    CHECK(t.times[1] == doctest::Approx(0.1));
    for (const auto& s : t.snapshots) CHECK(dgp::test::max_abs(s) == 0.0);
}

TEST_CASE("NS: single Fourier mode decays at the exact heat rate")
{
    const Grid g = Grid::square(32);
    const Field w0 = Field::sample(g, [](double x, double y) { return std::cos(2 * pi * (x + y)); });
    NsConfig cfg;
    cfg.nu = 1e-2;
    cfg.T = 1.0;
    cfg.dt = 1e-3;
    cfg.n_snapshots = 1;
    const Field wT = solve_ns(w0, cfg).final_state();
    const double decay = std::exp(-8.0 * pi * pi * cfg.nu * cfg.T);
    CHECK(dgp::test::max_abs_diff(wT, scaled(w0, decay)) / decay < 1e-3);
}

TEST_CASE("NS: unforced enstrophy is non-increasing and forced mean evolves exactly")
{
    const Grid g = Grid::square(32);
    RngStream rng(6, 0);
    const Field w0 = sample_grf(GrfSpec{2.5, 7.0, PsiMode::identity()}, g, rng);
    const Field w0s = scaled(w0, 1.0 / dgp::test::max_abs(w0)); // O(1) vorticity exercises the nonlinearity
    NsConfig cfg;
    cfg.T = 0.5;
    cfg.n_snapshots = 10;
    const NsTrajectory t = solve_ns(w0s, cfg);
    double prev = sum_squares(w0s);
    for (const auto& s : t.snapshots) {
        const double e = sum_squares(s);
        CHECK(e <= prev);
        prev = e;
    }

    Field forcing = ns_default_forcing(g);
    for (double& v : forcing.storage()) v += 0.3;
    cfg.forcing = forcing;
    const NsTrajectory tf = solve_ns(w0s, cfg);
    auto mean = [](const Field& f) {
        double s = 0.0;
        for (double v : f.values()) s += v;
        return s / static_cast<double>(f.size());
    };
    for (std::size_t j = 0; j < tf.snapshots.size(); ++j)
        CHECK(std::abs(mean(tf.snapshots[j]) - (mean(w0s) + tf.times[j] * 0.3)) < 1e-12);
}

TEST_CASE("NS: refinement of a band-limited state leaves the solution unchanged")
{
    RngStream rng(7, 0);
    const Field coarse = dgp::test::band_limited_field(Grid::square(32), 5, rng);
    const Field fine = resample_spectral(coarse, Grid::square(64));
    NsConfig cfg;
    cfg.T = 0.5;
    cfg.n_snapshots = 1;
    cfg.forcing = ns_default_forcing(Grid::square(32));
    const Field a = solve_ns(coarse, cfg).final_state();
    cfg.forcing = ns_default_forcing(Grid::square(64));
    const Field b = resample_spectral(solve_ns(fine, cfg).final_state(), Grid::square(32));
    CHECK(l2_norm(axpy(-1.0, a, b)) / l2_norm(b) < 1e-3);
}

TEST_CASE("NS: CFL violation names the step")
{
    const Grid g = Grid::square(32);
    const Field w0 = Field::sample(g, [](double x, double y) { return 1e4 * std::sin(2 * pi * x) * std::cos(2 * pi * y); });
    NsConfig cfg;
    cfg.T = 0.01;
    try {
        solve_ns(w0, cfg);
        FAIL("expected CFL violation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CflViolation);
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
}

TEST_CASE("litho forward model")
{
    const Grid g = Grid::square(32);
    LithoConfig cfg;
    const Field dark = litho_forward(Field(g, 1, 0.0), cfg, false);
    const Field image = litho_resist_image(Field(g, 1, 1.0), cfg);
    const Field bright = litho_forward(Field(g, 1, 1.0), cfg, false);
    for (double v : dark.values()) CHECK(v == 0.0);
    for (double v : image.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : bright.values()) CHECK(v == 1.0);

    Field bad(g, 1, 0.5);
    bad[0] = 1.1;
    CHECK_THROWS_AS(litho_forward(bad, cfg, false), Error);
}

TEST_CASE("soft resist converges to the hard threshold away from the contour")
{
    const Grid g = Grid::square(64);
    RngStream rng(8, 0);
    LithoConfig cfg;
    cfg.beta = 0.01;
    for (int trial = 0; trial < 3; ++trial) {
        Field mask(g, 1, 0.0);
        for (int r = 0; r < 4; ++r) {
            const int x0 = static_cast<int>(rng.below(48)), y0 = static_cast<int>(rng.below(48));
            const int w = 6 + static_cast<int>(rng.below(10)), h = 6 + static_cast<int>(rng.below(10));
            for (int iy = y0; iy < std::min(64, y0 + h); ++iy)
                for (int ix = x0; ix < std::min(64, x0 + w); ++ix) mask.at(iy, ix) = 1.0;
        }
        const Field hard = litho_forward(mask, cfg, false), soft = litho_forward(mask, cfg, true);
        for (double v : hard.values()) CHECK((v == 0.0 || v == 1.0));
        // Pixels within 2 of a hard-contour change are excluded.
        for (int iy = 0; iy < 64; ++iy)
            for (int ix = 0; ix < 64; ++ix) {
                bool near = false;
                for (int dy = -2; dy <= 2 && !near; ++dy)
                    for (int dx = -2; dx <= 2 && !near; ++dx)
                        near = hard.at((iy + dy + 64) % 64, (ix + dx + 64) % 64) != hard.at(iy, ix);
                if (!near) CHECK(std::abs(soft.at(iy, ix) - hard.at(iy, ix)) <= 0.05);
            }
    }
}
