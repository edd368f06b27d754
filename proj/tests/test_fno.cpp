#include "doctest.h"

#include "core/fft.hpp"
#include "neuralop/fno.hpp"
#include "neuralop/grad_check.hpp"
#include "test_util.hpp"

#include <cmath>
#include <filesystem>

using namespace dgp;
using dgp::test::band_limited_field;
using dgp::test::max_abs_diff;
using dgp::test::random_field;

namespace {

FnoConfig small_config(int width, int modes, int layers = 2, Activation act = Activation::Gelu)
{
    FnoConfig c;
    c.layers = layers;
    c.width = width;
    c.modes = modes;
    c.proj_hidden = 6;
    c.activation = act;
    return c;
}

// Coincident samples of a 2n grid field on the n grid.
Field subsample(const Field& fine, const Grid& coarse)
{
    Field out(coarse, fine.channels());
    const int r = fine.nx() / coarse.nx;
    for (int iy = 0; iy < coarse.ny; ++iy)
        for (int ix = 0; ix < coarse.nx; ++ix)
            for (int c = 0; c < fine.channels(); ++c) out.at(iy, ix, c) = fine.at(iy * r, ix * r, c);
    return out;
}

double rel_l2(const Field& a, const Field& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

} // namespace

TEST_CASE("zero network outputs zero")
{
    const FnoParams p = FnoParams::zeros(small_config(4, 3));
    RngStream rng(1, 0);
    const Field y = fno_forward(p, random_field(Grid::square(8), 1, rng));
    CHECK(dgp::test::max_abs(y) == 0.0);
}

TEST_CASE("pass-through single layer equals FFT truncation")
{
    FnoConfig c = small_config(1, 3, 1, Activation::Identity);
    c.proj_hidden = 1;
    FnoParams p = FnoParams::zeros(c);
    p.values[p.layout.lift_w] = 1.0; // input channel -> hidden channel 0
    for (std::size_t s = 0; s < p.layout.mode_count; ++s) p.values[p.layout.layers[0].r_re + s] = 1.0;
    p.values[p.layout.proj1_w] = 1.0;
    p.values[p.layout.proj2_w] = 1.0;

    RngStream rng(2, 0);
    const Field x = random_field(Grid::square(16), 1, rng);
    SpectralField s = fft2(x);
    for (int ky = 0; ky < 16; ++ky)
        for (int kx = 0; kx < 16; ++kx)
            if (std::abs(signed_mode(kx, 16)) >= 3 || std::abs(signed_mode(ky, 16)) >= 3) s.at(ky, kx) = 0.0;
    CHECK(max_abs_diff(fno_forward(p, x), ifft2(s)) < 1e-10);
}

TEST_CASE("resolution transfer")
{
    RngStream rng(3, 0);
    const Field coarse_in = band_limited_field(Grid::square(32), 8, rng);
    const Field fine_in = resample_spectral(coarse_in, Grid::square(64));

    SUBCASE("single spectral layer is exact at coincident points")
    {
        FnoConfig c = small_config(6, 8, 1);
        RngStream init(4, 0);
        const FnoParams p = FnoParams::init(c, init);
        const Field a = fno_forward(p, coarse_in);
        const Field b = subsample(fno_forward(p, fine_in), Grid::square(32));
        CHECK(max_abs_diff(a, b) < 1e-10);
    }
    SUBCASE("four Gelu layers agree within 5%")
    {
        FnoConfig c = small_config(8, 8, 4);
        RngStream init(5, 0);
        const FnoParams p = FnoParams::init(c, init);
        const Field a = fno_forward(p, coarse_in);
        const Field b = subsample(fno_forward(p, fine_in), Grid::square(32));
        CHECK(rel_l2(a, b) < 0.05);
    }
    SUBCASE("scalar head changes by less than 5%")
    {
        FnoConfig c = small_config(8, 8, 4);
        c.head = HeadKind::ScalarFunctional;
        RngStream init(6, 0);
        const FnoParams p = FnoParams::init(c, init);
        const double a = fno_forward_scalar(p, coarse_in), b = fno_forward_scalar(p, fine_in);
        CHECK(std::abs(a - b) < 0.05 * std::abs(b));
    }
}

TEST_CASE("identity activation makes the network affine")
{
    RngStream rng(7, 0);
    const FnoParams p = FnoParams::init(small_config(5, 3, 3, Activation::Identity), rng);
    const Grid g = Grid::square(8);
    const Field x = random_field(g, 1, rng), y = random_field(g, 1, rng), zero(g, 1);
    const double alpha = 0.7, beta = -1.3;
    const Field lhs = fno_forward(p, axpy(alpha, x, scaled(y, beta)));
    Field rhs = axpy(alpha, fno_forward(p, x), scaled(fno_forward(p, y), beta));
    rhs = axpy(-(alpha + beta - 1.0), fno_forward(p, zero), rhs);
    CHECK(max_abs_diff(lhs, rhs) < 1e-10);
}

TEST_CASE("gradients vanish at an exact minimum")
{
    RngStream rng(8, 0);
    const FnoParams p = FnoParams::init(small_config(4, 3), rng);
    const Field x = random_field(Grid::square(8), 1, rng);
    const GradientBundle g = fno_grad(p, x, LossSpec::squared_l2(fno_forward(p, x)));
    CHECK(g.loss_value == 0.0);
    for (double v : g.d_params) CHECK(v == 0.0);
    CHECK(dgp::test::max_abs(g.d_input) == 0.0);
}

TEST_CASE("zero network gradient follows the affine output path")
{
    const FnoParams p = FnoParams::zeros(small_config(4, 3));
    RngStream rng(9, 0);
    const Grid g = Grid::square(8);
    const Field target = random_field(g, 1, rng);
    const GradientBundle gb = fno_grad(p, random_field(g, 1, rng), LossSpec::squared_l2(target));
    CHECK(dgp::test::max_abs(gb.d_input) == 0.0);
    double mean_t = 0.0;
    for (double v : target.values()) mean_t += v;
    mean_t /= static_cast<double>(g.points());
    CHECK(gb.d_params[p.layout.proj2_b] == doctest::Approx(-2.0 * mean_t).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central differences")
{
    RngStream rng(10, 0);
    for (int trial = 0; trial < 3; ++trial) {
        FnoConfig c = small_config(4, 3, 2);
        c.in_channels = 1 + trial % 2;
        const FnoParams p = FnoParams::init(c, rng);
        const Grid g = Grid::square(8);
        const Field x = random_field(g, c.in_channels, rng);
        const GradCheckReport rep = grad_check(p, x, LossSpec::squared_l2(random_field(g, 1, rng)));
        INFO("worst coordinate " << rep.worst_coordinate << " rel " << rep.max_rel_error);
        CHECK(rep.passed);
        CHECK(rep.max_rel_error < 1e-5);
        CHECK(rep.checked == p.size() + x.size());
    }
    SUBCASE("scalar head")
    {
        FnoConfig c = small_config(4, 3, 2);
        c.in_channels = 2;
        c.head = HeadKind::ScalarFunctional;
        const FnoParams p = FnoParams::init(c, rng);
        const Field x = random_field(Grid::make(8, 10), 2, rng);
        const GradCheckReport rep = grad_check(p, x, LossSpec::head(1.0));
        INFO("worst coordinate " << rep.worst_coordinate << " rel " << rep.max_rel_error);
        CHECK(rep.passed);
    }
}

TEST_CASE("gradient of a weighted loss sum is the weighted gradient sum")
{
    RngStream rng(11, 0);
    const FnoParams p = FnoParams::init(small_config(4, 3), rng);
    const Grid g = Grid::square(8);
    const Field x = random_field(g, 1, rng), t1 = random_field(g, 1, rng), t2 = random_field(g, 1, rng);
    const GradientBundle a = fno_grad(p, x, LossSpec::squared_l2(t1, 0.3));
    const GradientBundle b = fno_grad(p, x, LossSpec::squared_l2(t2, 1.7));
    // 0.3|y-t1|^2 + 1.7|y-t2|^2 = 2|y - t*|^2 + const with t* = (0.3 t1 + 1.7 t2)/2
    const Field tstar = axpy(0.15, t1, scaled(t2, 0.85));
    const GradientBundle c = fno_grad(p, x, LossSpec::squared_l2(tstar, 2.0));
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(c.d_params[i] - (a.d_params[i] + b.d_params[i])) < 1e-12);
}

TEST_CASE("grad_check flags a planted fault and rejects epsilon = 0")
{
    RngStream rng(12, 0);
    const FnoParams p = FnoParams::init(small_config(3, 2, 1), rng);
    const Grid g = Grid::square(8);
    const Field x = random_field(g, 1, rng);
    const LossSpec loss = LossSpec::squared_l2(random_field(g, 1, rng));
    GradientBundle bad = fno_grad(p, x, loss);
    const std::size_t planted = p.layout.layers[0].w + 2;
    bad.d_params[planted] *= 2.0;
    const GradCheckReport rep = grad_check_against(p, x, loss, bad);
    CHECK_FALSE(rep.passed);
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0].coordinate == "layer0.W[2]");

    GradCheckOptions opt;
    opt.epsilon = 0.0;
    CHECK_THROWS_AS(grad_check(p, x, loss, opt), Error);
}

TEST_CASE("shape and mode validation")
{
    const FnoParams p = FnoParams::zeros(small_config(4, 5));
    CHECK_THROWS_AS(fno_forward(p, Field(Grid::square(8), 1)), Error); // 5 > 8/2
    const FnoParams q = FnoParams::zeros(small_config(4, 3));
    CHECK_THROWS_AS(fno_forward(q, Field(Grid::square(8), 2)), Error);
    CHECK_THROWS_AS(fno_grad(q, Field(Grid::square(8), 1), LossSpec::head()), Error);
    CHECK(small_config(4, 25).clamped_for(32).modes == 16);
}

TEST_CASE("checkpoint round trip")
{
    RngStream rng(13, 0);
    FnoConfig c = small_config(4, 3);
    c.head = HeadKind::ScalarFunctional;
    const FnoParams p = FnoParams::init(c, rng);
    const auto stem = std::filesystem::temp_directory_path() / "dgp_test_fno";
    save_fno(stem, p);
    const FnoParams q = load_fno(stem);
    CHECK(q.config == p.config);
    CHECK(q.values == p.values);
}
