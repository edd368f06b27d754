#include "doctest.h"

#include "core/fft.hpp"
#include "core/rng.hpp"
#include "core/tensor_io.hpp"
#include "test_util.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

using namespace dgp;
using dgp::test::max_abs_diff;
using dgp::test::random_field;

TEST_CASE("grid rejects tiny sizes and reports spacing")
{
    CHECK_THROWS_AS(Grid::make(3, 8), Error);
    CHECK(Grid::square(8).hx() == doctest::Approx(1.0 / 8));
    CHECK(Grid::square(9, Boundary::DirichletZero).hx() == doctest::Approx(1.0 / 8));
}

TEST_CASE("fft2 of a constant is DC-only")
{
    const Field f(Grid::square(4), 1, 2.5);
    const SpectralField s = fft2(f);
    CHECK(s.at(0, 0).real() == doctest::Approx(16 * 2.5));
    for (int ky = 0; ky < 4; ++ky)
        for (int kx = 0; kx < 4; ++kx)
            if (ky || kx) CHECK(std::abs(s.at(ky, kx)) < 1e-12);
}

TEST_CASE("fft2 of cos(2 pi x) hits the two conjugate modes with value 32")
{
    const Grid g = Grid::square(8);
    const Field f = Field::sample(g, [](double x, double) { return std::cos(2 * std::numbers::pi * x); });
    const SpectralField s = fft2(f);
    for (int ky = 0; ky < 8; ++ky)
        for (int kx = 0; kx < 8; ++kx) {
            const bool hit = ky == 0 && (kx == 1 || kx == 7);
            CHECK(std::abs(s.at(ky, kx) - std::complex<double>(hit ? 32.0 : 0.0)) < 1e-12);
        }
}

TEST_CASE("Parseval holds under the unnormalized-forward convention")
{
    RngStream rng(11, 0);
    const Field f = random_field(Grid::square(16), 1, rng);
    const SpectralField s = fft2(f);
    double lhs = 0.0, rhs = 0.0;
    for (double v : f.values()) lhs += v * v;
    for (auto c : s.coeffs) rhs += std::norm(c);
    CHECK(std::abs(lhs - rhs / 256.0) / lhs < 1e-10);
}

TEST_CASE("ifft2(fft2(f)) is the identity on random grids 4..64")
{
    RngStream rng(3, 1);
    for (int trial = 0; trial < 40; ++trial) {
        const int nx = 4 + static_cast<int>(rng.below(61)), ny = 4 + static_cast<int>(rng.below(61));
        const int ch = 1 + static_cast<int>(rng.below(3));
        const Field f = random_field(Grid::make(nx, ny), ch, rng);
        const Field back = ifft2(fft2(f));
        REQUIRE(back.same_shape(f));
        CHECK(max_abs_diff(back, f) < 1e-12);
    }
}

TEST_CASE("fft2 rejects non-periodic grids and non-finite input")
{
    CHECK_THROWS_AS(fft2(Field(Grid::square(8, Boundary::DirichletZero), 1)), Error);
    Field f(Grid::square(8), 1);
    f[5] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fft2(f), Error);
}

TEST_CASE("spectral resampling")
{
    SUBCASE("constant survives upsampling")
    {
        const Field up = resample_spectral(Field(Grid::square(8), 1, 1.75), Grid::square(16));
        for (double v : up.values()) CHECK(v == doctest::Approx(1.75).epsilon(1e-12));
    }
    SUBCASE("cos(2 pi x) 8 -> 16 matches direct sampling")
    {
        auto fn = [](double x, double) { return std::cos(2 * std::numbers::pi * x); };
        const Field up = resample_spectral(Field::sample(Grid::square(8), fn), Grid::square(16));
        CHECK(max_abs_diff(up, Field::sample(Grid::square(16), fn)) < 1e-10);
    }
    SUBCASE("band-limited 16 -> 8 -> 16 round trip")
    {
        RngStream rng(5, 2);
        const Field f = dgp::test::band_limited_field(Grid::square(16), 4, rng);
        const Field back = resample_spectral(resample_spectral(f, Grid::square(8)), Grid::square(16));
        CHECK(max_abs_diff(back, f) < 1e-10);
    }
    SUBCASE("up then down is the identity, including the Nyquist bin")
    {
        RngStream rng(5, 3);
        const Field f = random_field(Grid::square(8), 2, rng);
        const Field back = resample_spectral(resample_spectral(f, Grid::square(16)), Grid::square(8));
        CHECK(max_abs_diff(back, f) < 1e-12);
    }
    CHECK_THROWS_AS(resample_spectral(Field(Grid::square(8), 1), Grid::square(16, Boundary::Neumann)), Error);
}

TEST_CASE("Philox known-answer vectors")
{
    const auto zero = RngStream::block(0, 0, 0);
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);
    const auto ones = RngStream::block(UINT64_MAX, UINT64_MAX, UINT64_MAX);
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("rng streams are reproducible and stream-separated")
{
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64(), vb = b.next_u64(), vc = c.next_u64();
        CHECK(va == vb);
        any_diff |= va != vc;
    }
    CHECK(any_diff);

    RngStream n(1, 0);
    double mean = 0.0, m2 = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        const double x = n.normal();
        mean += x;
        m2 += x * x;
    }
    mean /= count;
    m2 /= count;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(m2 - 1.0) < 0.02);
}

TEST_CASE("tensor format golden bytes for a 1x1x1 field")
{
    const Tensor t{{1, 1, 1}, {1.0}};
    const auto bytes = encode_tensor(t);
    const std::vector<unsigned char> expected = {
        'D', 'G', 'P', 'T', 1, 0, 0, 0, 0, 3,          // magic, version, dtype, ndim
        1,   0,   0,   0,   0, 0, 0, 0,                // dim 0
        1,   0,   0,   0,   0, 0, 0, 0,                // dim 1
        1,   0,   0,   0,   0, 0, 0, 0,                // dim 2
        0,   0,   0,   0,   0, 0, 0xf0, 0x3f};         // 1.0 little-endian
    CHECK(bytes == expected);
    CHECK(decode_tensor(bytes).data == t.data);
}

TEST_CASE("tensor files round-trip bit-exactly")
{
    RngStream rng(9, 9);
    const Field f = random_field(Grid::make(12, 7), 3, rng, 1e3);
    const auto path = std::filesystem::temp_directory_path() / "dgp_test_roundtrip.dgpt";
    write_field(path, f);
    const Field g = read_field(path);
    CHECK(g.nx() == 12);
    CHECK(g.ny() == 7);
    CHECK(g.channels() == 3);
    CHECK(g.storage() == f.storage());
    std::filesystem::remove(path);
}

TEST_CASE("tensor decode errors are distinct")
{
    auto good = encode_tensor(Tensor{{2}, {1.0, 2.0}});
    auto code_of = [](const std::vector<unsigned char>& b) {
        try {
            decode_tensor(b);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    auto bad_magic = good;
    bad_magic[0] = bad_magic[1] = bad_magic[2] = bad_magic[3] = 'X';
    CHECK(code_of(bad_magic) == ErrorCode::BadMagic);
    auto bad_dtype = good;
    bad_dtype[8] = 3;
    CHECK(code_of(bad_dtype) == ErrorCode::BadDtype);
    auto bad_version = good;
    bad_version[4] = 2;
    CHECK(code_of(bad_version) == ErrorCode::BadVersion);
    auto truncated = good;
    truncated.resize(truncated.size() - 3);
    CHECK(code_of(truncated) == ErrorCode::Truncated);
}
