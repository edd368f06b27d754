#include "test_util.hpp"

#include <numbers>

namespace dgp::test {

Field band_limited_field(const Grid& g, int kmax, RngStream& rng)
{
    Field f(g, 1);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int ky = 0; ky < kmax; ++ky)
        for (int kx = -(kmax - 1); kx < kmax; ++kx) {
            if (ky == 0 && kx < 0) continue;
            const double a = rng.normal() / (1.0 + kx * kx + ky * ky), b = rng.normal() / (1.0 + kx * kx + ky * ky);
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix) {
                    const double ph = two_pi * (kx * g.x(ix) + ky * g.y(iy));
                    f.at(iy, ix) += a * std::cos(ph) + b * std::sin(ph);
                }
        }
    return f;
}

} // namespace dgp::test
