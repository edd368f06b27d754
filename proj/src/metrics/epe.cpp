#include "metrics/epe.hpp"

#include "core/error.hpp"

#include <array>
#include <cstdlib>

namespace dgp {

void EpeConfig::validate() const
{
    require(tol > 0 && tol < window && spacing >= 1, "epe: need 0 < tol < window and spacing >= 1");
}

namespace {

struct Mask {
    int nx, ny;
    const Field* f;
    bool at(int ix, int iy) const
    {
        ix = ((ix % nx) + nx) % nx;
        iy = ((iy % ny) + ny) % ny;
        return f->at(iy, ix) != 0.0;
    }
};

void check_binary(const Field& f, const char* name)
{
    require(f.channels() == 1, ErrorCode::ShapeMismatch, std::string("epe: ") + name + " must have one channel");
    for (double v : f.values())
        require(v == 0.0 || v == 1.0, std::string("epe: ") + name + " must be binary");
}

// Outward normals and the tangent used to walk runs.
constexpr std::array<std::array<int, 4>, 4> kDirs = {{
    {1, 0, 0, 1},  // +x normal, tangent +y
    {-1, 0, 0, 1}, // -x
    {0, 1, 1, 0},  // +y normal, tangent +x
    {0, -1, 1, 0}, // -y
}};

} // namespace

EpeResult epe_violations(const Field& printed, const Field& target, const EpeConfig& cfg)
{
    cfg.validate();
    check_binary(printed, "printed");
    check_binary(target, "target");
    require(printed.grid() == target.grid(), ErrorCode::ShapeMismatch, "epe: printed and target shapes differ");
    const int nx = target.nx(), ny = target.ny();
    const Mask t{nx, ny, &target}, p{nx, ny, &printed};

    EpeResult r;
    for (const auto& d : kDirs) {
        const int dx = d[0], dy = d[1], tx = d[2], ty = d[3];
        auto is_edge = [&](int ix, int iy) { return t.at(ix, iy) && !t.at(ix + dx, iy + dy); };
        auto is_printed_edge = [&](int ix, int iy) { return p.at(ix, iy) && !p.at(ix + dx, iy + dy); };
        const int run_len_max = tx ? nx : ny;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                if (!is_edge(ix, iy)) continue;
                // Runs start where the previous face along the tangent is not an
                // edge; a run that closes on itself starts at tangent index 0.
                const bool prev = is_edge(ix - tx, iy - ty);
                if (prev) {
                    int k = 1;
                    while (k < run_len_max && is_edge(ix - k * tx, iy - k * ty)) ++k;
                    if (k < run_len_max || (tx ? ix : iy) != 0) continue;
                }
                for (int k = 0; k < run_len_max; ++k) {
                    const int sx = ix + k * tx, sy = iy + k * ty;
                    if (!is_edge(sx, sy)) break;
                    if (k % cfg.spacing != 0) continue;
                    int found = -1;
                    for (int s = 0; s <= cfg.window && found < 0; ++s)
                        if (is_printed_edge(sx + s * dx, sy + s * dy) || is_printed_edge(sx - s * dx, sy - s * dy))
                            found = s;
                    ++r.samples;
                    if (found < 0 || found > cfg.tol) ++r.violations;
                }
            }
    }
    require(r.samples > 0, "epe: target has no boundary pixels");
    r.fraction = static_cast<double>(r.violations) / static_cast<double>(r.samples);
    return r;
}

} // namespace dgp
