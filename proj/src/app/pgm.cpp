#include "app/pgm.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace dgp {

std::vector<unsigned char> encode_pgm(int nx, int ny, std::span<const double> values, std::optional<ValueRange> range)
{
    require(nx >= 1 && ny >= 1 && values.size() == static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny),
            ErrorCode::ShapeMismatch, "pgm: value count does not match the image size");
    for (double v : values) require(std::isfinite(v), ErrorCode::NonFinite, "pgm: field is not finite");
    double lo, hi;
    if (range) {
        std::tie(lo, hi) = *range;
        require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "pgm: range must satisfy lo <= hi");
    } else {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
    }
    const std::string header = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    out.reserve(out.size() + values.size());
    for (int iy = ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double v = values[static_cast<std::size_t>(iy) * nx + ix];
            unsigned char b = 128;
            if (hi > lo) {
                const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
                b = static_cast<unsigned char>(std::floor(t * 255.0 + 0.5));
            }
            out.push_back(b);
        }
    return out;
}

void render_pgm(const Field& f, const std::filesystem::path& path, std::optional<ValueRange> range)
{
    require(f.channels() == 1, ErrorCode::ShapeMismatch, "pgm: only single-channel fields can be rendered");
    const auto bytes = encode_pgm(f.nx(), f.ny(), f.values(), range);
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    require(static_cast<bool>(out), ErrorCode::Io, "pgm: cannot write " + path.string());
}

} // namespace dgp
