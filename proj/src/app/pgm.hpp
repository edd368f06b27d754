#pragma once

#include "core/field.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dgp {

using ValueRange = std::pair<double, double>;

// Binary 8-bit PGM (P5). Values map linearly from [lo, hi] to [0, 255] with
// clamping and round-half-up; lo == hi renders mid-gray 128. The default
// range is the data min/max. Row iy = 0 is written last so y points up.
std::vector<unsigned char> encode_pgm(int nx, int ny, std::span<const double> values,
                                      std::optional<ValueRange> range = std::nullopt);

void render_pgm(const Field& f, const std::filesystem::path& path, std::optional<ValueRange> range = std::nullopt);

} // namespace dgp
