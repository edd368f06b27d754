#include "core/field.hpp"

#include <cmath>
#include <sstream>

namespace dgp {

Grid Grid::make(int nx, int ny, Boundary b)
{
    if (nx < 4 || ny < 4) {
        std::ostringstream os;
        os << "grid must be at least 4x4, got " << nx << "x" << ny;
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
    return Grid{nx, ny, b};
}

Field::Field(const Grid& grid, int channels, double fill)
    : grid_(grid), channels_(channels)
{
    require(channels >= 1, "field needs at least one channel");
    values_.assign(grid.points() * static_cast<std::size_t>(channels), fill);
}

Field::Field(const Grid& grid, int channels, std::vector<double> values)
    : grid_(grid), channels_(channels), values_(std::move(values))
{
    require(channels >= 1, "field needs at least one channel");
    require(values_.size() == grid.points() * static_cast<std::size_t>(channels), ErrorCode::ShapeMismatch,
            "field value count does not match grid x channels");
}

bool Field::all_finite() const
{
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

void Field::require_finite(const char* what) const
{
    if (!all_finite()) throw Error(ErrorCode::NonFinite, std::string(what) + ": field contains non-finite values");
}

Field Field::channel(int c) const
{
    require(c >= 0 && c < channels_, "channel index out of range");
    Field out(grid_, 1);
    for (std::size_t p = 0; p < grid_.points(); ++p) out.values_[p] = values_[p * channels_ + c];
    return out;
}

void Field::set_channel(int c, const Field& src)
{
    require(c >= 0 && c < channels_, "channel index out of range");
    require(src.grid_ == grid_ && src.channels_ == 1, ErrorCode::ShapeMismatch, "set_channel shape mismatch");
    for (std::size_t p = 0; p < grid_.points(); ++p) values_[p * channels_ + c] = src.values_[p];
}

Field Field::concat(const Field& a, const Field& b)
{
    require(a.grid_ == b.grid_, ErrorCode::ShapeMismatch, "concat: grids differ");
    const int ca = a.channels_, cb = b.channels_;
    Field out(a.grid_, ca + cb);
    for (std::size_t p = 0; p < a.grid_.points(); ++p) {
        for (int c = 0; c < ca; ++c) out.values_[p * (ca + cb) + c] = a.values_[p * ca + c];
        for (int c = 0; c < cb; ++c) out.values_[p * (ca + cb) + ca + c] = b.values_[p * cb + c];
    }
    return out;
}

double dot(const Field& a, const Field& b)
{
    require(a.same_shape(b), ErrorCode::ShapeMismatch, "dot: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sum_squares(const Field& a) { return dot(a, a); }

double l2_norm(const Field& a) { return std::sqrt(sum_squares(a) / static_cast<double>(a.grid().points())); }

Field axpy(double alpha, const Field& x, const Field& y)
{
    require(x.same_shape(y), ErrorCode::ShapeMismatch, "axpy: shape mismatch");
    Field out = y;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha * x[i];
    return out;
}

Field scaled(const Field& x, double alpha)
{
    Field out = x;
    for (double& v : out.storage()) v *= alpha;
    return out;
}

} // namespace dgp
