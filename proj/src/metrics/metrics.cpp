#include "metrics/metrics.hpp"

#include "core/error.hpp"

#include <cmath>

namespace dgp {

namespace {

void check_shapes(const Field& pred, const Field& truth, const char* what)
{
    require(pred.grid() == truth.grid() && pred.channels() == truth.channels(), ErrorCode::ShapeMismatch,
            std::string(what) + ": prediction and truth shapes differ");
}

} // namespace

double relative_error(const Field& pred, const Field& truth)
{
    check_shapes(pred, truth, "relative_error");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - truth[i];
        num += d * d;
        den += truth[i] * truth[i];
    }
    require(den > 0.0, "relative_error: truth has zero norm");
    // The cell weights cancel in the ratio.
    return std::sqrt(num / den);
}

double max_error(const Field& pred, const Field& truth)
{
    check_shapes(pred, truth, "max_error");
    double m = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) m = std::max(m, std::abs(pred[i] - truth[i]));
    return m;
}

} // namespace dgp
