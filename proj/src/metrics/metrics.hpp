#pragma once

#include "core/field.hpp"

namespace dgp {

// ||pred - truth|| / ||truth|| with cell-weighted L2 norms.
double relative_error(const Field& pred, const Field& truth);
// max |pred - truth| over all points and channels.
double max_error(const Field& pred, const Field& truth);

} // namespace dgp
