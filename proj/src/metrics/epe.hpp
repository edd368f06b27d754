#pragma once

#include "core/field.hpp"

#include <cstddef>

namespace dgp {

struct EpeConfig {
    int tol = 2;      // pixels; a displacement of exactly tol passes
    int spacing = 4;  // stride between sampled edge points along a run
    int window = 8;   // max search distance along the edge normal
    void validate() const;
};

struct EpeResult {
    std::size_t violations = 0;
    std::size_t samples = 0;
    double fraction = 0.0;
};

// Edge placement check on binary masks (periodic wrap). Edges are the faces
// between a 1-pixel of the target and a 0-neighbour; each run of collinear
// faces with the same outward normal is sampled every `spacing` faces from
// its start. At each sample the printed image is searched along the normal
// for a 1 -> 0 crossing with the same orientation; the nearest one gives the
// displacement.
EpeResult epe_violations(const Field& printed, const Field& target, const EpeConfig& cfg = {});

} // namespace dgp
