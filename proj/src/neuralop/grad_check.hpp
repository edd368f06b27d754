#pragma once

#include "neuralop/fno.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dgp {

struct GradCheckOptions {
    double epsilon = 1e-5;
    double tolerance = 1e-5;
    // Denominator floor of the relative error |a - fd| / max(|a|, |fd|, floor).
    double abs_floor = 1e-5;
    std::size_t max_coords = 2000;
    std::uint64_t seed = 0;
};

struct GradCheckFailure {
    std::string coordinate;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

struct GradCheckReport {
    std::size_t checked = 0;
    double max_rel_error = 0.0;
    std::string worst_coordinate;
    bool passed = false;
    std::vector<GradCheckFailure> failures;
};

// Compares fno_grad against central differences over parameters and input
// values. All coordinates are checked when there are at most max_coords of
// them, otherwise a seeded random subset of max_coords.
GradCheckReport grad_check(const FnoParams& params, const Field& input, const LossSpec& loss,
                           const GradCheckOptions& opt = {});

// Same comparison for an externally supplied gradient (used to verify the
// checker itself detects planted faults).
GradCheckReport grad_check_against(const FnoParams& params, const Field& input, const LossSpec& loss,
                                   const GradientBundle& analytic, const GradCheckOptions& opt = {});

} // namespace dgp
