#pragma once

#include "core/field.hpp"

namespace dgp {

// -div(a grad u) = f on the unit square, u = 0 on the boundary. Fields live on
// an n x n DirichletZero node grid; boundary nodes of the solution are zero.
struct DarcyProblem {
    Field perm;
    Field source;

    // Source f = 1 everywhere.
    static DarcyProblem with_unit_source(Field perm);
    void validate() const;
};

struct DarcyOptions {
    double rel_tol = 1e-10;
    // 0 selects the default cap of 10 n^2 iterations.
    long max_iter = 0;
};

Field solve_darcy(const DarcyProblem& p, const DarcyOptions& opt = {});

// Applies the five-point finite-volume operator (arithmetic face averages) to
// the interior of u; boundary entries of the result are zero.
Field darcy_apply(const Field& perm, const Field& u);

} // namespace dgp
