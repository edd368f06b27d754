#pragma once

#include "core/field.hpp"

#include <vector>

namespace dgp {

struct NsConfig {
    double nu = 1e-2;
    double T = 2.0;
    double dt = 1e-3;
    int n_snapshots = 10;
    Field forcing; // empty (0 channels) means no forcing

    void validate(const Grid& grid) const;
};

struct NsTrajectory {
    std::vector<Field> snapshots;
    std::vector<double> times;

    const Field& final_state() const { return snapshots.back(); }
};

// 0.1 (sin(2 pi (x+y)) + cos(2 pi (x+y))) sampled on a periodic grid.
Field ns_default_forcing(const Grid& grid);

// Velocity (u, v) = (d psi/dy, -d psi/dx) with -lap psi = w, psi(0,0) = 0.
Field vorticity_to_velocity(const Field& w);
// Spectral divergence du/dx + dv/dy of a 2-channel velocity field.
Field spectral_divergence(const Field& uv);

// Pseudo-spectral vorticity integration on the unit torus: Crank-Nicolson
// diffusion, AB2 advection + forcing (Euler on the first step), 2/3-rule
// dealiasing of the nonlinear term.
NsTrajectory solve_ns(const Field& w0, const NsConfig& cfg);

} // namespace dgp
