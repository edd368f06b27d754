#pragma once

#include "core/field.hpp"
#include "core/rng.hpp"

#include <string>
#include <utility>

namespace dgp {

enum class PsiKind { Clip, Exp, Identity };

struct PsiMode {
    PsiKind kind = PsiKind::Identity;
    double low = 4.0;
    double high = 12.0;

    static PsiMode clip(double low = 4.0, double high = 12.0) { return {PsiKind::Clip, low, high}; }
    static PsiMode exp() { return {PsiKind::Exp}; }
    static PsiMode identity() { return {PsiKind::Identity}; }
};

std::string to_string(PsiKind k);
PsiKind psi_kind_from_string(const std::string& s);

struct GrfSpec {
    double alpha = 2.0;
    double tau = 3.0;
    PsiMode psi{};

    void validate() const;
};

// Per-dataset ranges; each element draws its own (alpha, tau).
struct GrfHyperPrior {
    std::pair<double, double> alpha_range{1.0, 2.5};
    std::pair<double, double> tau_range{0.5, 1.5};

    void validate() const;
    GrfSpec draw(RngStream& rng, PsiMode psi) const;
};

// Standard deviation of mode (k1, k2): (lambda_k + tau^2)^(-alpha/2), with
// lambda_k = pi^2 |k|^2 for the Neumann cosine basis and 4 pi^2 |k|^2 on the
// periodic torus.
double grf_mode_std(const GrfSpec& spec, int k1, int k2, Boundary boundary = Boundary::Neumann);

// Draws one field. Non-periodic grids are synthesized in the orthonormal
// Neumann cosine basis (1, sqrt2 cos(pi k x)) at the grid nodes; periodic grids
// use the real Fourier basis on the unit torus, Nyquist modes excluded.
// psi is applied pointwise afterwards.
Field sample_grf(const GrfSpec& spec, const Grid& grid, RngStream& rng);

double apply_psi(double x, const PsiMode& mode);
Field apply_psi(const Field& f, const PsiMode& mode);

} // namespace dgp
