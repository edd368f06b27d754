#pragma once

#include "core/field.hpp"

namespace dgp {

// Toy lithography: a single coherent Gaussian imaging kernel followed by the
// blur-and-threshold resist model. Widths are in pixels.
struct LithoConfig {
    double sigma_optical = 2.0;
    double sigma_resist = 1.0;
    double tau_resist = 0.5;
    double beta = 0.05;

    void validate() const;
};

// Periodic convolution with a unit-mass Gaussian of width sigma (pixels).
Field gaussian_blur(const Field& f, double sigma);

// Aerial image blurred by the resist kernel: R = (mask * K_opt) * G_sigma.
Field litho_resist_image(const Field& mask, const LithoConfig& cfg);

// Hard mode: Z = 1{R > tau}. Soft mode: sigmoid((R - tau) / beta).
Field litho_forward(const Field& mask, const LithoConfig& cfg, bool soft);

} // namespace dgp
