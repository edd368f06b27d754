#pragma once

#include "core/field.hpp"

#include <complex>
#include <span>

namespace dgp {

using cplx = std::complex<double>;

// Unnormalized forward sum F(k) = sum_x f(x) e^{-2 pi i k.x}; per channel.
SpectralField fft2(const Field& f);
// Inverse carries the 1/(nx*ny) factor; returns the real part.
Field ifft2(const SpectralField& s);

// Zero-pad or truncate the spectrum onto new_grid. Nyquist bins are split
// (upsampling) or folded (downsampling) so that down(up(f)) == f.
Field resample_spectral(const Field& f, const Grid& new_grid);

// Real-to-half-complex transforms on a single contiguous ny x nx plane, used
// by the hot loops. Half spectrum layout is [ny][nx/2 + 1], unnormalized in
// both directions (inverse returns N * ifft).
class RealFft2 {
public:
    RealFft2(int ny, int nx);

    int ny() const { return ny_; }
    int nx() const { return nx_; }
    int half_nx() const { return nx_ / 2 + 1; }
    std::size_t half_size() const { return static_cast<std::size_t>(ny_) * half_nx(); }

    void forward(std::span<const double> in, std::span<cplx> out) const;
    // Destroys `in`.
    void inverse(std::span<cplx> in, std::span<double> out) const;

private:
    int ny_, nx_;
    void* fwd_;
    void* inv_;
};

} // namespace dgp
