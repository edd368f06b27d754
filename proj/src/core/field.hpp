#pragma once

#include "core/error.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dgp {

enum class Boundary { Periodic, DirichletZero, Neumann };

// Uniform grid on the unit square.
struct Grid {
    int nx = 0;
    int ny = 0;
    Boundary boundary = Boundary::Periodic;

    static Grid make(int nx, int ny, Boundary b = Boundary::Periodic);
    static Grid square(int n, Boundary b = Boundary::Periodic) { return make(n, n, b); }

    bool periodic() const { return boundary == Boundary::Periodic; }
    std::size_t points() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    double hx() const { return periodic() ? 1.0 / nx : 1.0 / (nx - 1); }
    double hy() const { return periodic() ? 1.0 / ny : 1.0 / (ny - 1); }
    double x(int ix) const { return ix * hx(); }
    double y(int iy) const { return iy * hy(); }

    friend bool operator==(const Grid&, const Grid&) = default;
};

// Multi-channel real field, row-major with dims (ny, nx, channels).
class Field {
public:
    Field() = default;
    Field(const Grid& grid, int channels, double fill = 0.0);
    Field(const Grid& grid, int channels, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    int channels() const { return channels_; }
    int nx() const { return grid_.nx; }
    int ny() const { return grid_.ny; }
    std::size_t size() const { return values_.size(); }

    double& at(int iy, int ix, int c = 0) { return values_[index(iy, ix, c)]; }
    double at(int iy, int ix, int c = 0) const { return values_[index(iy, ix, c)]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& storage() { return values_; }
    const std::vector<double>& storage() const { return values_; }

    std::size_t index(int iy, int ix, int c) const
    {
        return (static_cast<std::size_t>(iy) * grid_.nx + ix) * channels_ + c;
    }

    bool all_finite() const;
    void require_finite(const char* what) const;
    bool same_shape(const Field& other) const { return grid_ == other.grid_ && channels_ == other.channels_; }

    Field channel(int c) const;
    void set_channel(int c, const Field& src);
    // Channel concatenation; grids must match.
    static Field concat(const Field& a, const Field& b);

    template <typename Fn>
    static Field sample(const Grid& grid, Fn&& fn)
    {
        Field f(grid, 1);
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int ix = 0; ix < grid.nx; ++ix) f.at(iy, ix) = fn(grid.x(ix), grid.y(iy));
        return f;
    }

    friend bool operator==(const Field&, const Field&) = default;

private:
    Grid grid_{};
    int channels_ = 0;
    std::vector<double> values_;
};

// Full 2D spectrum, same (ky, kx, channel) layout as Field.
struct SpectralField {
    Grid grid;
    int channels = 0;
    std::vector<std::complex<double>> coeffs;

    std::complex<double>& at(int ky, int kx, int c = 0)
    {
        return coeffs[(static_cast<std::size_t>(ky) * grid.nx + kx) * channels + c];
    }
    std::complex<double> at(int ky, int kx, int c = 0) const
    {
        return coeffs[(static_cast<std::size_t>(ky) * grid.nx + kx) * channels + c];
    }
};

// Signed frequency of DFT index k on an n-point axis, in (-n/2, n/2].
inline int signed_mode(int k, int n) { return k <= n / 2 ? k : k - n; }

// Field arithmetic used throughout the scoring and inverse code.
double dot(const Field& a, const Field& b);
double sum_squares(const Field& a);
// Discrete L2 norm with cell weight 1/(nx*ny).
double l2_norm(const Field& a);
Field axpy(double alpha, const Field& x, const Field& y); // alpha*x + y
Field scaled(const Field& x, double alpha);

} // namespace dgp
