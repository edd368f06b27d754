#pragma once

#include "core/field.hpp"
#include "core/rng.hpp"

#include <Eigen/Dense>

#include "json.hpp"

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dgp {

enum class Activation { Gelu, Identity };
enum class HeadKind { Field, ScalarFunctional };

struct FnoConfig {
    int layers = 4;
    int width = 32;
    int modes = 25; // retained signed modes per axis: |k| < modes
    int in_channels = 1;
    int out_channels = 1;
    int proj_hidden = 128;
    Activation activation = Activation::Gelu;
    HeadKind head = HeadKind::Field;

    // cos/sin of 2 pi x and 2 pi y appended at the lift.
    static constexpr int kCoordChannels = 4;

    void validate() const;
    // Copy with modes clamped to floor(n/2) for an n x n training grid.
    FnoConfig clamped_for(int n) const;
    friend bool operator==(const FnoConfig&, const FnoConfig&) = default;
};

// Offsets of every parameter block inside the flat parameter vector.
struct FnoLayout {
    struct Layer {
        std::size_t r_re, r_im, w, b;
    };
    std::size_t lift_w = 0, lift_b = 0;
    std::vector<Layer> layers;
    std::size_t proj1_w = 0, proj1_b = 0, proj2_w = 0, proj2_b = 0;
    std::size_t head_w = 0, head_b = 0;
    std::size_t total = 0;
    int mode_span = 0; // 2 * modes - 1
    std::size_t mode_count = 0;

    explicit FnoLayout(const FnoConfig& c = {});
    // Human-readable name of a flat coordinate, e.g. "layer2.W[3]".
    std::string describe(std::size_t index) const;
};

// Spectral weights are stored as [mode][out][in], mode index
// (sy + modes - 1) * (2 modes - 1) + (sx + modes - 1).
struct FnoParams {
    FnoConfig config;
    FnoLayout layout;
    std::vector<double> values;

    FnoParams() = default;
    explicit FnoParams(const FnoConfig& c);

    static FnoParams zeros(const FnoConfig& c) { return FnoParams(c); }
    // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for pointwise maps; spectral
    // weights uniform in [0, 1/(width^2)) for both real and imaginary parts.
    static FnoParams init(const FnoConfig& c, RngStream& rng);

    std::size_t size() const { return values.size(); }
    double* data() { return values.data(); }
    const double* data() const { return values.data(); }
};

// Scalar losses supported by fno_grad:
//   l2_weight * sum_p w_p |out(p) - target(p)|^2 + head_weight * d(input)
// with w_p = 1/(nx ny) when cell_weighted, else 1.
struct LossSpec {
    double l2_weight = 0.0;
    std::optional<Field> target;
    bool cell_weighted = true;
    double head_weight = 0.0;

    static LossSpec squared_l2(Field target, double weight = 1.0, bool cell_weighted = true);
    static LossSpec head(double weight = 1.0);
};

struct GradientBundle {
    std::vector<double> d_params;
    Field d_input;
    double loss_value = 0.0;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexRowMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Activations retained by a forward pass for the reverse sweep. Planes are
// channel-major rows of length nx*ny.
struct FnoTape {
    Grid grid;
    RowMatrix features;               // lifted input incl. coordinate channels
    std::vector<RowMatrix> hidden;    // h_0 .. h_L
    std::vector<RowMatrix> preact;    // z_0 .. z_{L-1}
    std::vector<ComplexRowMatrix> spectra; // retained modes of h_l, [channel][mode]
    RowMatrix proj_pre, proj_post, out;
    double scalar = 0.0;
};

// Field head: returns the output field (ny, nx, out_channels).
Field fno_forward(const FnoParams& params, const Field& input);
// ScalarFunctional head: cell-weighted mean pooling followed by a linear map.
double fno_forward_scalar(const FnoParams& params, const Field& input);

// Forward pass recording the tape.
void fno_forward_tape(const FnoParams& params, const Field& input, FnoTape& tape);
Field tape_output_field(const FnoParams& params, const FnoTape& tape);

// Reverse sweep. Exactly one of out_cotangent (Field head) or scalar_cotangent
// (ScalarFunctional head) is used. Parameter gradients are accumulated into
// d_params when it is non-empty; the input gradient is written to d_input when
// non-null.
void fno_backward(const FnoParams& params, const FnoTape& tape, const Field* out_cotangent, double scalar_cotangent,
                  std::span<double> d_params, Field* d_input);

GradientBundle fno_grad(const FnoParams& params, const Field& input, const LossSpec& loss);
double fno_loss(const FnoParams& params, const Field& input, const LossSpec& loss);

nlohmann::json fno_config_to_json(const FnoConfig& c);
// Keys absent from j keep the values of `defaults`.
FnoConfig fno_config_from_json(const nlohmann::json& j, FnoConfig defaults = {});

// Checkpoints: <stem>.dgpt holds the flat parameter vector, <stem>.json the config.
void save_fno(const std::filesystem::path& stem, const FnoParams& params);
FnoParams load_fno(const std::filesystem::path& stem);

std::string to_string(Activation a);
std::string to_string(HeadKind h);

} // namespace dgp
