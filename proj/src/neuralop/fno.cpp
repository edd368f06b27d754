#include "neuralop/fno.hpp"

#include "core/fft.hpp"
#include "core/tensor_io.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace dgp {

using json = nlohmann::json;

std::string to_string(Activation a) { return a == Activation::Gelu ? "gelu" : "identity"; }
std::string to_string(HeadKind h) { return h == HeadKind::Field ? "field" : "scalar"; }

void FnoConfig::validate() const
{
    require(layers >= 1 && width >= 1 && modes >= 1, "FNO layers, width and modes must be positive");
    require(in_channels >= 1 && out_channels >= 1 && proj_hidden >= 1, "FNO channel counts must be positive");
}

FnoConfig FnoConfig::clamped_for(int n) const
{
    FnoConfig c = *this;
    c.modes = std::min(modes, n / 2);
    return c;
}

FnoLayout::FnoLayout(const FnoConfig& c)
{
    const std::size_t w = c.width;
    const std::size_t cin = c.in_channels + FnoConfig::kCoordChannels;
    mode_span = 2 * c.modes - 1;
    mode_count = static_cast<std::size_t>(mode_span) * mode_span;
    std::size_t off = 0;
    auto take = [&off](std::size_t n) {
        const std::size_t at = off;
        off += n;
        return at;
    };
    lift_w = take(w * cin);
    lift_b = take(w);
    for (int l = 0; l < c.layers; ++l) {
        Layer L{};
        L.r_re = take(mode_count * w * w);
        L.r_im = take(mode_count * w * w);
        L.w = take(w * w);
        L.b = take(w);
        layers.push_back(L);
    }
    proj1_w = take(static_cast<std::size_t>(c.proj_hidden) * w);
    proj1_b = take(c.proj_hidden);
    proj2_w = take(static_cast<std::size_t>(c.out_channels) * c.proj_hidden);
    proj2_b = take(c.out_channels);
    if (c.head == HeadKind::ScalarFunctional) {
        head_w = take(c.out_channels);
        head_b = take(1);
    } else {
        head_w = head_b = off;
    }
    total = off;
}

std::string FnoLayout::describe(std::size_t index) const
{
    std::ostringstream os;
    auto in = [&](std::size_t start, std::size_t end, const std::string& name) {
        if (index >= start && index < end) {
            os << name << "[" << index - start << "]";
            return true;
        }
        return false;
    };
    if (in(lift_w, lift_b, "lift.W") || in(lift_b, layers.empty() ? proj1_w : layers[0].r_re, "lift.b")) return os.str();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& L = layers[l];
        const std::size_t next = l + 1 < layers.size() ? layers[l + 1].r_re : proj1_w;
        const std::string p = "layer" + std::to_string(l);
        if (in(L.r_re, L.r_im, p + ".R.re") || in(L.r_im, L.w, p + ".R.im") || in(L.w, L.b, p + ".W") ||
            in(L.b, next, p + ".b"))
            return os.str();
    }
    if (in(proj1_w, proj1_b, "proj1.W") || in(proj1_b, proj2_w, "proj1.b") || in(proj2_w, proj2_b, "proj2.W") ||
        in(proj2_b, head_w, "proj2.b") || in(head_w, head_b, "head.W") || in(head_b, total, "head.b"))
        return os.str();
    return "param[" + std::to_string(index) + "]";
}

FnoParams::FnoParams(const FnoConfig& c) : config(c), layout(c), values(layout.total, 0.0) { c.validate(); }

FnoParams FnoParams::init(const FnoConfig& c, RngStream& rng)
{
    FnoParams p(c);
    auto fill = [&](std::size_t off, std::size_t n, double bound) {
        for (std::size_t i = 0; i < n; ++i) p.values[off + i] = bound * (2.0 * rng.uniform() - 1.0);
    };
    const std::size_t w = c.width, cin = c.in_channels + FnoConfig::kCoordChannels;
    fill(p.layout.lift_w, w * cin, 1.0 / std::sqrt(static_cast<double>(cin)));
    fill(p.layout.lift_b, w, 1.0 / std::sqrt(static_cast<double>(cin)));
    const double spec_scale = 1.0 / static_cast<double>(w * w);
    for (const auto& L : p.layout.layers) {
        const std::size_t n = p.layout.mode_count * w * w;
        for (std::size_t i = 0; i < n; ++i) p.values[L.r_re + i] = spec_scale * rng.uniform();
        for (std::size_t i = 0; i < n; ++i) p.values[L.r_im + i] = spec_scale * rng.uniform();
        fill(L.w, w * w, 1.0 / std::sqrt(static_cast<double>(w)));
        fill(L.b, w, 1.0 / std::sqrt(static_cast<double>(w)));
    }
    const std::size_t h = c.proj_hidden;
    fill(p.layout.proj1_w, h * w, 1.0 / std::sqrt(static_cast<double>(w)));
    fill(p.layout.proj1_b, h, 1.0 / std::sqrt(static_cast<double>(w)));
    fill(p.layout.proj2_w, c.out_channels * h, 1.0 / std::sqrt(static_cast<double>(h)));
    fill(p.layout.proj2_b, c.out_channels, 1.0 / std::sqrt(static_cast<double>(h)));
    if (c.head == HeadKind::ScalarFunctional) {
        fill(p.layout.head_w, c.out_channels, 1.0 / std::sqrt(static_cast<double>(c.out_channels)));
        fill(p.layout.head_b, 1, 1.0 / std::sqrt(static_cast<double>(c.out_channels)));
    }
    return p;
}

LossSpec LossSpec::squared_l2(Field target, double weight, bool cell_weighted)
{
    LossSpec s;
    s.l2_weight = weight;
    s.target = std::move(target);
    s.cell_weighted = cell_weighted;
    return s;
}

LossSpec LossSpec::head(double weight)
{
    LossSpec s;
    s.head_weight = weight;
    return s;
}

namespace {

using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using MutVec = Eigen::Map<Eigen::VectorXd>;

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }
inline double gelu_grad(double x) { return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x); }

void activate(Activation a, const RowMatrix& z, RowMatrix& h)
{
    if (a == Activation::Identity) {
        h = z;
        return;
    }
    h.resize(z.rows(), z.cols());
    const double* zi = z.data();
    double* ho = h.data();
    for (Eigen::Index i = 0; i < z.size(); ++i) ho[i] = gelu(zi[i]);
}

void activate_backward(Activation a, const RowMatrix& z, RowMatrix& grad)
{
    if (a == Activation::Identity) return;
    const double* zi = z.data();
    double* g = grad.data();
    for (Eigen::Index i = 0; i < z.size(); ++i) g[i] *= gelu_grad(zi[i]);
}

// Retained-mode bookkeeping against the r2c half spectrum.
struct ModeMap {
    int hx = 0;
    std::size_t half_size = 0;
    std::vector<std::size_t> half_index; // where mode s (or its conjugate) lives
    std::vector<char> conjugate;         // true when s is read through its conjugate partner
    std::vector<std::size_t> mirror;     // index of -s

    ModeMap(int ny, int nx, int modes)
    {
        hx = nx / 2 + 1;
        half_size = static_cast<std::size_t>(ny) * hx;
        const int span = 2 * modes - 1;
        const std::size_t count = static_cast<std::size_t>(span) * span;
        half_index.resize(count);
        conjugate.resize(count);
        mirror.resize(count);
        for (int sy = -(modes - 1); sy <= modes - 1; ++sy)
            for (int sx = -(modes - 1); sx <= modes - 1; ++sx) {
                const std::size_t s = static_cast<std::size_t>(sy + modes - 1) * span + (sx + modes - 1);
                mirror[s] = static_cast<std::size_t>(-sy + modes - 1) * span + (-sx + modes - 1);
                const bool conj = sx < 0;
                const int ky = conj ? -sy : sy, kx = conj ? -sx : sx;
                half_index[s] = static_cast<std::size_t>((ky + ny) % ny) * hx + kx;
                conjugate[s] = conj;
            }
    }

    void gather(std::span<const cplx> half, cplx* out) const
    {
        for (std::size_t s = 0; s < half_index.size(); ++s) {
            const cplx v = half[half_index[s]];
            out[s] = conjugate[s] ? std::conj(v) : v;
        }
    }

    // Hermitian symmetrization (Y(s) + conj(Y(-s))) / 2 written onto the half spectrum.
    void scatter_symmetric(const cplx* y, std::span<cplx> half) const
    {
        std::fill(half.begin(), half.end(), cplx(0.0));
        for (std::size_t s = 0; s < half_index.size(); ++s) {
            if (conjugate[s]) continue;
            half[half_index[s]] = 0.5 * (y[s] + std::conj(y[mirror[s]]));
        }
    }
};

void check_input(const FnoParams& params, const Field& input)
{
    const FnoConfig& c = params.config;
    require(params.values.size() == params.layout.total, ErrorCode::ShapeMismatch, "FNO parameter vector has wrong size");
    require(input.channels() == c.in_channels, ErrorCode::ShapeMismatch,
            "FNO input has " + std::to_string(input.channels()) + " channels, expected " + std::to_string(c.in_channels));
    require(c.modes <= std::min(input.nx(), input.ny()) / 2,
            "FNO modes (" + std::to_string(c.modes) + ") exceed the grid Nyquist limit");
    input.require_finite("fno input");
}

// Channel-major plane view of a channel-last field, plus coordinate channels.
void lift_features(const Field& input, RowMatrix& x)
{
    const int ci = input.channels();
    const int nx = input.nx(), ny = input.ny();
    const std::size_t n = input.grid().points();
    x.resize(ci + FnoConfig::kCoordChannels, static_cast<Eigen::Index>(n));
    for (std::size_t p = 0; p < n; ++p)
        for (int c = 0; c < ci; ++c) x(c, p) = input[p * ci + c];
    const double two_pi = 2.0 * std::numbers::pi;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t p = static_cast<std::size_t>(iy) * nx + ix;
            const double ax = two_pi * ix / nx, ay = two_pi * iy / ny;
            x(ci + 0, p) = std::cos(ax);
            x(ci + 1, p) = std::sin(ax);
            x(ci + 2, p) = std::cos(ay);
            x(ci + 3, p) = std::sin(ay);
        }
}

} // namespace

void fno_forward_tape(const FnoParams& params, const Field& input, FnoTape& tape)
{
    check_input(params, input);
    const FnoConfig& c = params.config;
    const FnoLayout& L = params.layout;
    const double* P = params.data();
    const int w = c.width;
    const int ny = input.ny(), nx = input.nx();
    const Eigen::Index n = static_cast<Eigen::Index>(input.grid().points());
    const double inv_n = 1.0 / static_cast<double>(n);
    const int cin = c.in_channels + FnoConfig::kCoordChannels;
    const std::size_t S = L.mode_count;

    tape.grid = input.grid();
    lift_features(input, tape.features);
    tape.hidden.resize(c.layers + 1);
    tape.preact.resize(c.layers);
    tape.spectra.resize(c.layers);

    tape.hidden[0].noalias() = ConstMap(P + L.lift_w, w, cin) * tape.features;
    tape.hidden[0].colwise() += ConstVec(P + L.lift_b, w);

    const RealFft2 fft(ny, nx);
    const ModeMap modes(ny, nx, c.modes);
    std::vector<cplx> half(modes.half_size);
    ComplexRowMatrix Y(w, static_cast<Eigen::Index>(S));

    for (int l = 0; l < c.layers; ++l) {
        const auto& layer = L.layers[l];
        const RowMatrix& h = tape.hidden[l];
        ComplexRowMatrix& V = tape.spectra[l];
        V.resize(w, static_cast<Eigen::Index>(S));
        for (int i = 0; i < w; ++i) {
            fft.forward(std::span<const double>(h.data() + i * n, n), half);
            modes.gather(half, V.data() + i * S);
        }
        Y.setZero();
        const double* rre = P + layer.r_re;
        const double* rim = P + layer.r_im;
        for (std::size_t s = 0; s < S; ++s) {
            const double* are = rre + s * w * w;
            const double* aim = rim + s * w * w;
            for (int o = 0; o < w; ++o) {
                cplx acc(0.0);
                for (int i = 0; i < w; ++i) acc += cplx(are[o * w + i], aim[o * w + i]) * V(i, s);
                Y(o, s) = acc;
            }
        }
        RowMatrix& z = tape.preact[l];
        z.resize(w, n);
        for (int o = 0; o < w; ++o) {
            modes.scatter_symmetric(Y.data() + o * S, half);
            fft.inverse(half, std::span<double>(z.data() + o * n, n));
        }
        z *= inv_n;
        z.noalias() += ConstMap(P + layer.w, w, w) * h;
        z.colwise() += ConstVec(P + layer.b, w);
        if (l + 1 < c.layers)
            activate(c.activation, z, tape.hidden[l + 1]);
        else
            tape.hidden[l + 1] = z;
    }

    tape.proj_pre.noalias() = ConstMap(P + L.proj1_w, c.proj_hidden, w) * tape.hidden[c.layers];
    tape.proj_pre.colwise() += ConstVec(P + L.proj1_b, c.proj_hidden);
    activate(c.activation, tape.proj_pre, tape.proj_post);
    tape.out.noalias() = ConstMap(P + L.proj2_w, c.out_channels, c.proj_hidden) * tape.proj_post;
    tape.out.colwise() += ConstVec(P + L.proj2_b, c.out_channels);

    if (c.head == HeadKind::ScalarFunctional) {
        double s = P[L.head_b];
        for (int o = 0; o < c.out_channels; ++o) s += P[L.head_w + o] * tape.out.row(o).mean();
        tape.scalar = s;
    }
}

Field tape_output_field(const FnoParams& params, const FnoTape& tape)
{
    const int co = params.config.out_channels;
    Field out(tape.grid, co);
    const std::size_t n = tape.grid.points();
    for (std::size_t p = 0; p < n; ++p)
        for (int o = 0; o < co; ++o) out[p * co + o] = tape.out(o, static_cast<Eigen::Index>(p));
    return out;
}

Field fno_forward(const FnoParams& params, const Field& input)
{
    require(params.config.head == HeadKind::Field, "fno_forward requires a Field head");
    FnoTape tape;
    fno_forward_tape(params, input, tape);
    return tape_output_field(params, tape);
}

double fno_forward_scalar(const FnoParams& params, const Field& input)
{
    require(params.config.head == HeadKind::ScalarFunctional, "fno_forward_scalar requires a ScalarFunctional head");
    FnoTape tape;
    fno_forward_tape(params, input, tape);
    return tape.scalar;
}

void fno_backward(const FnoParams& params, const FnoTape& tape, const Field* out_cotangent, double scalar_cotangent,
                  std::span<double> d_params, Field* d_input)
{
    const FnoConfig& c = params.config;
    const FnoLayout& L = params.layout;
    const double* P = params.data();
    const int w = c.width;
    const int ny = tape.grid.ny, nx = tape.grid.nx;
    const Eigen::Index n = static_cast<Eigen::Index>(tape.grid.points());
    const double inv_n = 1.0 / static_cast<double>(n);
    const int cin = c.in_channels + FnoConfig::kCoordChannels;
    const std::size_t S = L.mode_count;
    const bool want_params = !d_params.empty();
    if (want_params) require(d_params.size() == L.total, ErrorCode::ShapeMismatch, "gradient buffer has wrong size");
    double* D = want_params ? d_params.data() : nullptr;

    RowMatrix d_out(c.out_channels, n);
    if (c.head == HeadKind::ScalarFunctional) {
        for (int o = 0; o < c.out_channels; ++o) {
            d_out.row(o).setConstant(scalar_cotangent * P[L.head_w + o] * inv_n);
            if (want_params) D[L.head_w + o] += scalar_cotangent * tape.out.row(o).mean();
        }
        if (want_params) D[L.head_b] += scalar_cotangent;
    } else {
        require(out_cotangent != nullptr, "Field-head backward needs an output cotangent");
        require(out_cotangent->grid() == tape.grid && out_cotangent->channels() == c.out_channels, ErrorCode::ShapeMismatch,
                "output cotangent shape mismatch");
        for (Eigen::Index p = 0; p < n; ++p)
            for (int o = 0; o < c.out_channels; ++o) d_out(o, p) = (*out_cotangent)[p * c.out_channels + o];
    }

    if (want_params) {
        MutMap(D + L.proj2_w, c.out_channels, c.proj_hidden).noalias() += d_out * tape.proj_post.transpose();
        MutVec(D + L.proj2_b, c.out_channels) += d_out.rowwise().sum();
    }
    RowMatrix d_proj = ConstMap(P + L.proj2_w, c.out_channels, c.proj_hidden).transpose() * d_out;
    activate_backward(c.activation, tape.proj_pre, d_proj);
    if (want_params) {
        MutMap(D + L.proj1_w, c.proj_hidden, w).noalias() += d_proj * tape.hidden[c.layers].transpose();
        MutVec(D + L.proj1_b, c.proj_hidden) += d_proj.rowwise().sum();
    }
    RowMatrix d_h = ConstMap(P + L.proj1_w, c.proj_hidden, w).transpose() * d_proj;

    const RealFft2 fft(ny, nx);
    const ModeMap modes(ny, nx, c.modes);
    std::vector<cplx> half(modes.half_size);
    ComplexRowMatrix G(w, static_cast<Eigen::Index>(S)), GV(w, static_cast<Eigen::Index>(S));
    RowMatrix d_z, d_prev(w, n);

    for (int l = c.layers - 1; l >= 0; --l) {
        const auto& layer = L.layers[l];
        d_z = d_h;
        if (l + 1 < c.layers) activate_backward(c.activation, tape.preact[l], d_z);
        const RowMatrix& h = tape.hidden[l];
        if (want_params) {
            MutMap(D + layer.w, w, w).noalias() += d_z * h.transpose();
            MutVec(D + layer.b, w) += d_z.rowwise().sum();
        }
        // Spectral path: G = FFT(dz)/N on the retained modes.
        for (int o = 0; o < w; ++o) {
            fft.forward(std::span<const double>(d_z.data() + o * n, n), half);
            modes.gather(half, G.data() + o * S);
        }
        G *= inv_n;
        const ComplexRowMatrix& V = tape.spectra[l];
        const double* rre = P + layer.r_re;
        const double* rim = P + layer.r_im;
        GV.setZero();
        for (std::size_t s = 0; s < S; ++s) {
            const double* are = rre + s * w * w;
            const double* aim = rim + s * w * w;
            double* dre = want_params ? D + layer.r_re + s * w * w : nullptr;
            double* dim = want_params ? D + layer.r_im + s * w * w : nullptr;
            for (int o = 0; o < w; ++o) {
                const cplx g = G(o, s);
                for (int i = 0; i < w; ++i) {
                    if (want_params) {
                        const cplx dr = g * std::conj(V(i, s));
                        dre[o * w + i] += dr.real();
                        dim[o * w + i] += dr.imag();
                    }
                    GV(i, s) += std::conj(cplx(are[o * w + i], aim[o * w + i])) * g;
                }
            }
        }
        for (int i = 0; i < w; ++i) {
            modes.scatter_symmetric(GV.data() + i * S, half);
            fft.inverse(half, std::span<double>(d_prev.data() + i * n, n));
        }
        d_prev.noalias() += ConstMap(P + layer.w, w, w).transpose() * d_z;
        std::swap(d_h, d_prev);
        d_prev.resize(w, n);
    }

    if (want_params) {
        MutMap(D + L.lift_w, w, cin).noalias() += d_h * tape.features.transpose();
        MutVec(D + L.lift_b, w) += d_h.rowwise().sum();
    }
    if (d_input) {
        const RowMatrix dx = ConstMap(P + L.lift_w, w, cin).leftCols(c.in_channels).transpose() * d_h;
        Field g(tape.grid, c.in_channels);
        for (Eigen::Index p = 0; p < n; ++p)
            for (int ch = 0; ch < c.in_channels; ++ch) g[p * c.in_channels + ch] = dx(ch, p);
        *d_input = std::move(g);
    }
}

namespace {

void validate_loss(const FnoParams& params, const Field& input, const LossSpec& loss)
{
    const bool scalar_head = params.config.head == HeadKind::ScalarFunctional;
    if (loss.l2_weight != 0.0) {
        require(!scalar_head, "squared-L2 loss requires a Field head");
        require(loss.target.has_value(), "squared-L2 loss requires a target field");
        require(loss.target->grid() == input.grid() && loss.target->channels() == params.config.out_channels,
                ErrorCode::ShapeMismatch, "loss target shape does not match the FNO output");
    }
    if (loss.head_weight != 0.0) require(scalar_head, "head loss requires a ScalarFunctional head");
    require(loss.l2_weight != 0.0 || loss.head_weight != 0.0, "unsupported loss composition: no active term");
}

} // namespace

double fno_loss(const FnoParams& params, const Field& input, const LossSpec& loss)
{
    validate_loss(params, input, loss);
    FnoTape tape;
    fno_forward_tape(params, input, tape);
    double value = loss.head_weight * tape.scalar;
    if (loss.l2_weight != 0.0) {
        const Field out = tape_output_field(params, tape);
        const double cw = loss.cell_weighted ? 1.0 / static_cast<double>(input.grid().points()) : 1.0;
        long double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double d = out[i] - (*loss.target)[i];
            s += d * d;
        }
        value += loss.l2_weight * cw * static_cast<double>(s);
    }
    return value;
}

GradientBundle fno_grad(const FnoParams& params, const Field& input, const LossSpec& loss)
{
    validate_loss(params, input, loss);
    FnoTape tape;
    fno_forward_tape(params, input, tape);
    GradientBundle g;
    g.d_params.assign(params.size(), 0.0);
    g.loss_value = loss.head_weight * tape.scalar;
    Field cot;
    if (loss.l2_weight != 0.0) {
        const Field out = tape_output_field(params, tape);
        const double cw = loss.cell_weighted ? 1.0 / static_cast<double>(input.grid().points()) : 1.0;
        cot = Field(out.grid(), out.channels());
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double d = out[i] - (*loss.target)[i];
            s += d * d;
            cot[i] = 2.0 * loss.l2_weight * cw * d;
        }
        g.loss_value += loss.l2_weight * cw * s;
    }
    fno_backward(params, tape, loss.l2_weight != 0.0 ? &cot : nullptr, loss.head_weight, g.d_params, &g.d_input);
    return g;
}

json fno_config_to_json(const FnoConfig& c)
{
    return {{"layers", c.layers},           {"width", c.width},
            {"modes", c.modes},             {"in_channels", c.in_channels},
            {"out_channels", c.out_channels}, {"proj_hidden", c.proj_hidden},
            {"activation", to_string(c.activation)}, {"head", to_string(c.head)}};
}

FnoConfig fno_config_from_json(const json& j, FnoConfig c)
{
    try {
        c.layers = j.value("layers", c.layers);
        c.width = j.value("width", c.width);
        c.modes = j.value("modes", c.modes);
        c.in_channels = j.value("in_channels", c.in_channels);
        c.out_channels = j.value("out_channels", c.out_channels);
        c.proj_hidden = j.value("proj_hidden", c.proj_hidden);
        if (j.contains("activation")) {
            const std::string a = j.at("activation").get<std::string>();
            require(a == "gelu" || a == "identity", "unknown activation '" + a + "'");
            c.activation = a == "gelu" ? Activation::Gelu : Activation::Identity;
        }
        if (j.contains("head")) {
            const std::string h = j.at("head").get<std::string>();
            require(h == "scalar" || h == "field", "unknown head '" + h + "'");
            c.head = h == "scalar" ? HeadKind::ScalarFunctional : HeadKind::Field;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed FNO config: ") + e.what());
    }
    c.validate();
    return c;
}

void save_fno(const std::filesystem::path& stem, const FnoParams& params)
{
    json j = fno_config_to_json(params.config);
    j["parameter_count"] = params.size();
    std::ofstream os(std::filesystem::path(stem).concat(".json"));
    if (!os) throw Error(ErrorCode::Io, "cannot write " + stem.string() + ".json");
    os << j.dump(2) << "\n";
    write_tensor(std::filesystem::path(stem).concat(".dgpt"), Tensor{{params.size()}, params.values});
}

FnoParams load_fno(const std::filesystem::path& stem)
{
    std::ifstream is(std::filesystem::path(stem).concat(".json"));
    if (!is) throw Error(ErrorCode::Io, "cannot read " + stem.string() + ".json");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed FNO config: ") + e.what());
    }
    for (const char* key : {"layers", "width", "modes", "in_channels", "out_channels", "proj_hidden"})
        require(j.contains(key), "FNO config " + stem.string() + ".json lacks '" + key + "'");
    FnoParams p(fno_config_from_json(j));
    Tensor t = read_tensor(std::filesystem::path(stem).concat(".dgpt"));
    require(t.dims.size() == 1 && t.data.size() == p.size(), ErrorCode::ShapeMismatch,
            "checkpoint parameter count does not match its config");
    p.values = std::move(t.data);
    return p;
}

} // namespace dgp
