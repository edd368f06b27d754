#include "inverse/langevin.hpp"

#include "core/error.hpp"

#include <chrono>
#include <cmath>

namespace dgp {

using nlohmann::json;

std::string to_string(InverseMode m)
{
    return m == InverseMode::Map ? "map" : "posterior";
}

std::string to_string(InverseVariant v)
{
    switch (v) {
    case InverseVariant::WithPrior: return "with-prior";
    case InverseVariant::NoPriorRandomInit: return "no-prior-random";
    case InverseVariant::NoPriorConditionInit: return "no-prior-condition";
    case InverseVariant::PriorOnly: return "prior-only";
    }
    return "unknown";
}

InverseMode inverse_mode_from_string(const std::string& s)
{
    if (s == "map") return InverseMode::Map;
    if (s == "posterior") return InverseMode::Posterior;
    throw Error(ErrorCode::InvalidArgument, "unknown inverse mode '" + s + "'");
}

InverseVariant inverse_variant_from_string(const std::string& s)
{
    for (auto v : {InverseVariant::WithPrior, InverseVariant::NoPriorRandomInit, InverseVariant::NoPriorConditionInit,
                   InverseVariant::PriorOnly})
        if (to_string(v) == s) return v;
    throw Error(ErrorCode::InvalidArgument, "unknown inverse variant '" + s + "'");
}

void InverseConfig::validate() const
{
    require(std::isfinite(gamma) && gamma >= 0.0, "inverse: gamma must be finite and >= 0");
    require(std::isfinite(l2_lambda) && l2_lambda >= 0.0, "inverse: l2_lambda must be finite and >= 0");
    require(steps >= 0, "inverse: steps must be >= 0");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && eps > 0.0,
            "inverse: invalid preconditioner constants");
    if (mode == InverseMode::Posterior) {
        require(variant == InverseVariant::WithPrior, "inverse: posterior mode requires the with-prior variant");
        require(n_samples >= 1 && thinning >= 1 && burn_in >= 0, "inverse: invalid posterior sampling schedule");
        require(steps >= burn_in, "inverse: posterior steps must be >= burn_in");
        require(burn_in + n_samples * thinning <= steps,
                "inverse: steps too small to collect n_samples after burn_in at the thinning interval");
    }
}

json InverseConfig::to_json() const
{
    json j = {{"gamma", gamma},        {"l2_lambda", l2_lambda}, {"steps", steps},
              {"mode", to_string(mode)}, {"n_samples", n_samples}, {"burn_in", burn_in},
              {"thinning", thinning},  {"variant", to_string(variant)}, {"precondition", preconditioned()},
              {"beta1", beta1},        {"beta2", beta2},          {"eps", eps},
              {"seed", seed}};
    return j;
}

InverseConfig InverseConfig::from_json(const json& j)
{
    InverseConfig c;
    try {
        c.gamma = j.value("gamma", c.gamma);
        c.l2_lambda = j.value("l2_lambda", c.l2_lambda);
        c.steps = j.value("steps", c.steps);
        if (j.contains("mode")) c.mode = inverse_mode_from_string(j.at("mode").get<std::string>());
        c.n_samples = j.value("n_samples", c.n_samples);
        c.burn_in = j.value("burn_in", c.burn_in);
        c.thinning = j.value("thinning", c.thinning);
        if (j.contains("variant")) c.variant = inverse_variant_from_string(j.at("variant").get<std::string>());
        if (j.contains("precondition") && !j.at("precondition").is_null())
            c.precondition = j.at("precondition").get<bool>();
        c.beta1 = j.value("beta1", c.beta1);
        c.beta2 = j.value("beta2", c.beta2);
        c.eps = j.value("eps", c.eps);
        c.seed = j.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("inverse config: ") + e.what());
    }
    c.validate();
    return c;
}

LatentObjective::LatentObjective(const FnoParams& surrogate, const FnoParams* generator, Field u_star_norm,
                                 double lambda)
    : surrogate_(surrogate), generator_(generator), u_star_(std::move(u_star_norm)), lambda_(lambda)
{
    require(surrogate.config.head == HeadKind::Field, "inverse: surrogate must have a field head");
    require(surrogate.config.out_channels == u_star_.channels(), ErrorCode::ShapeMismatch,
            "inverse: surrogate output channels do not match the target");
    if (generator_)
        require(generator_->config.in_channels > u_star_.channels() &&
                    generator_->config.out_channels == surrogate.config.in_channels,
                ErrorCode::ShapeMismatch, "inverse: generator and surrogate channel counts are inconsistent");
}

Field LatentObjective::decode(const Field& z) const
{
    if (!generator_) return z;
    return fno_forward(*generator_, Field::concat(z, u_star_));
}

double LatentObjective::data_term(const Field& z) const
{
    const Field pred = fno_forward(surrogate_, decode(z));
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (u_star_[i] - pred[i]) * (u_star_[i] - pred[i]);
    return s;
}

double LatentObjective::value(const Field& z) const
{
    return data_term(z) + lambda_ * sum_squares(z);
}

double LatentObjective::value_and_grad(const Field& z, Field& grad) const
{
    FnoTape gt;
    Field a;
    if (generator_) {
        fno_forward_tape(*generator_, Field::concat(z, u_star_), gt);
        a = tape_output_field(*generator_, gt);
    } else {
        a = z;
    }
    FnoTape ft;
    fno_forward_tape(surrogate_, a, ft);
    const Field pred = tape_output_field(surrogate_, ft);
    Field cot(pred.grid(), pred.channels());
    double data = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - u_star_[i];
        data += e * e;
        cot[i] = 2.0 * e;
    }
    Field da;
    fno_backward(surrogate_, ft, &cot, 0.0, {}, &da);
    Field dz;
    if (generator_) {
        Field d_in;
        fno_backward(*generator_, gt, &da, 0.0, {}, &d_in);
        dz = Field(z.grid(), z.channels());
        const int zc = z.channels(), ic = d_in.channels();
        for (std::size_t p = 0; p < z.grid().points(); ++p)
            for (int c = 0; c < zc; ++c) dz[p * zc + c] = d_in[p * ic + c];
    } else {
        dz = std::move(da);
    }
    for (std::size_t i = 0; i < dz.size(); ++i) dz[i] += 2.0 * lambda_ * z[i];
    grad = std::move(dz);
    return data + lambda_ * sum_squares(z);
}

void langevin_step(LatentState& state, const LatentObjective& objective, const InverseConfig& cfg, bool noise)
{
    const std::size_t step = ++state.step;
    if (cfg.gamma == 0.0) return;
    Field g;
    objective.value_and_grad(state.z, g);
    if (!g.all_finite())
        throw Error(ErrorCode::NonFinite, "inverse: non-finite gradient at step " + std::to_string(step));
    const std::size_t n = state.z.size();
    if (cfg.preconditioned()) {
        if (state.m.size() != n) {
            state.m.assign(n, 0.0);
            state.v.assign(n, 0.0);
        }
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        for (std::size_t i = 0; i < n; ++i) {
            state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g[i];
            state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            g[i] = (state.m[i] / bc1) / (std::sqrt(state.v[i] / bc2) + cfg.eps);
        }
    }
    for (std::size_t i = 0; i < n; ++i) state.z[i] -= cfg.gamma * g[i];
    if (noise) {
        const double s = std::sqrt(2.0 * cfg.gamma);
        for (std::size_t i = 0; i < n; ++i) state.z[i] += s * state.rng.normal();
    }
    if (!state.z.all_finite())
        throw Error(ErrorCode::NonFinite, "inverse: non-finite state at step " + std::to_string(step));
}

namespace {

constexpr std::uint64_t kInitStream = 0x1d01;
constexpr std::uint64_t kNoiseStream = 0x1d02;

Field normal_field(const Grid& g, int channels, RngStream& rng)
{
    Field f(g, channels);
    for (double& v : f.storage()) v = rng.normal();
    return f;
}

CandidateSolution finish(const LatentObjective& obj, const Field& z, const ChannelStats& a_stats,
                         std::vector<double> trace, double seconds)
{
    CandidateSolution c;
    c.a = denormalize(obj.decode(z), a_stats);
    c.surrogate_loss = obj.data_term(z);
    c.q_final = z;
    c.trace = std::move(trace);
    c.seconds = seconds;
    require(c.a.all_finite(), ErrorCode::NonFinite, "inverse: decoded design is not finite");
    return c;
}

} // namespace

std::vector<CandidateSolution> run_inverse(const Field& u_star, const InverseModels& models, const InverseConfig& cfg)
{
    cfg.validate();
    require(models.surrogate != nullptr, "inverse: surrogate model missing");
    const bool uses_prior = cfg.variant != InverseVariant::NoPriorRandomInit;
    require(!uses_prior || models.prior != nullptr, "inverse: variant " + to_string(cfg.variant) + " needs a prior");
    require(u_star.all_finite(), ErrorCode::NonFinite, "inverse: target is not finite");

    const auto t0 = std::chrono::steady_clock::now();
    const Field u_norm = normalize(u_star, models.u_stats);
    const Grid& g = u_star.grid();
    RngStream init(cfg.seed, kInitStream);
    const FnoParams* gen = uses_prior ? &models.prior->generator : nullptr;

    LatentState state;
    state.rng = RngStream(cfg.seed, kNoiseStream);
    const bool latent = cfg.variant == InverseVariant::WithPrior || cfg.variant == InverseVariant::PriorOnly;
    const LatentObjective obj(*models.surrogate, latent ? gen : nullptr, u_norm, cfg.l2_lambda);

    switch (cfg.variant) {
    case InverseVariant::WithPrior:
    case InverseVariant::PriorOnly: state.z = normal_field(g, models.prior->q_channels, init); break;
    case InverseVariant::NoPriorRandomInit: state.z = normal_field(g, models.surrogate->config.in_channels, init); break;
    case InverseVariant::NoPriorConditionInit: {
        const Field q0 = normal_field(g, models.prior->q_channels, init);
        state.z = models.prior->generate(q0, u_norm);
        break;
    }
    }

    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    std::vector<CandidateSolution> out;
    if (cfg.variant == InverseVariant::PriorOnly) {
        out.push_back(finish(obj, state.z, models.a_stats, {}, elapsed()));
        return out;
    }

    const bool posterior = cfg.mode == InverseMode::Posterior;
    std::vector<double> trace;
    for (int s = 1; s <= cfg.steps; ++s) {
        trace.push_back(obj.value(state.z));
        langevin_step(state, obj, cfg, posterior);
        if (posterior && s > cfg.burn_in && (s - cfg.burn_in) % cfg.thinning == 0 &&
            static_cast<int>(out.size()) < cfg.n_samples)
            out.push_back(finish(obj, state.z, models.a_stats, trace, 0.0));
    }
    if (!posterior) out.push_back(finish(obj, state.z, models.a_stats, std::move(trace), 0.0));
    const double per = elapsed() / static_cast<double>(out.size());
    for (auto& c : out) c.seconds = per;
    return out;
}

} // namespace dgp
