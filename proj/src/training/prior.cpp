#include "training/prior.hpp"

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "training/adam.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <string>

namespace dgp {

namespace {

constexpr std::uint64_t kGenInitStream = 0x9e01;
constexpr std::uint64_t kCriticInitStream = 0x9e02;
constexpr std::uint64_t kShuffleStream = 0x9e03;
constexpr std::uint64_t kNoiseStream = 0x9e04;

Field a_slice(const Field& f, int channels)
{
    Field out(f.grid(), channels);
    const int ch = f.channels();
    for (std::size_t p = 0; p < f.grid().points(); ++p)
        for (int c = 0; c < channels; ++c) out[p * channels + c] = f[p * ch + c];
    return out;
}

void accumulate(std::vector<double>& dst, const std::vector<std::vector<double>>& parts)
{
    std::fill(dst.begin(), dst.end(), 0.0);
    for (const auto& p : parts)
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += p[i];
}

void check_finite(double v, const char* what, std::size_t step)
{
    if (!std::isfinite(v))
        throw Error(ErrorCode::Divergence,
                    std::string("train-prior: non-finite ") + what + " at generator step " + std::to_string(step));
}

} // namespace

double FnoCritic::value(const Field& a) const
{
    return fno_forward_scalar(params_, Field::concat(a, u_));
}

double FnoCritic::value_and_grad(const Field& a, double weight, std::span<double> d_params) const
{
    FnoTape tape;
    fno_forward_tape(params_, Field::concat(a, u_), tape);
    fno_backward(params_, tape, nullptr, weight, d_params, nullptr);
    return tape.scalar;
}

GpResult gp_penalty_fd(const Critic& critic, const Field& a_real, const Field& a_fake, double r, double h,
                       double lambda, std::span<double> d_params, double weight)
{
    require(r >= 0.0 && r <= 1.0, "gradient penalty: r must lie in [0, 1]");
    require(h > 0.0, "gradient penalty: h must be > 0");
    require(a_real.same_shape(a_fake), ErrorCode::ShapeMismatch, "gradient penalty: real/fake shape mismatch");
    Field v = axpy(-1.0, a_fake, a_real);
    const double vn = l2_norm(v);
    require(vn > 0.0, "gradient penalty: real and fake coincide (zero direction)");
    for (double& x : v.storage()) x /= vn;

    const Field mid = axpy(r, a_fake, scaled(a_real, 1.0 - r));
    const double hs = h * std::max(1.0, l2_norm(mid));
    const Field plus = axpy(hs, v, mid), minus = axpy(-hs, v, mid);

    GpResult res;
    if (d_params.empty()) {
        res.directional = (critic.value(plus) - critic.value(minus)) / (2.0 * hs);
        res.penalty = lambda * (res.directional - 1.0) * (res.directional - 1.0);
        return res;
    }
    require(d_params.size() == critic.param_count(), ErrorCode::ShapeMismatch, "gradient penalty: gradient size");
    std::vector<double> gp(critic.param_count(), 0.0), gm(critic.param_count(), 0.0);
    const double dp = critic.value_and_grad(plus, 1.0, gp);
    const double dm = critic.value_and_grad(minus, 1.0, gm);
    res.directional = (dp - dm) / (2.0 * hs);
    res.penalty = lambda * (res.directional - 1.0) * (res.directional - 1.0);
    const double coef = weight * 2.0 * lambda * (res.directional - 1.0) / (2.0 * hs);
    for (std::size_t i = 0; i < gp.size(); ++i) d_params[i] += coef * (gp[i] - gm[i]);
    return res;
}

Field PriorModel::generate(const Field& q, const Field& u_norm) const
{
    return fno_forward(generator, Field::concat(q, u_norm));
}

Field PriorModel::sample_latent(const Grid& g, RngStream& rng) const
{
    Field q(g, q_channels);
    for (double& v : q.storage()) v = rng.normal();
    return q;
}

void PriorModel::save(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);
    save_fno(dir / "generator", generator);
    save_fno(dir / "critic", critic);
    std::ofstream out(dir / "prior.json");
    out << nlohmann::json{{"q_channels", q_channels}}.dump(2) << '\n';
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + (dir / "prior.json").string());
}

PriorModel PriorModel::load(const std::filesystem::path& dir)
{
    PriorModel m;
    m.generator = load_fno(dir / "generator");
    m.critic = load_fno(dir / "critic");
    std::ifstream in(dir / "prior.json");
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + (dir / "prior.json").string());
    try {
        nlohmann::json j;
        in >> j;
        m.q_channels = j.at("q_channels").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("prior.json: ") + e.what());
    }
    require(m.generator.config.in_channels > m.q_channels, ErrorCode::ShapeMismatch,
            "prior: generator input channels inconsistent with q_channels");
    require(m.critic.config.head == HeadKind::ScalarFunctional, "prior: critic must have a scalar head");
    return m;
}

PriorModel init_prior(const Dataset& ds, const FnoConfig& generator_net, const FnoConfig& critic_net, int q_channels,
                      std::uint64_t seed)
{
    require(q_channels >= 1, "train-prior: q_channels must be >= 1");
    require(!ds.a_train.empty(), "train-prior: empty training set");
    const int a_ch = ds.a_train.front().channels(), u_ch = ds.u_train.front().channels();
    const int n = std::min(ds.a_train.front().nx(), ds.a_train.front().ny());
    FnoConfig gc = generator_net;
    gc.in_channels = q_channels + u_ch;
    gc.out_channels = a_ch;
    gc.head = HeadKind::Field;
    gc = gc.clamped_for(n);
    FnoConfig cc = critic_net;
    cc.in_channels = a_ch + u_ch;
    cc.out_channels = 1;
    cc.head = HeadKind::ScalarFunctional;
    cc = cc.clamped_for(n);

    RngStream gi(seed, kGenInitStream), ci(seed, kCriticInitStream);
    PriorModel m;
    m.q_channels = q_channels;
    m.generator = FnoParams::init(gc, gi);
    m.critic = FnoParams::init(cc, ci);
    return m;
}

PriorResult train_prior(const Dataset& ds, const FnoConfig& generator_net, const FnoConfig& critic_net, int q_channels,
                        const TrainConfig& cfg, const PriorObserver& observer)
{
    cfg.validate();
    require(!ds.a_train.empty(), "train-prior: empty training set");
    require(ds.a_train.size() == ds.u_train.size(), ErrorCode::ShapeMismatch, "train-prior: unpaired data");

    PriorResult res;
    res.model = init_prior(ds, generator_net, critic_net, q_channels, cfg.seed);
    PriorModel& m = res.model;
    const int a_ch = ds.a_train.front().channels();

    std::vector<Field> a, u;
    for (std::size_t i = 0; i < ds.a_train.size(); ++i) {
        a.push_back(normalize(ds.a_train[i], ds.manifest.a_stats));
        u.push_back(normalize(ds.u_train[i], ds.manifest.u_stats));
    }

    const std::size_t T = cfg.total_steps(a.size());
    const AdamConfig g_adam = AdamConfig::adversarial(cfg.lr0, T);
    const AdamConfig c_adam = AdamConfig::adversarial(cfg.lr0, T * static_cast<std::size_t>(cfg.n_critic));
    AdamState g_state(m.generator.size()), c_state(m.critic.size());
    BatchSampler sampler(a.size(), cfg.batch, cfg.seed, kShuffleStream);
    RngStream noise(cfg.seed, kNoiseStream);
    const Grid g = a.front().grid();

    std::vector<double> c_grad(m.critic.size()), g_grad(m.generator.size());
    std::size_t critic_step = 0, monotone = 0;
    for (std::size_t step = 1; step <= T; ++step) {
        const auto idx = sampler.next();
        const std::size_t B = idx.size();
        const double inv_b = 1.0 / static_cast<double>(B);
        std::vector<Field> q(B), fake(B);
        for (std::size_t b = 0; b < B; ++b) q[b] = m.sample_latent(g, noise);
        parallel_for(B, cfg.threads, [&](std::size_t b) { fake[b] = m.generate(q[b], u[idx[b]]); });

        // The interpolation weights are fixed for the outer iteration, so every
        // inner step ascends the same objective real - fake - penalty.
        std::vector<double> r(B);
        for (double& x : r) x = noise.uniform();
        double wasserstein = 0.0;
        auto critic_pass = [&](bool with_grad) {
            std::vector<std::vector<double>> parts(with_grad ? B : 0, std::vector<double>(m.critic.size(), 0.0));
            std::vector<double> obj_b(B), w_b(B);
            parallel_for(B, cfg.threads, [&](std::size_t b) {
                const FnoCritic critic(m.critic, u[idx[b]]);
                const std::span<double> d = with_grad ? std::span<double>(parts[b]) : std::span<double>();
                double dr, df, pen = 0.0;
                if (with_grad) {
                    dr = critic.value_and_grad(a[idx[b]], -inv_b, d);
                    df = critic.value_and_grad(fake[b], inv_b, d);
                } else {
                    dr = critic.value(a[idx[b]]);
                    df = critic.value(fake[b]);
                }
                if (cfg.gp_lambda > 0.0)
                    pen = gp_penalty_fd(critic, a[idx[b]], fake[b], r[b], cfg.gp_h, cfg.gp_lambda, d, inv_b).penalty;
                obj_b[b] = dr - df - pen;
                w_b[b] = dr - df;
            });
            double obj = 0.0;
            wasserstein = 0.0;
            for (std::size_t b = 0; b < B; ++b) {
                obj += obj_b[b] * inv_b;
                wasserstein += w_b[b] * inv_b;
            }
            check_finite(obj, "critic objective", step);
            if (with_grad) accumulate(c_grad, parts);
            return obj;
        };
        std::vector<double> objective;
        for (int k = 0; k < cfg.n_critic; ++k) {
            objective.push_back(critic_pass(true));
            adam_step(m.critic.values, c_grad, c_state, ++critic_step, c_adam);
        }
        objective.push_back(critic_pass(false));
        bool mono = true;
        for (std::size_t k = 1; k < objective.size(); ++k) mono = mono && objective[k] >= objective[k - 1];
        monotone += mono ? 1 : 0;

        // Generator: minimize -mean d(G(q, u), u).
        std::vector<std::vector<double>> parts(B, std::vector<double>(m.generator.size(), 0.0));
        std::vector<double> gl(B);
        parallel_for(B, cfg.threads, [&](std::size_t b) {
            FnoTape gt, ct;
            fno_forward_tape(m.generator, Field::concat(q[b], u[idx[b]]), gt);
            const Field out = tape_output_field(m.generator, gt);
            fno_forward_tape(m.critic, Field::concat(out, u[idx[b]]), ct);
            gl[b] = -ct.scalar * inv_b;
            Field d_in;
            fno_backward(m.critic, ct, nullptr, -inv_b, {}, &d_in);
            const Field cot = a_slice(d_in, a_ch);
            fno_backward(m.generator, gt, &cot, 0.0, parts[b], nullptr);
        });
        double gloss = 0.0;
        for (double v : gl) gloss += v;
        check_finite(gloss, "generator loss", step);
        accumulate(g_grad, parts);
        const double lr = adam_step(m.generator.values, g_grad, g_state, step, g_adam);
        res.curve.push_back({step, wasserstein, lr});
        if (observer) observer(step, m, wasserstein);
    }
    res.critic_monotone_fraction = static_cast<double>(monotone) / static_cast<double>(T);
    return res;
}

} // namespace dgp
