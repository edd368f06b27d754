#include "training/surrogate.hpp"

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "training/adam.hpp"

#include <cmath>
#include <string>

namespace dgp {

namespace {

constexpr std::uint64_t kInitStream = 0x5a11;
constexpr std::uint64_t kShuffleStream = 0x5a12;

std::vector<Field> normalized(const std::vector<Field>& v, const ChannelStats& s)
{
    std::vector<Field> out;
    out.reserve(v.size());
    for (const Field& f : v) out.push_back(normalize(f, s));
    return out;
}

} // namespace

double relative_l2_loss(const Field& pred, const Field& target, Field* grad)
{
    require(pred.same_shape(target), ErrorCode::ShapeMismatch, "relative loss: shape mismatch");
    double ee = 0.0, tt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - target[i];
        ee += e * e;
        tt += target[i] * target[i];
    }
    const double en = std::sqrt(ee), tn = std::max(std::sqrt(tt), 1e-12);
    if (grad) {
        *grad = Field(pred.grid(), pred.channels());
        if (en > 0.0)
            for (std::size_t i = 0; i < pred.size(); ++i) (*grad)[i] = (pred[i] - target[i]) / (en * tn);
    }
    return en / tn;
}

double surrogate_loss(const FnoParams& params, const std::vector<Field>& a, const std::vector<Field>& u, int threads)
{
    require(!a.empty() && a.size() == u.size(), "surrogate loss: empty or unpaired data");
    std::vector<double> per(a.size());
    parallel_for(a.size(), threads, [&](std::size_t i) { per[i] = relative_l2_loss(fno_forward(params, a[i]), u[i]); });
    double s = 0.0;
    for (double v : per) s += v;
    return s / static_cast<double>(a.size());
}

FnoParams init_surrogate(const Dataset& ds, const FnoConfig& net, std::uint64_t seed)
{
    require(!ds.a_train.empty(), "train-surrogate: empty training set");
    FnoConfig c = net;
    c.in_channels = ds.a_train.front().channels();
    c.out_channels = ds.u_train.front().channels();
    c.head = HeadKind::Field;
    c = c.clamped_for(std::min(ds.a_train.front().nx(), ds.a_train.front().ny()));
    c.validate();
    RngStream init(seed, kInitStream);
    return FnoParams::init(c, init);
}

SurrogateResult train_surrogate(const Dataset& ds, const FnoConfig& net, const TrainConfig& cfg)
{
    cfg.validate();
    require(!ds.a_train.empty(), "train-surrogate: empty training set");
    require(ds.a_train.size() == ds.u_train.size(), ErrorCode::ShapeMismatch, "train-surrogate: unpaired data");

    const auto a = normalized(ds.a_train, ds.manifest.a_stats);
    const auto u = normalized(ds.u_train, ds.manifest.u_stats);

    SurrogateResult res{init_surrogate(ds, net, cfg.seed), {}};
    FnoParams& p = res.params;

    const std::size_t T = cfg.total_steps(a.size());
    AdamConfig acfg;
    acfg.lr0 = cfg.lr0;
    acfg.total_steps = T;
    AdamState state(p.size());
    BatchSampler sampler(a.size(), cfg.batch, cfg.seed, kShuffleStream);

    std::vector<double> grad(p.size());
    for (std::size_t step = 1; step <= T; ++step) {
        const auto idx = sampler.next();
        const std::size_t B = idx.size();
        std::vector<std::vector<double>> per_grad(B, std::vector<double>(p.size(), 0.0));
        std::vector<double> per_loss(B);
        parallel_for(B, cfg.threads, [&](std::size_t b) {
            FnoTape tape;
            fno_forward_tape(p, a[idx[b]], tape);
            Field cot;
            per_loss[b] = relative_l2_loss(tape_output_field(p, tape), u[idx[b]], &cot);
            fno_backward(p, tape, &cot, 0.0, per_grad[b], nullptr);
        });
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
            loss += per_loss[b];
            for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += per_grad[b][i];
        }
        loss /= static_cast<double>(B);
        for (double& g : grad) g /= static_cast<double>(B);
        if (!std::isfinite(loss))
            throw Error(ErrorCode::Divergence, "train-surrogate: non-finite loss at step " + std::to_string(step));
        const double lr = adam_step(p.values, grad, state, step, acfg);
        res.curve.push_back({step, loss, lr});
    }
    return res;
}

} // namespace dgp
