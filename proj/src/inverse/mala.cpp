#include "inverse/mala.hpp"

#include "core/error.hpp"

#include <cmath>
#include <limits>

namespace dgp {

double mala_log_proposal(const std::vector<double>& to, const std::vector<double>& from,
                         const std::vector<double>& grad_from, double tau)
{
    double s = 0.0;
    for (std::size_t i = 0; i < to.size(); ++i) {
        const double d = to[i] - from[i] - tau * grad_from[i];
        s += d * d;
    }
    return -s / (4.0 * tau);
}

double mala_log_accept(const std::vector<double>& x, double logp_x, const std::vector<double>& grad_x,
                       const std::vector<double>& y, double logp_y, const std::vector<double>& grad_y, double tau)
{
    const double r = logp_y + mala_log_proposal(x, y, grad_y, tau) - logp_x - mala_log_proposal(y, x, grad_x, tau);
    if (std::isnan(r)) return -std::numeric_limits<double>::infinity();
    return std::min(0.0, r);
}

void MalaConfig::validate() const
{
    require(std::isfinite(step_size) && step_size > 0.0, "mala: step_size must be > 0");
    require(n_steps >= 1 && burn_in >= 0 && burn_in < n_steps, "mala: need 0 <= burn_in < n_steps");
}

namespace {

bool finite_all(const std::vector<double>& v)
{
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

MalaChainResult mala_run(const MalaTarget& target, std::vector<double> x, const MalaConfig& cfg, RngStream& rng,
                         bool keep_states, const std::function<void(const std::vector<double>&)>& on_keep)
{
    cfg.validate();
    const std::size_t n = x.size();
    const double tau = cfg.step_size, s = std::sqrt(2.0 * tau);
    std::vector<double> gx(n), y(n), gy(n);
    double lx = target.log_density(x, gx);
    require(std::isfinite(lx) && finite_all(gx), ErrorCode::NonFinite, "mala: initial state has non-finite density");

    MalaChainResult res;
    res.mean.assign(n, 0.0);
    std::vector<double> m2(n, 0.0);
    std::size_t kept = 0;
    for (int step = 0; step < cfg.n_steps; ++step) {
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + tau * gx[i] + s * rng.normal();
        const double u = rng.uniform();
        double ly = -std::numeric_limits<double>::infinity();
        bool ok = finite_all(y);
        if (ok) {
            ly = target.log_density(y, gy);
            ok = std::isfinite(ly) && finite_all(gy);
        }
        if (!ok) {
            ++res.rejected_nonfinite;
        } else if (std::log(u) < mala_log_accept(x, lx, gx, y, ly, gy, tau)) {
            x.swap(y);
            gx.swap(gy);
            lx = ly;
            ++res.accepted;
        }
        if (step < cfg.burn_in) continue;
        // Welford update of mean and variance.
        ++kept;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x[i] - res.mean[i];
            res.mean[i] += d / static_cast<double>(kept);
            m2[i] += d * (x[i] - res.mean[i]);
        }
        if (keep_states) res.kept.push_back(x);
        if (on_keep) on_keep(x);
    }
    res.variance.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.variance[i] = m2[i] / static_cast<double>(kept);
    return res;
}

PerturbationTarget::PerturbationTarget(PerturbationModel model, Field u_star, double obs_sigma, bool likelihood)
    : model_(std::move(model)), u_star_(std::move(u_star)), sigma_(obs_sigma), likelihood_(likelihood)
{
    require(!likelihood_ || (std::isfinite(sigma_) && sigma_ > 0.0), "mala: obs_sigma must be > 0");
    require(model_.decode && model_.forward, "mala: decoder and forward model required");
    require(!likelihood_ || (model_.decode_vjp && model_.forward_vjp), "mala: gradients of decoder and forward required");
}

Field PerturbationTarget::design(const std::vector<double>& x) const
{
    Field u = u_star_;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += x[i];
    return model_.decode(u);
}

double PerturbationTarget::log_density(const std::vector<double>& x, std::vector<double>& grad) const
{
    require(x.size() == u_star_.size(), ErrorCode::ShapeMismatch, "mala: state size does not match the target");
    grad.assign(x.size(), 0.0);
    double lp = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lp -= 0.5 * x[i] * x[i];
        grad[i] = -x[i];
    }
    if (!likelihood_) return lp;

    Field u = u_star_;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += x[i];
    const Field a = model_.decode(u);
    const Field pred = model_.forward(a);
    require(pred.size() == u_star_.size(), ErrorCode::ShapeMismatch, "mala: forward output does not match the target");
    const double inv = 1.0 / (sigma_ * sigma_);
    Field cot(pred.grid(), pred.channels());
    double r2 = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - u_star_[i];
        r2 += e * e;
        cot[i] = -e * inv; // d(log p)/d pred
    }
    lp -= 0.5 * r2 * inv;
    const Field du = model_.decode_vjp(u, model_.forward_vjp(a, cot));
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += du[i];
    return lp;
}

MalaDesignResult mala_chain(const PerturbationTarget& target, const MalaConfig& cfg, RngStream& rng)
{
    MalaDesignResult out;
    Field sum;
    std::size_t count = 0;
    out.chain = mala_run(target, std::vector<double>(target.u_star().size(), 0.0), cfg, rng, false,
                         [&](const std::vector<double>& x) {
                             const Field a = target.design(x);
                             if (count++ == 0)
                                 sum = a;
                             else
                                 for (std::size_t i = 0; i < a.size(); ++i) sum[i] += a[i];
                         });
    out.mean_design = scaled(sum, 1.0 / static_cast<double>(count));
    return out;
}

} // namespace dgp

namespace dgp {

PerturbationModel fno_perturbation_model(const FnoParams& surrogate, const FnoParams& generator, Field q0)
{
    PerturbationModel m;
    const FnoParams* F = &surrogate;
    const FnoParams* G = &generator;
    m.decode = [G, q0](const Field& u) { return fno_forward(*G, Field::concat(q0, u)); };
    m.decode_vjp = [G, q0](const Field& u, const Field& cot) {
        FnoTape tape;
        fno_forward_tape(*G, Field::concat(q0, u), tape);
        Field d_in;
        fno_backward(*G, tape, &cot, 0.0, {}, &d_in);
        Field du(u.grid(), u.channels());
        const int qc = q0.channels(), ic = d_in.channels(), uc = u.channels();
        for (std::size_t p = 0; p < u.grid().points(); ++p)
            for (int c = 0; c < uc; ++c) du[p * uc + c] = d_in[p * ic + qc + c];
        return du;
    };
    m.forward = [F](const Field& a) { return fno_forward(*F, a); };
    m.forward_vjp = [F](const Field& a, const Field& cot) {
        FnoTape tape;
        fno_forward_tape(*F, a, tape);
        Field d_in;
        fno_backward(*F, tape, &cot, 0.0, {}, &d_in);
        return d_in;
    };
    return m;
}

} // namespace dgp
