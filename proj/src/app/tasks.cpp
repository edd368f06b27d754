#include "app/tasks.hpp"

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "solvers/darcy.hpp"
#include "solvers/litho.hpp"
#include "solvers/navier_stokes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dgp {

using nlohmann::json;

namespace {

PsiMode task_psi(TaskKind t)
{
    switch (t) {
    case TaskKind::DarcyContinuous: return PsiMode::exp();
    case TaskKind::DarcyClipped: return PsiMode::clip();
    default: return PsiMode::identity();
    }
}

NsConfig ns_config(const json& tc, const Grid& g)
{
    NsConfig c;
    c.nu = tc.at("nu");
    c.T = tc.at("T");
    c.dt = tc.at("dt");
    c.n_snapshots = tc.at("n_snapshots");
    c.forcing = ns_default_forcing(g);
    return c;
}

LithoConfig litho_config(const json& tc)
{
    LithoConfig c;
    c.sigma_optical = tc.at("sigma_optical");
    c.sigma_resist = tc.at("sigma_resist");
    c.tau_resist = tc.at("tau_resist");
    c.beta = tc.at("beta");
    return c;
}

Field random_mask(const Grid& g, const DataGenConfig& d, RngStream& rng)
{
    Field m(g, 1, 0.0);
    const int n = g.nx;
    const int lo = std::max(2, n / 8), hi = std::max(lo + 1, n / 3);
    const int count = d.rects_min + static_cast<int>(rng.below(d.rects_max - d.rects_min + 1));
    for (int r = 0; r < count; ++r) {
        const int w = lo + static_cast<int>(rng.below(hi - lo + 1));
        const int h = lo + static_cast<int>(rng.below(hi - lo + 1));
        const int x0 = static_cast<int>(rng.below(n)), y0 = static_cast<int>(rng.below(n));
        for (int iy = y0; iy < y0 + h; ++iy)
            for (int ix = x0; ix < x0 + w; ++ix) m.at(iy % n, ix % n) = 1.0;
    }
    return m;
}

struct Sample {
    Field a, u, traj;
    SampleMeta meta;
};

} // namespace

Dataset generate_dataset(const ExperimentConfig& cfg)
{
    cfg.data.validate(cfg.task);
    const DataGenConfig& d = cfg.data;
    const TaskKind task = cfg.task;
    const Grid grid = Grid::square(d.resolution, task_boundary(task));
    const PsiMode psi = task_psi(task);

    json tc = json::object();
    if (task == TaskKind::Ns2d)
        tc = {{"nu", d.nu},
              {"T", d.T},
              {"dt", d.dt},
              {"n_snapshots", d.n_snapshots},
              {"forcing", "0.1(sin(2pi(x+y)) + cos(2pi(x+y)))"},
              {"full_trajectory", d.full_trajectory}};
    else if (task == TaskKind::LithoToy)
        tc = {{"sigma_optical", d.litho.sigma_optical},
              {"sigma_resist", d.litho.sigma_resist},
              {"tau_resist", d.litho.tau_resist},
              {"beta", d.litho.beta}};
    else
        tc = {{"source", 1.0}, {"design", task == TaskKind::DarcyContinuous ? "log_permeability" : "permeability"}};

    const std::size_t total = d.n_train + d.n_test;
    std::vector<Sample> samples(total);
    parallel_for(total, cfg.threads, [&](std::size_t i) {
        Sample& s = samples[i];
        RngStream rng(d.seed, i);
        s.meta.split = i < d.n_train ? "train" : "test";
        s.meta.index = i < d.n_train ? i : i - d.n_train;
        s.meta.seed = d.seed;
        s.meta.psi = to_string(psi.kind);
        switch (task) {
        case TaskKind::DarcyContinuous:
        case TaskKind::DarcyClipped: {
            // The continuous task stores log-permeability as its design; exp
            // is applied inside the forward map.
            const bool log_design = task == TaskKind::DarcyContinuous;
            const GrfSpec spec = d.hyper.draw(rng, log_design ? PsiMode::identity() : psi);
            s.meta.alpha = spec.alpha;
            s.meta.tau = spec.tau;
            const Field raw = sample_grf(spec, Grid::square(d.resolution, Boundary::Neumann), rng);
            s.a = Field(grid, 1);
            s.a.storage() = raw.storage();
            s.u = solve_darcy(DarcyProblem::with_unit_source(log_design ? apply_psi(s.a, psi) : s.a));
            break;
        }
        case TaskKind::Ns2d: {
            const GrfSpec spec = d.hyper.draw(rng, psi);
            s.meta.alpha = spec.alpha;
            s.meta.tau = spec.tau;
            s.a = sample_grf(spec, grid, rng);
            if (d.ns_scale_by_tau) s.a = scaled(s.a, std::pow(spec.tau, spec.alpha - 1.0));
            const NsTrajectory t = solve_ns(s.a, ns_config(tc, grid));
            s.traj = t.snapshots.front();
            for (std::size_t k = 1; k < t.snapshots.size(); ++k) s.traj = Field::concat(s.traj, t.snapshots[k]);
            s.u = d.full_trajectory ? s.traj : t.final_state();
            break;
        }
        case TaskKind::LithoToy:
            s.a = random_mask(grid, d, rng);
            s.u = litho_forward(s.a, d.litho, false);
            break;
        }
    });

    Dataset ds;
    DatasetManifest& m = ds.manifest;
    m.task = task;
    m.resolution = d.resolution;
    m.n_train = d.n_train;
    m.n_test = d.n_test;
    m.a_channels = samples.front().a.channels();
    m.u_channels = samples.front().u.channels();
    m.has_trajectories = task == TaskKind::Ns2d;
    m.task_config = tc;
    for (std::size_t i = 0; i < total; ++i) {
        Sample& s = samples[i];
        m.samples.push_back(s.meta);
        const bool train = i < d.n_train;
        (train ? ds.a_train : ds.a_test).push_back(std::move(s.a));
        (train ? ds.u_train : ds.u_test).push_back(std::move(s.u));
        if (m.has_trajectories) (train ? ds.traj_train : ds.traj_test).push_back(std::move(s.traj));
    }
    ds.refresh_stats();
    // Design range used to project candidates before true evaluation.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Field& a : ds.a_train)
        for (double v : a.values()) lo = std::min(lo, v), hi = std::max(hi, v);
    m.task_config["design_range"] = {lo, hi};
    return ds;
}

TrueForward::TrueForward(const DatasetManifest& m)
    : task_(m.task), grid_(Grid::square(m.resolution, task_boundary(m.task))), cfg_(m.task_config)
{
    require(cfg_.contains("design_range"), "dataset manifest lacks the design range");
    lo_ = cfg_["design_range"][0].get<double>();
    hi_ = cfg_["design_range"][1].get<double>();
    if (task_ == TaskKind::LithoToy) litho_config(cfg_).validate();
}

Field TrueForward::project(const Field& a) const
{
    require(a.grid() == grid_, ErrorCode::ShapeMismatch, "design grid does not match the task grid");
    if (task_ == TaskKind::Ns2d) return a;
    Field p = a;
    for (double& v : p.storage()) v = std::clamp(v, lo_, hi_);
    return p;
}

Field TrueForward::operator()(const Field& a) const
{
    const Field p = project(a);
    switch (task_) {
    case TaskKind::DarcyContinuous: return solve_darcy(DarcyProblem::with_unit_source(apply_psi(p, PsiMode::exp())));
    case TaskKind::DarcyClipped: return solve_darcy(DarcyProblem::with_unit_source(p));
    case TaskKind::Ns2d: {
        const NsTrajectory t = solve_ns(p, ns_config(cfg_, grid_));
        if (!cfg_.value("full_trajectory", false)) return t.final_state();
        Field out = t.snapshots.front();
        for (std::size_t k = 1; k < t.snapshots.size(); ++k) out = Field::concat(out, t.snapshots[k]);
        return out;
    }
    case TaskKind::LithoToy: return litho_forward(p, litho_config(cfg_), false);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown task");
}

Field TrueForward::print(const Field& a) const
{
    require(task_ == TaskKind::LithoToy, "print is defined for the lithography task only");
    return (*this)(a);
}

} // namespace dgp
