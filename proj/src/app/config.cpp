#include "app/config.hpp"

#include "core/error.hpp"
#include "inverse/mala.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace dgp {

using nlohmann::json;

void DataGenConfig::validate(TaskKind task) const
{
    require(resolution >= 8, "data: resolution must be >= 8");
    require(n_train >= 1 && n_test >= 1, "data: n_train and n_test must be >= 1");
    hyper.validate();
    if (task == TaskKind::Ns2d) {
        require(nu > 0.0 && T > 0.0 && dt > 0.0 && dt <= T && n_snapshots >= 1, "data: invalid NS settings");
    }
    if (task == TaskKind::LithoToy) {
        litho.validate();
        require(rects_min >= 1 && rects_min <= rects_max, "data: need 1 <= rects_min <= rects_max");
    }
}

void MalaSettings::validate() const
{
    require(obs_sigma_rel > 0.0 && std::isfinite(obs_sigma_rel), "mala: obs_sigma_rel must be > 0");
    MalaConfig{step_size, n_steps, burn_in}.validate();
}

void BoundSettings::validate() const
{
    require(n_probes >= 1 && n_pairs >= 1 && n_restarts >= 1, "bound: probe counts must be >= 1");
}

ExperimentConfig ExperimentConfig::defaults_for(TaskKind task)
{
    ExperimentConfig c;
    c.task = task;
    FnoConfig net;
    net.layers = 4;
    net.width = 12;
    net.modes = 6;
    net.proj_hidden = 32;
    c.surrogate_net = net;
    c.generator_net = net;
    // A critic smaller than the generator leaves G nearly insensitive to q.
    c.critic_net = net;
    c.critic_net.head = HeadKind::ScalarFunctional;

    c.surrogate_train.epochs = 30;
    c.surrogate_train.batch = 16;
    c.prior_train.epochs = 10;
    c.prior_train.batch = 16;
    c.prior_train.lr0 = 1e-3;

    switch (task) {
    case TaskKind::DarcyContinuous:
    case TaskKind::DarcyClipped: c.data.hyper = GrfHyperPrior{{1.0, 2.5}, {0.5, 1.5}}; break;
    case TaskKind::Ns2d:
        c.data.hyper = GrfHyperPrior{{2.0, 2.5}, {7.0, 7.0}};
        c.data.n_train = 400;
        break;
    case TaskKind::LithoToy: break;
    }
    return c;
}

void ExperimentConfig::propagate()
{
    surrogate_train.seed = seed;
    prior_train.seed = seed;
    inverse.seed = seed;
    surrogate_train.threads = threads;
    prior_train.threads = threads;
}

void ExperimentConfig::validate() const
{
    require(threads >= 1, "threads must be >= 1");
    require(q_channels >= 1, "q_channels must be >= 1");
    data.validate(task);
    surrogate_net.validate();
    generator_net.validate();
    critic_net.validate();
    require(critic_net.head == HeadKind::ScalarFunctional, "critic_net must use the scalar head");
    require(surrogate_net.head == HeadKind::Field && generator_net.head == HeadKind::Field,
            "surrogate_net and generator_net must use the field head");
    surrogate_train.validate();
    prior_train.validate();
    inverse.validate();
    mala.validate();
    epe.validate();
    bound.validate();
}

namespace {

json range_json(const std::pair<double, double>& r) { return json::array({r.first, r.second}); }

std::pair<double, double> range_from(const json& j)
{
    if (j.is_number()) return {j.get<double>(), j.get<double>()};
    require(j.is_array() && j.size() == 2, "range must be a number or a [lo, hi] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where)
{
    require(j.is_object(), where + " must be a JSON object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        require(allowed.count(k) > 0, "unknown config key '" + (where.empty() ? k : where + "." + k) + "'");
}

} // namespace

json ExperimentConfig::to_json() const
{
    json data_j = {{"resolution", data.resolution},
                   {"n_train", data.n_train},
                   {"n_test", data.n_test},
                   {"seed", data.seed},
                   {"alpha", range_json(data.hyper.alpha_range)},
                   {"tau", range_json(data.hyper.tau_range)},
                   {"ns_scale_by_tau", data.ns_scale_by_tau},
                   {"nu", data.nu},
                   {"T", data.T},
                   {"dt", data.dt},
                   {"n_snapshots", data.n_snapshots},
                   {"full_trajectory", data.full_trajectory},
                   {"litho",
                    {{"sigma_optical", data.litho.sigma_optical},
                     {"sigma_resist", data.litho.sigma_resist},
                     {"tau_resist", data.litho.tau_resist},
                     {"beta", data.litho.beta}}},
                   {"rects_min", data.rects_min},
                   {"rects_max", data.rects_max}};
    return {{"task", to_string(task)},
            {"paths",
             {{"dataset", paths.dataset.string()},
              {"checkpoints", paths.checkpoints.string()},
              {"output", paths.output.string()}}},
            {"data", data_j},
            {"surrogate_net", fno_config_to_json(surrogate_net)},
            {"generator_net", fno_config_to_json(generator_net)},
            {"critic_net", fno_config_to_json(critic_net)},
            {"q_channels", q_channels},
            {"surrogate_train", surrogate_train.to_json()},
            {"prior_train", prior_train.to_json()},
            {"inverse", inverse.to_json()},
            {"mala",
             {{"obs_sigma_rel", mala.obs_sigma_rel},
              {"step_size", mala.step_size},
              {"n_steps", mala.n_steps},
              {"burn_in", mala.burn_in}}},
            {"epe", {{"tol", epe.tol}, {"spacing", epe.spacing}, {"window", epe.window}}},
            {"bound", {{"n_probes", bound.n_probes}, {"n_pairs", bound.n_pairs}, {"n_restarts", bound.n_restarts}}},
            {"seed", seed},
            {"threads", threads}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    try {
        reject_unknown(j,
                       {"task", "paths", "data", "surrogate_net", "generator_net", "critic_net", "q_channels",
                        "surrogate_train", "prior_train", "inverse", "mala", "epe", "bound", "seed", "threads"},
                       "");
        ExperimentConfig c = defaults_for(j.contains("task") ? task_from_string(j.at("task").get<std::string>())
                                                             : TaskKind::DarcyClipped);
        if (j.contains("paths")) {
            const json& p = j.at("paths");
            reject_unknown(p, {"dataset", "checkpoints", "output"}, "paths");
            c.paths.dataset = p.value("dataset", c.paths.dataset.string());
            c.paths.checkpoints = p.value("checkpoints", c.paths.checkpoints.string());
            c.paths.output = p.value("output", c.paths.output.string());
        }
        if (j.contains("data")) {
            const json& d = j.at("data");
            reject_unknown(d,
                           {"resolution", "n_train", "n_test", "seed", "alpha", "tau", "ns_scale_by_tau", "nu", "T",
                            "dt", "n_snapshots", "full_trajectory", "litho", "rects_min", "rects_max"},
                           "data");
            DataGenConfig& g = c.data;
            g.resolution = d.value("resolution", g.resolution);
            g.n_train = d.value("n_train", g.n_train);
            g.n_test = d.value("n_test", g.n_test);
            g.seed = d.value("seed", g.seed);
            if (d.contains("alpha")) g.hyper.alpha_range = range_from(d.at("alpha"));
            if (d.contains("tau")) g.hyper.tau_range = range_from(d.at("tau"));
            g.ns_scale_by_tau = d.value("ns_scale_by_tau", g.ns_scale_by_tau);
            g.nu = d.value("nu", g.nu);
            g.T = d.value("T", g.T);
            g.dt = d.value("dt", g.dt);
            g.n_snapshots = d.value("n_snapshots", g.n_snapshots);
            g.full_trajectory = d.value("full_trajectory", g.full_trajectory);
            if (d.contains("litho")) {
                const json& l = d.at("litho");
                reject_unknown(l, {"sigma_optical", "sigma_resist", "tau_resist", "beta"}, "data.litho");
                g.litho.sigma_optical = l.value("sigma_optical", g.litho.sigma_optical);
                g.litho.sigma_resist = l.value("sigma_resist", g.litho.sigma_resist);
                g.litho.tau_resist = l.value("tau_resist", g.litho.tau_resist);
                g.litho.beta = l.value("beta", g.litho.beta);
            }
            g.rects_min = d.value("rects_min", g.rects_min);
            g.rects_max = d.value("rects_max", g.rects_max);
        }
        if (j.contains("surrogate_net")) c.surrogate_net = fno_config_from_json(j.at("surrogate_net"), c.surrogate_net);
        if (j.contains("generator_net")) c.generator_net = fno_config_from_json(j.at("generator_net"), c.generator_net);
        if (j.contains("critic_net")) c.critic_net = fno_config_from_json(j.at("critic_net"), c.critic_net);
        c.q_channels = j.value("q_channels", c.q_channels);
        auto overlay_train = [](const json& src, const TrainConfig& base) {
            json merged = base.to_json();
            merged.update(src);
            return TrainConfig::from_json(merged);
        };
        if (j.contains("surrogate_train")) c.surrogate_train = overlay_train(j.at("surrogate_train"), c.surrogate_train);
        if (j.contains("prior_train")) c.prior_train = overlay_train(j.at("prior_train"), c.prior_train);
        if (j.contains("inverse")) {
            json merged = c.inverse.to_json();
            merged.erase("precondition"); // unset means mode-dependent
            merged.update(j.at("inverse"));
            c.inverse = InverseConfig::from_json(merged);
        }
        if (j.contains("mala")) {
            const json& m = j.at("mala");
            reject_unknown(m, {"obs_sigma_rel", "step_size", "n_steps", "burn_in"}, "mala");
            c.mala.obs_sigma_rel = m.value("obs_sigma_rel", c.mala.obs_sigma_rel);
            c.mala.step_size = m.value("step_size", c.mala.step_size);
            c.mala.n_steps = m.value("n_steps", c.mala.n_steps);
            c.mala.burn_in = m.value("burn_in", c.mala.burn_in);
        }
        if (j.contains("epe")) {
            const json& e = j.at("epe");
            reject_unknown(e, {"tol", "spacing", "window"}, "epe");
            c.epe.tol = e.value("tol", c.epe.tol);
            c.epe.spacing = e.value("spacing", c.epe.spacing);
            c.epe.window = e.value("window", c.epe.window);
        }
        if (j.contains("bound")) {
            const json& b = j.at("bound");
            reject_unknown(b, {"n_probes", "n_pairs", "n_restarts"}, "bound");
            c.bound.n_probes = b.value("n_probes", c.bound.n_probes);
            c.bound.n_pairs = b.value("n_pairs", c.bound.n_pairs);
            c.bound.n_restarts = b.value("n_restarts", c.bound.n_restarts);
        }
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
        c.propagate();
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
    }
}

void echo_config(const ExperimentConfig& cfg, const std::string& name)
{
    std::filesystem::create_directories(cfg.paths.output);
    const auto path = cfg.paths.output / (name + "_config.json");
    std::ofstream out(path);
    out << cfg.to_json().dump(2) << '\n';
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
}

} // namespace dgp
