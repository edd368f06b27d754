#include "app/commands.hpp"

#include "app/study.hpp"
#include "app/tasks.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/tensor_io.hpp"
#include "inverse/bounds.hpp"
#include "inverse/mala.hpp"
#include "neuralop/grad_check.hpp"
#include "training/surrogate.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

namespace dgp {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path surrogate_stem(const ExperimentConfig& cfg) { return cfg.paths.checkpoints / "surrogate"; }
fs::path prior_dir(const ExperimentConfig& cfg) { return cfg.paths.checkpoints / "prior"; }

namespace {

void write_json(const fs::path& path, const json& j)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
}

json read_json(const fs::path& path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
    }
}

Dataset load_task_dataset(const ExperimentConfig& cfg)
{
    Dataset ds = load_dataset(cfg.paths.dataset);
    require(ds.manifest.task == cfg.task, "dataset task " + to_string(ds.manifest.task) +
                                              " does not match the configured task " + to_string(cfg.task));
    return ds;
}

struct Target {
    std::string label;  // "test:<i>" or the file path
    Field u_star;
    std::optional<Field> a_ref;
};

std::vector<Target> select_targets(const Dataset& ds, const TargetSelection& sel)
{
    std::vector<Target> out;
    const Boundary b = task_boundary(ds.manifest.task);
    if (sel.target_file) {
        Field u = read_field(*sel.target_file, b);
        require(u.grid() == ds.grid() && u.channels() == ds.manifest.u_channels, ErrorCode::ShapeMismatch,
                "target " + sel.target_file->string() + " does not match the dataset observation shape");
        out.push_back({sel.target_file->string(), std::move(u), std::nullopt});
        return out;
    }
    if (sel.test_index) {
        require(*sel.test_index < ds.u_test.size(), "test index out of range");
        out.push_back({"test:" + std::to_string(*sel.test_index), ds.u_test[*sel.test_index], ds.a_test[*sel.test_index]});
        return out;
    }
    const std::size_t n = sel.max_targets == 0 ? ds.u_test.size() : std::min(sel.max_targets, ds.u_test.size());
    for (std::size_t i = 0; i < n; ++i) out.push_back({"test:" + std::to_string(i), ds.u_test[i], ds.a_test[i]});
    return out;
}

Field load_target_field(const Dataset& ds, const std::string& label)
{
    if (label.rfind("test:", 0) == 0) {
        const std::size_t i = std::stoul(label.substr(5));
        require(i < ds.u_test.size(), "indexed target " + label + " is not in the dataset");
        return ds.u_test[i];
    }
    return read_field(label, task_boundary(ds.manifest.task));
}

std::string file_tag(std::size_t target, std::size_t sample)
{
    return "t" + std::to_string(target) + "_s" + std::to_string(sample) + ".dgpt";
}

FnoParams load_surrogate(const ExperimentConfig& cfg)
{
    return load_fno(surrogate_stem(cfg));
}

} // namespace

void cmd_generate(const ExperimentConfig& cfg)
{
    echo_config(cfg, "gen");
    save_dataset(cfg.paths.dataset, generate_dataset(cfg));
}

void cmd_train_surrogate(const ExperimentConfig& cfg)
{
    echo_config(cfg, "train_surrogate");
    const Dataset ds = load_task_dataset(cfg);
    const SurrogateResult r = train_surrogate(ds, cfg.surrogate_net, cfg.surrogate_train);
    fs::create_directories(cfg.paths.checkpoints);
    save_fno(surrogate_stem(cfg), r.params);
    write_curve_csv(cfg.paths.output / "surrogate_curve.csv", r.curve);
    write_json(cfg.paths.output / "surrogate_summary.json",
               {{"train_rel_l2", surrogate_loss(r.params, ds.a_train, ds.u_train, cfg.threads)},
                {"test_rel_l2", surrogate_loss(r.params, ds.a_test, ds.u_test, cfg.threads)}});
}

void cmd_train_prior(const ExperimentConfig& cfg)
{
    echo_config(cfg, "train_prior");
    const Dataset ds = load_task_dataset(cfg);
    const PriorResult r = train_prior(ds, cfg.generator_net, cfg.critic_net, cfg.q_channels, cfg.prior_train);
    r.model.save(prior_dir(cfg));
    write_curve_csv(cfg.paths.output / "prior_curve.csv", r.curve);
    write_json(cfg.paths.output / "prior_summary.json", {{"critic_monotone_fraction", r.critic_monotone_fraction}});
}

void cmd_invert(const ExperimentConfig& cfg, const TargetSelection& sel)
{
    echo_config(cfg, "invert");
    const Dataset ds = load_task_dataset(cfg);
    const FnoParams F = load_surrogate(cfg);
    const bool needs_prior = cfg.inverse.variant != InverseVariant::NoPriorRandomInit;
    const PriorModel prior = needs_prior ? PriorModel::load(prior_dir(cfg)) : PriorModel{};
    const InverseModels models{&F, needs_prior ? &prior : nullptr, ds.manifest.a_stats, ds.manifest.u_stats};
    const auto targets = select_targets(ds, sel);
    const std::string method = method_name(cfg.inverse);
    const fs::path dir = cfg.paths.output / "candidates" / method;
    fs::create_directories(dir);

    std::vector<std::vector<CandidateSolution>> results(targets.size());
    parallel_for(targets.size(), cfg.threads, [&](std::size_t t) {
        InverseConfig ic = cfg.inverse;
        ic.seed = cfg.inverse.seed * 1000003ULL + t;
        results[t] = run_inverse(targets[t].u_star, models, ic);
    });
    json index = json::array();
    for (std::size_t t = 0; t < targets.size(); ++t)
        for (std::size_t k = 0; k < results[t].size(); ++k) {
            const CandidateSolution& c = results[t][k];
            const fs::path file = dir / file_tag(t, k);
            write_field(file, c.a);
            index.push_back({{"target", targets[t].label},
                             {"candidate", file.string()},
                             {"sample", k},
                             {"seconds", c.seconds},
                             {"surrogate_loss", c.surrogate_loss}});
        }
    write_json(dir / "index.json", {{"method", method}, {"seed", cfg.seed}, {"candidates", index}});
}

void cmd_mcmc(const ExperimentConfig& cfg, const TargetSelection& sel)
{
    echo_config(cfg, "mcmc");
    const Dataset ds = load_task_dataset(cfg);
    const FnoParams F = load_surrogate(cfg);
    const PriorModel prior = PriorModel::load(prior_dir(cfg));
    const auto targets = select_targets(ds, sel);
    const fs::path dir = cfg.paths.output / "candidates" / "mala";
    fs::create_directories(dir);
    const MalaConfig mc{cfg.mala.step_size, cfg.mala.n_steps, cfg.mala.burn_in};

    struct Out {
        Field a;
        double seconds = 0.0, accept = 0.0;
        std::size_t rejected = 0;
    };
    std::vector<Out> outs(targets.size());
    parallel_for(targets.size(), cfg.threads, [&](std::size_t t) {
        const auto t0 = std::chrono::steady_clock::now();
        const Field u_norm = normalize(targets[t].u_star, ds.manifest.u_stats);
        RngStream rng(cfg.seed * 1000003ULL + t, 0x3c01);
        const Field q0 = prior.sample_latent(u_norm.grid(), rng);
        const double rms = std::sqrt(sum_squares(u_norm) / static_cast<double>(u_norm.size()));
        const double sigma = cfg.mala.obs_sigma_rel * std::max(rms, 1e-12);
        const PerturbationTarget target(fno_perturbation_model(F, prior.generator, q0), u_norm, sigma);
        const MalaDesignResult r = mala_chain(target, mc, rng);
        outs[t].a = denormalize(r.mean_design, ds.manifest.a_stats);
        outs[t].accept = static_cast<double>(r.chain.accepted) / cfg.mala.n_steps;
        outs[t].rejected = r.chain.rejected_nonfinite;
        outs[t].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    json index = json::array();
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const fs::path file = dir / file_tag(t, 0);
        write_field(file, outs[t].a);
        index.push_back({{"target", targets[t].label},
                         {"candidate", file.string()},
                         {"sample", 0},
                         {"seconds", outs[t].seconds},
                         {"acceptance_rate", outs[t].accept},
                         {"rejected_nonfinite", outs[t].rejected}});
    }
    write_json(dir / "index.json", {{"method", "mala"}, {"seed", cfg.seed}, {"candidates", index}});
}

void cmd_eval(const ExperimentConfig& cfg)
{
    echo_config(cfg, "eval");
    const Dataset ds = load_task_dataset(cfg);
    const FnoParams F = load_surrogate(cfg);
    const TrueForward truth(ds.manifest);
    const fs::path root = cfg.paths.output / "candidates";
    require(fs::is_directory(root), ErrorCode::Io, "no candidates under " + root.string() + "; run invert first");
    std::vector<fs::path> indices;
    for (const auto& e : fs::directory_iterator(root))
        if (fs::exists(e.path() / "index.json")) indices.push_back(e.path() / "index.json");
    std::sort(indices.begin(), indices.end());
    require(!indices.empty(), "no candidate index files under " + root.string());

    std::vector<EvalRecord> records;
    for (const fs::path& ip : indices) {
        const json idx = read_json(ip);
        const std::string method = idx.at("method");
        const std::uint64_t seed = idx.value("seed", cfg.seed);
        const json& cands = idx.at("candidates");
        std::vector<EvalRecord> part(cands.size());
        parallel_for(cands.size(), cfg.threads, [&](std::size_t i) {
            const json& c = cands[i];
            const Field u_star = load_target_field(ds, c.at("target").get<std::string>());
            const Field a = read_field(c.at("candidate").get<std::string>(), task_boundary(ds.manifest.task));
            const CandidateScore s = score_candidate(a, u_star, truth, F, ds.manifest, cfg.epe);
            EvalRecord r{to_string(cfg.task), method, seed, s.rel_error, s.max_error, c.value("seconds", 0.0), {}};
            r.extra["surrogate_rel_error"] = s.surrogate_rel_error;
            if (s.epe_fraction) r.extra["epe_fraction"] = *s.epe_fraction;
            part[i] = std::move(r);
        });
        records.insert(records.end(), part.begin(), part.end());
    }
    write_report(records, cfg.paths.output / "report");
}

void cmd_diag_bound(const ExperimentConfig& cfg, const TargetSelection& sel)
{
    echo_config(cfg, "diag_bound");
    const Dataset ds = load_task_dataset(cfg);
    const FnoParams F = load_surrogate(cfg);
    const PriorModel prior = PriorModel::load(prior_dir(cfg));
    const TrueForward truth(ds.manifest);
    const auto targets = select_targets(ds, sel);
    const InverseModels models{&F, &prior, ds.manifest.a_stats, ds.manifest.u_stats};
    const DatasetManifest& m = ds.manifest;

    std::vector<json> rows(targets.size());
    parallel_for(targets.size(), cfg.threads, [&](std::size_t t) {
        InverseConfig ic = cfg.inverse;
        ic.variant = InverseVariant::WithPrior;
        ic.mode = InverseMode::Map;
        ic.seed = cfg.inverse.seed * 1000003ULL + t;
        const Field a_hat = run_inverse(targets[t].u_star, models, ic).front().a;
        const Field u_norm = normalize(targets[t].u_star, m.u_stats);
        BoundInputs in;
        in.surrogate = [&](const Field& a) { return denormalize(fno_forward(F, normalize(a, m.a_stats)), m.u_stats); };
        in.true_solver = [&](const Field& a) { return truth(a); };
        in.sample_design = [&, u_norm](RngStream& r) {
            return denormalize(prior.generate(prior.sample_latent(u_norm.grid(), r), u_norm), m.a_stats);
        };
        in.u_star = targets[t].u_star;
        in.candidate = a_hat;
        in.a_ref = targets[t].a_ref;
        in.n_probes = cfg.bound.n_probes;
        in.n_pairs = cfg.bound.n_pairs;
        in.n_restarts = cfg.bound.n_restarts;
        RngStream rng(cfg.seed * 1000003ULL + t, 0xb0d1);
        const BoundDiagnostics d = bound_diagnostics(in, rng);
        json row = {{"target", targets[t].label},
                    {"eps_F", d.eps_F},
                    {"lipschitz_F_lower_bound", d.lipschitz_F},
                    {"loss_candidate", d.loss_candidate},
                    {"residual", d.residual}};
        row["eps_G"] = d.eps_G ? json(*d.eps_G) : json(nullptr);
        row["loss_ref"] = d.loss_ref ? json(*d.loss_ref) : json(nullptr);
        row["bound"] = d.bound_value ? json(*d.bound_value) : json(nullptr);
        rows[t] = std::move(row);
    });
    write_json(cfg.paths.output / "bounds.json", json(rows));
}

void cmd_grad_check(const ExperimentConfig& cfg, int n_models)
{
    echo_config(cfg, "grad_check");
    require(n_models >= 1, "grad-check: need at least one model");
    RngStream rng(cfg.seed, 0x6c01);
    json rows = json::array();
    int failed = 0;
    for (int k = 0; k < n_models; ++k) {
        FnoConfig c;
        c.layers = 1 + static_cast<int>(rng.below(3));
        c.width = 2 + static_cast<int>(rng.below(7));
        c.modes = 1 + static_cast<int>(rng.below(4));
        c.proj_hidden = 2 + static_cast<int>(rng.below(7));
        c.in_channels = 1 + static_cast<int>(rng.below(2));
        c.head = rng.below(4) == 0 ? HeadKind::ScalarFunctional : HeadKind::Field;
        const int n = 8 + 2 * static_cast<int>(rng.below(5));
        const Grid g = Grid::square(n);
        const FnoParams p = FnoParams::init(c, rng);
        Field x(g, c.in_channels), target(g, c.out_channels);
        for (double& v : x.storage()) v = rng.normal();
        for (double& v : target.storage()) v = rng.normal();
        const LossSpec loss = c.head == HeadKind::Field ? LossSpec::squared_l2(target) : LossSpec::head(1.0);
        GradCheckOptions opt;
        opt.seed = cfg.seed + static_cast<std::uint64_t>(k);
        const GradCheckReport r = grad_check(p, x, loss, opt);
        failed += r.passed ? 0 : 1;
        rows.push_back({{"resolution", n},
                        {"net", fno_config_to_json(c)},
                        {"checked", r.checked},
                        {"max_rel_error", r.max_rel_error},
                        {"worst", r.worst_coordinate},
                        {"passed", r.passed}});
    }
    write_json(cfg.paths.output / "grad_check.json", {{"models", rows}, {"failed", failed}});
    require(failed == 0, ErrorCode::Divergence,
            "grad-check: " + std::to_string(failed) + " of " + std::to_string(n_models) + " models failed");
}

void cmd_render(const fs::path& in, const fs::path& out, std::optional<ValueRange> range, int channel)
{
    const Field f = read_field(in);
    require(channel >= 0 && channel < f.channels(), "render: channel out of range");
    Field one(f.grid(), 1);
    for (std::size_t p = 0; p < f.grid().points(); ++p) one[p] = f[p * f.channels() + channel];
    render_pgm(one, out, range);
}

} // namespace dgp
