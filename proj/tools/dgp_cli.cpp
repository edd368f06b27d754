// Command-line front end over the dgp C library.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include "dgp/dgp.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using nlohmann::json;

namespace {

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flags shared by every experiment subcommand. Unset optionals leave the
// config file value in place.
struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> dataset, checkpoints, output;
};

struct Targets {
    std::optional<std::string> file;
    std::optional<long> index;
    std::size_t max_targets = 0;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config_path, "JSON experiment config");
    sub->add_option("--seed", c.seed, "global seed (overrides DGP_SEED and the config)");
    sub->add_option("--threads", c.threads, "worker threads");
    sub->add_option("--dataset", c.dataset, "dataset directory");
    sub->add_option("--checkpoints", c.checkpoints, "checkpoint directory");
    sub->add_option("--output", c.output, "output directory");
}

void add_targets(CLI::App* sub, Targets& t)
{
    auto* f = sub->add_option("--target", t.file, "observation tensor file");
    auto* i = sub->add_option("--test-index", t.index, "index of a test observation")->check(CLI::NonNegativeNumber);
    f->excludes(i);
    sub->add_option("--max-targets", t.max_targets, "number of test observations to use (0 = all)");
}

json load_config(const Common& c)
{
    json j = json::object();
    if (!c.config_path.empty()) {
        std::ifstream in(c.config_path);
        if (!in) throw UsageError("cannot read config file " + c.config_path);
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError("config file " + c.config_path + " is not valid JSON: " + e.what());
        }
        if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    }
    if (const char* env = std::getenv("DGP_SEED")) {
        try {
            std::size_t used = 0;
            const unsigned long long s = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
            j["seed"] = s;
        } catch (const std::exception&) {
            throw UsageError(std::string("DGP_SEED is not an unsigned integer: ") + env);
        }
    }
    if (c.seed) j["seed"] = *c.seed;
    if (c.threads) j["threads"] = *c.threads;
    if (c.dataset) j["paths"]["dataset"] = *c.dataset;
    if (c.checkpoints) j["paths"]["checkpoints"] = *c.checkpoints;
    if (c.output) j["paths"]["output"] = *c.output;
    return j;
}

template <class T>
void set_if(json& j, const char* section, const char* key, const std::optional<T>& v)
{
    if (v) j[section][key] = *v;
}

struct ConfigHandle {
    dgp_config* p = nullptr;
    ~ConfigHandle() { dgp_config_free(p); }
};

void resolve(const json& j, ConfigHandle& h)
{
    if (dgp_config_from_json(j.dump().c_str(), &h.p) != DGP_OK)
        throw UsageError(std::string("invalid configuration: ") + dgp_last_error());
}

int report(dgp_status s)
{
    if (s == DGP_OK) return 0;
    std::fprintf(stderr, "error: %s\n", dgp_last_error());
    return s == DGP_ERR_INVALID_ARGUMENT ? kUsage : kRuntime;
}

dgp_targets to_c(const Targets& t)
{
    return dgp_targets{t.file ? t.file->c_str() : nullptr, t.index ? *t.index : -1L, t.max_targets};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Inverse design with deep generative priors and neural surrogates", "dgp"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dgp_version());

    Common common;
    Targets targets;

    // Data generation.
    std::optional<int> resolution;
    std::optional<std::size_t> n_train, n_test;
    std::optional<std::uint64_t> data_seed;
    std::string psi = "clip";
    std::optional<bool> full_trajectory;
    auto add_gen = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        add_common(s, common);
        s->add_option("--resolution", resolution, "grid points per side");
        s->add_option("--n-train", n_train, "training pairs");
        s->add_option("--n-test", n_test, "test pairs");
        s->add_option("--data-seed", data_seed, "data seed");
        return s;
    };
    auto* gen_darcy = add_gen("gen-darcy", "generate a Darcy dataset");
    gen_darcy->add_option("--psi", psi, "permeability map: clip (two-valued) or exp (continuous)")
        ->check(CLI::IsMember({"clip", "exp"}));
    auto* gen_ns = add_gen("gen-ns", "generate a Navier-Stokes dataset");
    gen_ns->add_flag("--full-trajectory,!--final-only", full_trajectory, "observe every snapshot");
    auto* gen_litho = add_gen("gen-litho", "generate a lithography dataset");

    // Training.
    std::optional<int> epochs, batch, n_critic;
    std::optional<double> lr;
    auto add_train = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        add_common(s, common);
        s->add_option("--epochs", epochs, "training epochs");
        s->add_option("--batch", batch, "minibatch size");
        s->add_option("--lr", lr, "initial learning rate");
        return s;
    };
    auto* train_sur = add_train("train-surrogate", "train the FNO surrogate");
    auto* train_prior = add_train("train-prior", "train the conditional WGAN-GP prior");
    train_prior->add_option("--n-critic", n_critic, "critic steps per generator step");

    // Inversion.
    std::optional<std::string> mode, variant;
    std::optional<double> gamma, lambda;
    std::optional<int> steps, n_samples, burn_in, thinning;
    std::optional<bool> precondition;
    auto* invert = app.add_subcommand("invert", "Langevin inversion in latent space");
    add_common(invert, common);
    add_targets(invert, targets);
    invert->add_option("--mode", mode, "map or posterior")->check(CLI::IsMember({"map", "posterior"}));
    invert->add_option("--variant", variant, "with-prior, no-prior-random, no-prior-condition or prior-only")
        ->check(CLI::IsMember({"with-prior", "no-prior-random", "no-prior-condition", "prior-only"}));
    invert->add_option("--gamma", gamma, "step size");
    invert->add_option("--lambda", lambda, "latent L2 weight");
    invert->add_option("--steps", steps, "Langevin steps");
    invert->add_option("--n-samples", n_samples, "posterior samples per target");
    invert->add_option("--burn-in", burn_in, "posterior burn-in steps");
    invert->add_option("--thinning", thinning, "posterior thinning interval");
    invert->add_flag("--precondition,!--no-precondition", precondition, "Adam-style drift preconditioning");

    std::optional<double> step_size, obs_sigma_rel;
    std::optional<int> mala_steps, mala_burn;
    auto* mcmc = app.add_subcommand("mcmc", "MALA baseline over design perturbations");
    add_common(mcmc, common);
    add_targets(mcmc, targets);
    mcmc->add_option("--step-size", step_size, "MALA step size");
    mcmc->add_option("--n-steps", mala_steps, "chain length");
    mcmc->add_option("--burn-in", mala_burn, "discarded steps");
    mcmc->add_option("--obs-sigma-rel", obs_sigma_rel, "observation noise relative to RMS(u*)");

    auto* eval = app.add_subcommand("eval", "score candidates with the true solver");
    add_common(eval, common);

    std::optional<int> probes, pairs, restarts;
    auto* bound = app.add_subcommand("diag-bound", "error-bound diagnostics");
    add_common(bound, common);
    add_targets(bound, targets);
    bound->add_option("--probes", probes, "probe designs for the surrogate error");
    bound->add_option("--pairs", pairs, "design pairs for the Lipschitz estimate");
    bound->add_option("--restarts", restarts, "latent restarts for the generator error");

    int n_models = 20;
    auto* grad = app.add_subcommand("grad-check", "finite-difference check of FNO gradients");
    add_common(grad, common);
    grad->add_option("--models", n_models, "random models to check")->check(CLI::PositiveNumber);

    std::string render_in, render_out;
    std::optional<double> lo, hi;
    int channel = 0;
    auto* render = app.add_subcommand("render", "render one channel of a tensor file as PGM");
    render->add_option("input", render_in, "tensor file")->required();
    render->add_option("output", render_out, "PGM file")->required();
    render->add_option("--lo", lo, "value mapped to black");
    render->add_option("--hi", hi, "value mapped to white");
    render->add_option("--channel", channel, "channel to render")->check(CLI::NonNegativeNumber);

    if (argc <= 1) {
        std::cerr << app.help();
        return kUsage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (render->parsed()) {
            if (lo.has_value() != hi.has_value()) throw UsageError("--lo and --hi must be given together");
            return report(dgp_render(render_in.c_str(), render_out.c_str(), channel, lo.has_value(),
                                     lo.value_or(0.0), hi.value_or(0.0)));
        }

        json j = load_config(common);
        if (gen_darcy->parsed()) j["task"] = psi == "exp" ? "darcy-continuous" : "darcy-clipped";
        if (gen_ns->parsed()) j["task"] = "ns2d";
        if (gen_litho->parsed()) j["task"] = "litho-toy";
        set_if(j, "data", "resolution", resolution);
        set_if(j, "data", "n_train", n_train);
        set_if(j, "data", "n_test", n_test);
        set_if(j, "data", "seed", data_seed);
        set_if(j, "data", "full_trajectory", full_trajectory);

        const char* train_section = train_sur->parsed() ? "surrogate_train" : "prior_train";
        set_if(j, train_section, "epochs", epochs);
        set_if(j, train_section, "batch", batch);
        set_if(j, train_section, "lr0", lr);
        set_if(j, train_section, "n_critic", n_critic);

        set_if(j, "inverse", "mode", mode);
        set_if(j, "inverse", "variant", variant);
        set_if(j, "inverse", "gamma", gamma);
        set_if(j, "inverse", "l2_lambda", lambda);
        set_if(j, "inverse", "steps", steps);
        set_if(j, "inverse", "n_samples", n_samples);
        set_if(j, "inverse", "burn_in", burn_in);
        set_if(j, "inverse", "thinning", thinning);
        set_if(j, "inverse", "precondition", precondition);

        set_if(j, "mala", "step_size", step_size);
        set_if(j, "mala", "n_steps", mala_steps);
        set_if(j, "mala", "burn_in", mala_burn);
        set_if(j, "mala", "obs_sigma_rel", obs_sigma_rel);

        set_if(j, "bound", "n_probes", probes);
        set_if(j, "bound", "n_pairs", pairs);
        set_if(j, "bound", "n_restarts", restarts);

        ConfigHandle cfg;
        resolve(j, cfg);
        const dgp_targets t = to_c(targets);

        if (gen_darcy->parsed() || gen_ns->parsed() || gen_litho->parsed()) return report(dgp_generate(cfg.p));
        if (train_sur->parsed()) return report(dgp_train_surrogate(cfg.p));
        if (train_prior->parsed()) return report(dgp_train_prior(cfg.p));
        if (invert->parsed()) return report(dgp_invert(cfg.p, &t));
        if (mcmc->parsed()) return report(dgp_mcmc(cfg.p, &t));
        if (eval->parsed()) return report(dgp_eval(cfg.p));
        if (bound->parsed()) return report(dgp_diag_bound(cfg.p, &t));
        if (grad->parsed()) return report(dgp_grad_check(cfg.p, n_models));
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
    return kUsage;
}
