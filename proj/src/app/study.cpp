#include "app/study.hpp"

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "metrics/metrics.hpp"
#include "training/surrogate.hpp"

#include <chrono>

namespace dgp {

TrainedModels train_models(const Dataset& ds, const ExperimentConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    TrainedModels m;
    SurrogateResult s = train_surrogate(ds, cfg.surrogate_net, cfg.surrogate_train);
    m.surrogate = std::move(s.params);
    m.surrogate_curve = std::move(s.curve);
    PriorResult p = train_prior(ds, cfg.generator_net, cfg.critic_net, cfg.q_channels, cfg.prior_train);
    m.prior = std::move(p.model);
    m.prior_curve = std::move(p.curve);
    m.critic_monotone_fraction = p.critic_monotone_fraction;
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
}

std::string method_name(const InverseConfig& cfg)
{
    switch (cfg.variant) {
    case InverseVariant::WithPrior: return cfg.mode == InverseMode::Posterior ? "ld-posterior" : "ld-with-prior";
    case InverseVariant::NoPriorRandomInit: return "ld-no-prior-random";
    case InverseVariant::NoPriorConditionInit: return "ld-no-prior-condition";
    case InverseVariant::PriorOnly: return "prior-only";
    }
    return "unknown";
}

CandidateScore score_candidate(const Field& a, const Field& u_star, const TrueForward& truth, const FnoParams& surrogate,
                               const DatasetManifest& m, const EpeConfig& epe)
{
    CandidateScore s;
    const Field u_true = truth(a);
    s.rel_error = relative_error(u_true, u_star);
    s.max_error = max_error(u_true, u_star);
    const Field u_sur = denormalize(fno_forward(surrogate, normalize(a, m.a_stats)), m.u_stats);
    s.surrogate_rel_error = relative_error(u_sur, u_star);
    if (m.task == TaskKind::LithoToy) s.epe_fraction = epe_violations(u_true, u_star, epe).fraction;
    return s;
}

StudyOutcome run_inverse_study(const Dataset& ds, const TrainedModels& models, const ExperimentConfig& cfg,
                               const std::vector<InverseVariant>& variants, std::size_t n_targets)
{
    require(!ds.u_test.empty(), "study: dataset has no test samples");
    const std::size_t nt = n_targets == 0 ? ds.u_test.size() : std::min(n_targets, ds.u_test.size());
    const TrueForward truth(ds.manifest);
    const InverseModels im{&models.surrogate, &models.prior, ds.manifest.a_stats, ds.manifest.u_stats};

    const std::size_t jobs = nt * variants.size();
    std::vector<EvalRecord> records(jobs);
    std::vector<CandidateScore> scores(jobs);
    parallel_for(jobs, cfg.threads, [&](std::size_t job) {
        const std::size_t t = job / variants.size();
        InverseConfig ic = cfg.inverse;
        ic.variant = variants[job % variants.size()];
        if (ic.variant != InverseVariant::WithPrior) ic.mode = InverseMode::Map;
        // Each target gets its own latent/noise streams.
        ic.seed = cfg.inverse.seed * 1000003ULL + t;
        const auto cands = run_inverse(ds.u_test[t], im, ic);
        const CandidateScore sc =
            score_candidate(cands.front().a, ds.u_test[t], truth, models.surrogate, ds.manifest, cfg.epe);
        EvalRecord r{to_string(ds.manifest.task), method_name(ic), cfg.seed, sc.rel_error, sc.max_error,
                     cands.front().seconds, {}};
        r.extra["surrogate_rel_error"] = sc.surrogate_rel_error;
        if (sc.epe_fraction) r.extra["epe_fraction"] = *sc.epe_fraction;
        records[job] = std::move(r);
        scores[job] = sc;
    });
    return {std::move(records), std::move(scores)};
}

} // namespace dgp
