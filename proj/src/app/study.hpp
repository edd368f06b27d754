#pragma once

#include "app/config.hpp"
#include "app/tasks.hpp"
#include "inverse/langevin.hpp"
#include "metrics/report.hpp"
#include "training/prior.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dgp {

struct TrainedModels {
    FnoParams surrogate;
    PriorModel prior;
    std::vector<CurvePoint> surrogate_curve, prior_curve;
    double critic_monotone_fraction = 0.0;
    double seconds = 0.0;
};

TrainedModels train_models(const Dataset& ds, const ExperimentConfig& cfg);

// Method label used in reports, e.g. "ld-with-prior" or "ld-posterior".
std::string method_name(const InverseConfig& cfg);

struct CandidateScore {
    double rel_error = 0.0;            // ||true(a) - u*|| / ||u*||, projected design
    double max_error = 0.0;
    double surrogate_rel_error = 0.0;  // ||F(a) - u*|| / ||u*||, design as optimized
    std::optional<double> epe_fraction;
};

CandidateScore score_candidate(const Field& a, const Field& u_star, const TrueForward& truth, const FnoParams& surrogate,
                               const DatasetManifest& m, const EpeConfig& epe);

struct StudyOutcome {
    std::vector<EvalRecord> records; // one per (target, variant); posterior runs contribute their first sample
    std::vector<CandidateScore> scores;
};

// Inverts the first n_targets test observations (0 = all) with each variant,
// using cfg.inverse for everything else, and scores them with the true solver.
StudyOutcome run_inverse_study(const Dataset& ds, const TrainedModels& models, const ExperimentConfig& cfg,
                               const std::vector<InverseVariant>& variants, std::size_t n_targets = 0);

} // namespace dgp
