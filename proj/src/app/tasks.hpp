#pragma once

#include "app/config.hpp"
#include "training/dataset.hpp"

namespace dgp {

// Generates the full dataset for cfg.task (train and test splits) and
// computes normalization stats. Samples are independent RNG streams of
// cfg.data.seed, so the result does not depend on `threads`.
Dataset generate_dataset(const ExperimentConfig& cfg);

// True forward operator for a task, reconstructed from the manifest.
class TrueForward {
public:
    explicit TrueForward(const DatasetManifest& m);
    // Physical-unit design -> physical-unit observation. The design is
    // projected first (see project()). Continuous-Darcy designs are
    // log-permeabilities.
    Field operator()(const Field& a) const;
    // Maps a design onto the feasible set: Darcy and litho designs are clamped
    // to the range seen in training; NS designs are unconstrained.
    Field project(const Field& a) const;
    // Hard print of a design (litho only).
    Field print(const Field& a) const;
    TaskKind task() const { return task_; }

private:
    TaskKind task_;
    Grid grid_;
    nlohmann::json cfg_;
    double lo_, hi_;
};

} // namespace dgp
