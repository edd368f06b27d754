#pragma once

#include "grf/grf.hpp"
#include "inverse/langevin.hpp"
#include "metrics/epe.hpp"
#include "neuralop/fno.hpp"
#include "solvers/litho.hpp"
#include "training/dataset.hpp"
#include "training/train_config.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace dgp {

struct DataGenConfig {
    int resolution = 32;
    std::size_t n_train = 600;
    std::size_t n_test = 16;
    std::uint64_t seed = 0; // data seed; independent of the training seed
    GrfHyperPrior hyper;
    // NS: GRF draws are multiplied by tau^(alpha - 1) so that vorticities
    // are O(0.1-1) rather than O(tau^-alpha).
    bool ns_scale_by_tau = true;
    double nu = 1e-2, T = 1.0, dt = 1e-3;
    int n_snapshots = 10;
    bool full_trajectory = false; // NS: observe every snapshot instead of w(T)
    LithoConfig litho;
    int rects_min = 2, rects_max = 5;

    void validate(TaskKind task) const;
};

struct MalaSettings {
    double obs_sigma_rel = 0.01; // obs_sigma = obs_sigma_rel * RMS(u*) in standardized units
    double step_size = 1e-4;
    int n_steps = 400;
    int burn_in = 100;
    void validate() const;
};

struct BoundSettings {
    int n_probes = 8, n_pairs = 8, n_restarts = 8;
    void validate() const;
};

struct ExperimentPaths {
    std::filesystem::path dataset = "data";
    std::filesystem::path checkpoints = "checkpoints";
    std::filesystem::path output = "out";
};

struct ExperimentConfig {
    TaskKind task = TaskKind::DarcyClipped;
    ExperimentPaths paths;
    DataGenConfig data;
    FnoConfig surrogate_net, generator_net, critic_net;
    int q_channels = 1;
    TrainConfig surrogate_train, prior_train;
    InverseConfig inverse;
    MalaSettings mala;
    EpeConfig epe;
    BoundSettings bound;
    std::uint64_t seed = 1;
    int threads = 1;

    // Desk-scale defaults for a task.
    static ExperimentConfig defaults_for(TaskKind task);
    // Copies the global seed and thread count into the sections that use them.
    void propagate();
    void validate() const;
    nlohmann::json to_json() const;
    // Starts from defaults_for(task) and overlays j; unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j);
};

// Writes the resolved config to dir/<name>_config.json.
void echo_config(const ExperimentConfig& cfg, const std::string& name);

} // namespace dgp
