#pragma once

#include "app/config.hpp"
#include "app/pgm.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>

namespace dgp {

// Which observations an inversion command works on. With neither a file nor
// an index, the first max_targets test observations are used (0 = all).
struct TargetSelection {
    std::optional<std::filesystem::path> target_file;
    std::optional<std::size_t> test_index;
    std::size_t max_targets = 0;
};

// Checkpoint locations under cfg.paths.checkpoints.
std::filesystem::path surrogate_stem(const ExperimentConfig& cfg);
std::filesystem::path prior_dir(const ExperimentConfig& cfg);

// Every command echoes its resolved config into cfg.paths.output first.
void cmd_generate(const ExperimentConfig& cfg);
void cmd_train_surrogate(const ExperimentConfig& cfg);
void cmd_train_prior(const ExperimentConfig& cfg);
// Writes candidates under output/candidates/<method>/ with an index.json.
void cmd_invert(const ExperimentConfig& cfg, const TargetSelection& sel);
void cmd_mcmc(const ExperimentConfig& cfg, const TargetSelection& sel);
// Scores every indexed candidate with the true solver; writes output/report.{csv,json}.
void cmd_eval(const ExperimentConfig& cfg);
void cmd_diag_bound(const ExperimentConfig& cfg, const TargetSelection& sel);
// Random small FNOs checked against central differences; throws if any fails.
void cmd_grad_check(const ExperimentConfig& cfg, int n_models);
void cmd_render(const std::filesystem::path& in, const std::filesystem::path& out, std::optional<ValueRange> range,
                int channel);

} // namespace dgp
