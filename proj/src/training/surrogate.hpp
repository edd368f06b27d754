#pragma once

#include "neuralop/fno.hpp"
#include "training/dataset.hpp"
#include "training/train_config.hpp"

#include <vector>

namespace dgp {

struct SurrogateResult {
    FnoParams params;
    std::vector<CurvePoint> curve;
};

// ||pred - target|| / ||target|| and its gradient with respect to pred.
double relative_l2_loss(const Field& pred, const Field& target, Field* grad = nullptr);

// Mean relative L2 loss of the network over (already normalized) pairs.
double surrogate_loss(const FnoParams& params, const std::vector<Field>& a, const std::vector<Field>& u, int threads = 1);

// Initial parameters used by train_surrogate for this dataset and seed.
FnoParams init_surrogate(const Dataset& ds, const FnoConfig& net, std::uint64_t seed);

// Supervised training of a -> u on standardized fields. The network config's
// channel counts are taken from the dataset and its modes are clamped to the
// grid. One curve point per optimizer step holds the batch loss before the
// update.
SurrogateResult train_surrogate(const Dataset& ds, const FnoConfig& net, const TrainConfig& cfg);

} // namespace dgp
