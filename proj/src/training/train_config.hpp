#pragma once

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace dgp {

struct TrainConfig {
    int epochs = 50;
    int batch = 16;
    double lr0 = 1e-3;
    std::uint64_t seed = 0;
    int n_critic = 5;
    double gp_lambda = 10.0;
    double gp_h = 1e-3;
    // Optimizer steps; 0 means epochs * ceil(n_train / batch).
    std::size_t steps = 0;
    int threads = 1;

    void validate() const;
    std::size_t total_steps(std::size_t n_train) const;
    nlohmann::json to_json() const;
    // Missing keys keep their defaults.
    static TrainConfig from_json(const nlohmann::json& j);
};

struct CurvePoint {
    std::size_t step = 0;
    double loss = 0.0;
    double lr = 0.0;
};

// CSV with header "step,loss,lr".
void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);

// Epoch-wise shuffled minibatch indices: a fresh Fisher-Yates permutation per
// epoch, consumed in consecutive chunks of `batch` (the last chunk of an epoch
// may be shorter).
class BatchSampler {
public:
    BatchSampler(std::size_t n, int batch, std::uint64_t seed, std::uint64_t stream);
    std::vector<std::size_t> next();

private:
    void reshuffle();
    std::size_t n_;
    int batch_;
    std::uint64_t seed_, stream_;
    std::uint64_t epoch_ = 0;
    std::vector<std::size_t> perm_;
    std::size_t pos_ = 0;
};

} // namespace dgp
