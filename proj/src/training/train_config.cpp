#include "training/train_config.hpp"

#include "core/error.hpp"
#include "core/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace dgp {

void TrainConfig::validate() const
{
    require(epochs >= 1, "train: epochs must be >= 1");
    require(batch >= 1, "train: batch must be >= 1");
    require(std::isfinite(lr0) && lr0 >= 0.0, "train: lr0 must be finite and >= 0");
    require(n_critic >= 1, "train: n_critic must be >= 1");
    require(gp_lambda >= 0.0, "train: gp_lambda must be >= 0");
    require(gp_h > 0.0, "train: gp_h must be > 0");
    require(threads >= 1, "train: threads must be >= 1");
}

std::size_t TrainConfig::total_steps(std::size_t n_train) const
{
    if (steps > 0) return steps;
    const std::size_t per_epoch = (n_train + static_cast<std::size_t>(batch) - 1) / static_cast<std::size_t>(batch);
    return std::max<std::size_t>(1, per_epoch * static_cast<std::size_t>(epochs));
}

nlohmann::json TrainConfig::to_json() const
{
    return {{"epochs", epochs},       {"batch", batch},   {"lr0", lr0},     {"seed", seed},
            {"n_critic", n_critic},   {"gp_lambda", gp_lambda}, {"gp_h", gp_h}, {"steps", steps},
            {"threads", threads}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j)
{
    TrainConfig c;
    try {
        c.epochs = j.value("epochs", c.epochs);
        c.batch = j.value("batch", c.batch);
        c.lr0 = j.value("lr0", c.lr0);
        c.seed = j.value("seed", c.seed);
        c.n_critic = j.value("n_critic", c.n_critic);
        c.gp_lambda = j.value("gp_lambda", c.gp_lambda);
        c.gp_h = j.value("gp_h", c.gp_h);
        c.steps = j.value("steps", c.steps);
        c.threads = j.value("threads", c.threads);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("train config: ") + e.what());
    }
    c.validate();
    return c;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve)
{
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
    out << "step,loss,lr\n";
    char line[128];
    for (const auto& p : curve) {
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", p.step, p.loss, p.lr);
        out << line;
    }
}

BatchSampler::BatchSampler(std::size_t n, int batch, std::uint64_t seed, std::uint64_t stream)
    : n_(n), batch_(batch), seed_(seed), stream_(stream)
{
    require(n > 0, "batch sampler: empty dataset");
    require(batch >= 1, "batch sampler: batch must be >= 1");
    reshuffle();
}

void BatchSampler::reshuffle()
{
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    RngStream rng(seed_, stream_, epoch_ << 32);
    for (std::size_t i = n_ - 1; i > 0; --i) std::swap(perm_[i], perm_[rng.below(i + 1)]);
    pos_ = 0;
    ++epoch_;
}

std::vector<std::size_t> BatchSampler::next()
{
    if (pos_ >= n_) reshuffle();
    const std::size_t end = std::min(n_, pos_ + static_cast<std::size_t>(batch_));
    std::vector<std::size_t> out(perm_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                 perm_.begin() + static_cast<std::ptrdiff_t>(end));
    pos_ = end;
    return out;
}

} // namespace dgp
