#pragma once

#include "core/field.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dgp {

enum class TaskKind { DarcyContinuous, DarcyClipped, Ns2d, LithoToy };

std::string to_string(TaskKind t);
TaskKind task_from_string(const std::string& s);
// Darcy tasks live on Dirichlet node grids, the others on the torus.
Boundary task_boundary(TaskKind t);

struct ChannelStats {
    std::vector<double> mean, std;

    // Per-channel mean and population standard deviation over every pixel of
    // every field. A channel with zero spread gets std 1 so that
    // normalization stays invertible.
    static ChannelStats of(const std::vector<Field>& fields);
    void validate(int channels) const;
};

Field normalize(const Field& f, const ChannelStats& s);
Field denormalize(const Field& f, const ChannelStats& s);
// Chain rule for denormalize: d/d(normalized) given d/d(physical).
Field denormalize_adjoint(const Field& grad_physical, const ChannelStats& s);

struct SampleMeta {
    std::string split; // "train" or "test"
    std::size_t index = 0;
    double alpha = 0.0, tau = 0.0;
    std::string psi;
    std::uint64_t seed = 0;
};

struct DatasetManifest {
    TaskKind task = TaskKind::DarcyClipped;
    int resolution = 0;
    std::size_t n_train = 0, n_test = 0;
    int a_channels = 1, u_channels = 1;
    bool has_trajectories = false;
    std::vector<SampleMeta> samples;
    ChannelStats a_stats, u_stats;
    nlohmann::json task_config = nlohmann::json::object();

    void validate() const;
    nlohmann::json to_json() const;
    static DatasetManifest from_json(const nlohmann::json& j);
};

struct Dataset {
    DatasetManifest manifest;
    std::vector<Field> a_train, u_train, a_test, u_test;
    std::vector<Field> traj_train, traj_test; // NS only: snapshots as channels

    Grid grid() const;
    // Recomputes normalization stats from the training split.
    void refresh_stats();
};

std::filesystem::path sample_path(const std::filesystem::path& dir, const std::string& split, const std::string& kind,
                                  std::size_t index);

// Writes manifest.json and every tensor under dir/{train,test}/.
void save_dataset(const std::filesystem::path& dir, const Dataset& ds);
// Loads and checks that the counts in the manifest match the files on disk.
Dataset load_dataset(const std::filesystem::path& dir);

} // namespace dgp
