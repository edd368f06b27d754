#include "training/dataset.hpp"

#include "core/error.hpp"
#include "core/tensor_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace dgp {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(TaskKind t)
{
    switch (t) {
    case TaskKind::DarcyContinuous: return "darcy-continuous";
    case TaskKind::DarcyClipped: return "darcy-clipped";
    case TaskKind::Ns2d: return "ns2d";
    case TaskKind::LithoToy: return "litho-toy";
    }
    return "unknown";
}

TaskKind task_from_string(const std::string& s)
{
    for (TaskKind t : {TaskKind::DarcyContinuous, TaskKind::DarcyClipped, TaskKind::Ns2d, TaskKind::LithoToy})
        if (to_string(t) == s) return t;
    throw Error(ErrorCode::InvalidArgument, "unknown task '" + s + "'");
}

Boundary task_boundary(TaskKind t)
{
    return t == TaskKind::DarcyContinuous || t == TaskKind::DarcyClipped ? Boundary::DirichletZero : Boundary::Periodic;
}

ChannelStats ChannelStats::of(const std::vector<Field>& fields)
{
    require(!fields.empty(), "channel stats of an empty set");
    const int ch = fields.front().channels();
    ChannelStats s;
    s.mean.assign(ch, 0.0);
    s.std.assign(ch, 0.0);
    std::size_t count = 0;
    for (const Field& f : fields) {
        require(f.channels() == ch, ErrorCode::ShapeMismatch, "channel stats: inconsistent channel counts");
        for (std::size_t p = 0; p < f.grid().points(); ++p)
            for (int c = 0; c < ch; ++c) s.mean[c] += f[p * ch + c];
        count += f.grid().points();
    }
    for (double& m : s.mean) m /= static_cast<double>(count);
    for (const Field& f : fields)
        for (std::size_t p = 0; p < f.grid().points(); ++p)
            for (int c = 0; c < ch; ++c) {
                const double d = f[p * ch + c] - s.mean[c];
                s.std[c] += d * d;
            }
    for (double& v : s.std) {
        v = std::sqrt(v / static_cast<double>(count));
        if (!(v > 1e-12)) v = 1.0;
    }
    s.validate(ch);
    return s;
}

void ChannelStats::validate(int channels) const
{
    require(static_cast<int>(mean.size()) == channels && static_cast<int>(std.size()) == channels,
            ErrorCode::ShapeMismatch, "normalization stats do not match the channel count");
    for (int c = 0; c < channels; ++c)
        require(std::isfinite(mean[c]) && std::isfinite(std[c]) && std[c] > 0.0, ErrorCode::NonFinite,
                "normalization stats must be finite with std > 0");
}

Field normalize(const Field& f, const ChannelStats& s)
{
    s.validate(f.channels());
    Field out = f;
    const int ch = f.channels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] - s.mean[i % ch]) / s.std[i % ch];
    return out;
}

Field denormalize(const Field& f, const ChannelStats& s)
{
    s.validate(f.channels());
    Field out = f;
    const int ch = f.channels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] * s.std[i % ch] + s.mean[i % ch];
    return out;
}

Field denormalize_adjoint(const Field& g, const ChannelStats& s)
{
    s.validate(g.channels());
    Field out = g;
    const int ch = g.channels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s.std[i % ch];
    return out;
}

void DatasetManifest::validate() const
{
    require(resolution >= 4, "manifest: resolution must be >= 4");
    require(a_channels >= 1 && u_channels >= 1, "manifest: channel counts must be positive");
    require(samples.size() == n_train + n_test, "manifest: sample metadata does not match the counts");
    if (n_train > 0) {
        a_stats.validate(a_channels);
        u_stats.validate(u_channels);
    }
}

json DatasetManifest::to_json() const
{
    json j;
    j["task"] = to_string(task);
    j["resolution"] = resolution;
    j["n_train"] = n_train;
    j["n_test"] = n_test;
    j["a_channels"] = a_channels;
    j["u_channels"] = u_channels;
    j["has_trajectories"] = has_trajectories;
    j["stats"] = {{"a", {{"mean", a_stats.mean}, {"std", a_stats.std}}},
                  {"u", {{"mean", u_stats.mean}, {"std", u_stats.std}}}};
    json arr = json::array();
    for (const auto& s : samples)
        arr.push_back({{"split", s.split}, {"index", s.index}, {"alpha", s.alpha}, {"tau", s.tau}, {"psi", s.psi},
                       {"seed", s.seed}});
    j["samples"] = arr;
    j["task_config"] = task_config;
    return j;
}

DatasetManifest DatasetManifest::from_json(const json& j)
{
    try {
        DatasetManifest m;
        m.task = task_from_string(j.at("task").get<std::string>());
        m.resolution = j.at("resolution").get<int>();
        m.n_train = j.at("n_train").get<std::size_t>();
        m.n_test = j.at("n_test").get<std::size_t>();
        m.a_channels = j.value("a_channels", 1);
        m.u_channels = j.value("u_channels", 1);
        m.has_trajectories = j.value("has_trajectories", false);
        const json& st = j.at("stats");
        m.a_stats.mean = st.at("a").at("mean").get<std::vector<double>>();
        m.a_stats.std = st.at("a").at("std").get<std::vector<double>>();
        m.u_stats.mean = st.at("u").at("mean").get<std::vector<double>>();
        m.u_stats.std = st.at("u").at("std").get<std::vector<double>>();
        for (const json& s : j.at("samples"))
            m.samples.push_back({s.at("split").get<std::string>(), s.at("index").get<std::size_t>(),
                                 s.at("alpha").get<double>(), s.at("tau").get<double>(), s.at("psi").get<std::string>(),
                                 s.at("seed").get<std::uint64_t>()});
        m.task_config = j.value("task_config", json::object());
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("manifest: ") + e.what());
    }
}

Grid Dataset::grid() const
{
    return Grid::square(manifest.resolution, task_boundary(manifest.task));
}

void Dataset::refresh_stats()
{
    manifest.n_train = a_train.size();
    manifest.n_test = a_test.size();
    if (a_train.empty()) return;
    manifest.a_stats = ChannelStats::of(a_train);
    manifest.u_stats = ChannelStats::of(u_train);
}

fs::path sample_path(const fs::path& dir, const std::string& split, const std::string& kind, std::size_t index)
{
    char name[64];
    std::snprintf(name, sizeof name, "%s_%05zu.dgpt", kind.c_str(), index);
    return dir / split / name;
}

void save_dataset(const fs::path& dir, const Dataset& ds)
{
    ds.manifest.validate();
    require(ds.a_train.size() == ds.manifest.n_train && ds.u_train.size() == ds.manifest.n_train &&
                ds.a_test.size() == ds.manifest.n_test && ds.u_test.size() == ds.manifest.n_test,
            ErrorCode::ShapeMismatch, "dataset: field counts do not match the manifest");
    for (const char* split : {"train", "test"}) fs::create_directories(dir / split);
    auto dump = [&](const std::vector<Field>& v, const char* split, const char* kind) {
        for (std::size_t i = 0; i < v.size(); ++i) write_field(sample_path(dir, split, kind, i), v[i]);
    };
    dump(ds.a_train, "train", "a");
    dump(ds.u_train, "train", "u");
    dump(ds.a_test, "test", "a");
    dump(ds.u_test, "test", "u");
    if (ds.manifest.has_trajectories) {
        dump(ds.traj_train, "train", "traj");
        dump(ds.traj_test, "test", "traj");
    }
    std::ofstream out(dir / "manifest.json");
    out << ds.manifest.to_json().dump(2) << '\n';
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + (dir / "manifest.json").string());
}

Dataset load_dataset(const fs::path& dir)
{
    std::ifstream in(dir / "manifest.json");
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + (dir / "manifest.json").string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("manifest: ") + e.what());
    }
    Dataset ds;
    ds.manifest = DatasetManifest::from_json(j);
    const Boundary b = task_boundary(ds.manifest.task);
    auto load = [&](std::vector<Field>& v, std::size_t n, const char* split, const char* kind, int channels) {
        for (std::size_t i = 0; i < n; ++i) {
            const fs::path p = sample_path(dir, split, kind, i);
            require(fs::exists(p), ErrorCode::Io, "dataset: missing " + p.string());
            Field f = read_field(p, b);
            require(f.nx() == ds.manifest.resolution && f.ny() == ds.manifest.resolution &&
                        (channels == 0 || f.channels() == channels),
                    ErrorCode::ShapeMismatch, "dataset: unexpected shape in " + p.string());
            v.push_back(std::move(f));
        }
        require(!fs::exists(sample_path(dir, split, kind, n)), ErrorCode::ShapeMismatch,
                std::string("dataset: more ") + split + " files on disk than the manifest lists");
    };
    load(ds.a_train, ds.manifest.n_train, "train", "a", ds.manifest.a_channels);
    load(ds.u_train, ds.manifest.n_train, "train", "u", ds.manifest.u_channels);
    load(ds.a_test, ds.manifest.n_test, "test", "a", ds.manifest.a_channels);
    load(ds.u_test, ds.manifest.n_test, "test", "u", ds.manifest.u_channels);
    if (ds.manifest.has_trajectories) {
        load(ds.traj_train, ds.manifest.n_train, "train", "traj", 0);
        load(ds.traj_test, ds.manifest.n_test, "test", "traj", 0);
    }
    return ds;
}

} // namespace dgp
