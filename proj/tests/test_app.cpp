#include "doctest.h"

#include "app/config.hpp"
#include "app/pgm.hpp"
#include "app/tasks.hpp"
#include "core/tensor_io.hpp"
#include "dgp/dgp.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

using namespace dgp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("dgp_test_app_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string read_bytes(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + " '" + std::string(DGP_CLI_PATH) + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("experiment config: JSON round trip and validation")
{
    for (TaskKind t : {TaskKind::DarcyClipped, TaskKind::DarcyContinuous, TaskKind::Ns2d, TaskKind::LithoToy}) {
        ExperimentConfig c = ExperimentConfig::defaults_for(t);
        c.propagate();
        const nlohmann::json j = c.to_json();
        CHECK(ExperimentConfig::from_json(j).to_json() == j);
    }

    const auto rejects = [](const char* text) {
        try {
            ExperimentConfig::from_json(nlohmann::json::parse(text));
        } catch (const Error& e) {
            return e.code() == ErrorCode::InvalidArgument;
        }
        return false;
    };
    CHECK(rejects(R"({"bogus": 1})"));
    CHECK(rejects(R"({"task": "heat"})"));
    CHECK(rejects(R"({"inverse": {"mode": "posterior", "variant": "no-prior-random"}})"));
    CHECK(rejects(R"({"data": {"resolution": 2}})"));
    CHECK(rejects(R"({"surrogate_train": {"epochs": "many"}})"));

    const ExperimentConfig c = ExperimentConfig::from_json(nlohmann::json::parse(R"({"seed": 9, "threads": 2})"));
    CHECK(c.surrogate_train.seed == 9);
    CHECK(c.prior_train.seed == 9);
    CHECK(c.inverse.seed == 9);
    CHECK(c.prior_train.threads == 2);
}

TEST_CASE("PGM encoding")
{
    const std::vector<double> ramp = {0.0, 0.5, 1.0, 2.0};
    const auto bytes = encode_pgm(4, 1, ramp, ValueRange{0.0, 1.0});
    const std::string header = "P5\n4 1\n255\n";
    REQUIRE(bytes.size() == header.size() + 4);
    CHECK(std::string(bytes.begin(), bytes.begin() + static_cast<long>(header.size())) == header);
    CHECK(bytes[header.size() + 0] == 0);
    CHECK(bytes[header.size() + 1] == 128); // 127.5 rounds half up
    CHECK(bytes[header.size() + 2] == 255);
    CHECK(bytes[header.size() + 3] == 255); // clamped

    const auto flat = encode_pgm(2, 2, std::vector<double>(4, 3.0));
    REQUIRE(flat.size() == 11 + 4);
    for (std::size_t i = 11; i < flat.size(); ++i) CHECK(flat[i] == 128);

    // Row iy = 0 is the bottom row of the image.
    const auto rows = encode_pgm(1, 2, std::vector<double>{0.0, 1.0});
    CHECK(rows[rows.size() - 2] == 255);
    CHECK(rows[rows.size() - 1] == 0);

    CHECK_THROWS_AS(render_pgm(Field(Grid::square(4), 2), scratch("pgm") / "x.pgm"), Error);
}

TEST_CASE("dataset generation is deterministic and thread-independent")
{
    ExperimentConfig c = ExperimentConfig::defaults_for(TaskKind::DarcyClipped);
    c.data.resolution = 16;
    c.data.n_train = 6;
    c.data.n_test = 2;
    c.propagate();
    const Dataset a = generate_dataset(c);
    c.threads = 3;
    c.propagate();
    const Dataset b = generate_dataset(c);
    REQUIRE(a.a_train.size() == 6);
    REQUIRE(a.u_test.size() == 2);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(a.a_train[i].storage() == b.a_train[i].storage());
        CHECK(a.u_train[i].storage() == b.u_train[i].storage());
        for (double v : a.a_train[i].values()) CHECK((v == 4.0 || v == 12.0));
    }

    const TrueForward truth(a.manifest);
    const Field u = truth(a.a_test[0]);
    CHECK(u.storage() == a.u_test[0].storage());
}

TEST_CASE("C API: fields, errors and config validation")
{
    const fs::path dir = scratch("capi");
    dgp_field* f = nullptr;
    REQUIRE(dgp_field_create(4, 4, 1, DGP_BOUNDARY_PERIODIC, &f) == DGP_OK);
    double* d = dgp_field_data(f);
    for (int i = 0; i < 16; ++i) d[i] = 0.25 * i;
    const std::string path = (dir / "f.dgpt").string();
    REQUIRE(dgp_field_write(f, path.c_str()) == DGP_OK);
    dgp_field* g = nullptr;
    REQUIRE(dgp_field_read(path.c_str(), DGP_BOUNDARY_PERIODIC, &g) == DGP_OK);
    int nx = 0, ny = 0, ch = 0;
    REQUIRE(dgp_field_shape(g, &nx, &ny, &ch) == DGP_OK);
    CHECK(nx == 4);
    CHECK(ny == 4);
    CHECK(ch == 1);
    double rel = 1.0;
    REQUIRE(dgp_relative_error(g, f, &rel) == DGP_OK);
    CHECK(rel == 0.0);
    dgp_field_free(g);
    dgp_field_free(f);

    dgp_field* h = nullptr;
    CHECK(dgp_field_read((dir / "missing.dgpt").string().c_str(), DGP_BOUNDARY_PERIODIC, &h) == DGP_ERR_IO);
    CHECK(std::string(dgp_last_error()).size() > 0);
    std::ofstream((dir / "junk.dgpt").string()) << "not a tensor";
    CHECK(dgp_field_read((dir / "junk.dgpt").string().c_str(), DGP_BOUNDARY_PERIODIC, &h) == DGP_ERR_FORMAT);
    CHECK(dgp_field_create(1, 4, 1, DGP_BOUNDARY_PERIODIC, &h) == DGP_ERR_INVALID_ARGUMENT);

    dgp_config* cfg = nullptr;
    CHECK(dgp_config_from_json("{not json", &cfg) == DGP_ERR_INVALID_ARGUMENT);
    CHECK(dgp_config_from_json(R"({"inverse": {"mode": "posterior", "variant": "no-prior-random"}})", &cfg) ==
          DGP_ERR_INVALID_ARGUMENT);
    REQUIRE(dgp_config_from_json(R"({"task": "ns2d", "seed": 4})", &cfg) == DGP_OK);
    char* text = nullptr;
    REQUIRE(dgp_config_to_json(cfg, &text) == DGP_OK);
    CHECK(nlohmann::json::parse(text).at("task") == "ns2d");
    dgp_string_free(text);
    dgp_config_free(cfg);
    dgp_field_free(nullptr);
}

TEST_CASE("CLI exit codes")
{
    const fs::path dir = scratch("cli");
    CHECK(run_cli("") == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("--help") == 0);

    Field f(Grid::square(4), 1);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i);
    write_field(dir / "in.dgpt", f);
    CHECK(run_cli("render '" + (dir / "in.dgpt").string() + "' '" + (dir / "out.pgm").string() + "'") == 0);
    const std::string pgm = read_bytes(dir / "out.pgm");
    CHECK(pgm.rfind("P5\n4 4\n255\n", 0) == 0);
    CHECK(pgm.size() == 11 + 16);
    CHECK(run_cli("render '" + (dir / "absent.dgpt").string() + "' '" + (dir / "o.pgm").string() + "'") == 2);
    CHECK(run_cli("render a b --lo 0") == 1);

    const std::string out = " --dataset '" + (dir / "data").string() + "' --checkpoints '" + (dir / "ck").string() +
                            "' --output '" + (dir / "out").string() + "'";
    CHECK(run_cli("invert --mode posterior --variant no-prior-random" + out) == 1);
    CHECK(run_cli("invert --gamma -1" + out) == 1);
    CHECK(run_cli("eval --config '" + (dir / "nope.json").string() + "'" + out) == 1);
    CHECK(run_cli("eval" + out, "DGP_SEED=abc") == 1);
    // Valid config but no checkpoints: runtime failure.
    CHECK(run_cli("invert" + out, "DGP_SEED=3") == 2);

    CHECK(run_cli("gen-darcy --resolution 16 --n-train 4 --n-test 2" + out) == 0);
    CHECK(fs::exists(dir / "data" / "manifest.json"));
    const auto echoed = nlohmann::json::parse(read_bytes(dir / "out" / "gen_config.json"));
    CHECK(echoed.at("data").at("resolution") == 16);
    CHECK(echoed.at("task") == "darcy-clipped");

    CHECK(run_cli("gen-darcy --psi exp --resolution 16 --n-train 2 --n-test 1" + out, "DGP_SEED=77") == 0);
    const auto echoed2 = nlohmann::json::parse(read_bytes(dir / "out" / "gen_config.json"));
    CHECK(echoed2.at("seed") == 77);
    CHECK(echoed2.at("task") == "darcy-continuous");
}
