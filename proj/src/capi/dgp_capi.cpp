#include "dgp/dgp.h"

#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/pgm.hpp"
#include "core/error.hpp"
#include "core/tensor_io.hpp"
#include "metrics/metrics.hpp"
#include "solvers/darcy.hpp"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

struct dgp_field {
    dgp::Field f;
};

struct dgp_config {
    dgp::ExperimentConfig c;
};

namespace {

thread_local std::string g_last_error;

dgp_status map_code(dgp::ErrorCode c)
{
    using dgp::ErrorCode;
    switch (c) {
    case ErrorCode::InvalidArgument: return DGP_ERR_INVALID_ARGUMENT;
    case ErrorCode::ShapeMismatch: return DGP_ERR_SHAPE_MISMATCH;
    case ErrorCode::NonFinite: return DGP_ERR_NON_FINITE;
    case ErrorCode::BadMagic:
    case ErrorCode::BadVersion:
    case ErrorCode::BadDtype:
    case ErrorCode::Truncated: return DGP_ERR_FORMAT;
    case ErrorCode::Io: return DGP_ERR_IO;
    case ErrorCode::SolverFailure: return DGP_ERR_SOLVER;
    case ErrorCode::Divergence: return DGP_ERR_DIVERGENCE;
    case ErrorCode::CflViolation: return DGP_ERR_CFL;
    }
    return DGP_ERR_INTERNAL;
}

template <class Fn>
dgp_status guarded(Fn&& fn)
{
    g_last_error.clear();
    try {
        fn();
        return DGP_OK;
    } catch (const dgp::Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        g_last_error = e.what();
        return DGP_ERR_IO;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return DGP_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DGP_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return DGP_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    dgp::require(p != nullptr, std::string(what) + " must not be NULL");
}

dgp::Boundary to_boundary(dgp_boundary b)
{
    switch (b) {
    case DGP_BOUNDARY_PERIODIC: return dgp::Boundary::Periodic;
    case DGP_BOUNDARY_DIRICHLET_ZERO: return dgp::Boundary::DirichletZero;
    case DGP_BOUNDARY_NEUMANN: return dgp::Boundary::Neumann;
    }
    throw dgp::Error(dgp::ErrorCode::InvalidArgument, "unknown boundary kind");
}

char* dup_string(const std::string& s)
{
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

dgp::TargetSelection to_selection(const dgp_targets* t)
{
    dgp::TargetSelection s;
    if (!t) return s;
    if (t->target_file) s.target_file = t->target_file;
    if (t->test_index >= 0) s.test_index = static_cast<std::size_t>(t->test_index);
    s.max_targets = t->max_targets;
    dgp::require(!(s.target_file && s.test_index), "give either a target file or a test index, not both");
    return s;
}

std::optional<dgp::ValueRange> to_range(int has_range, double lo, double hi)
{
    if (!has_range) return std::nullopt;
    return dgp::ValueRange{lo, hi};
}

} // namespace

extern "C" {

const char* dgp_version(void) { return "1.0.0"; }
const char* dgp_last_error(void) { return g_last_error.c_str(); }
void dgp_string_free(char* s) { delete[] s; }

dgp_status dgp_field_create(int nx, int ny, int channels, dgp_boundary boundary, dgp_field** out)
{
    return guarded([&] {
        need(out, "out");
        dgp::require(channels >= 1, "channels must be >= 1");
        *out = new dgp_field{dgp::Field(dgp::Grid::make(nx, ny, to_boundary(boundary)), channels)};
    });
}

dgp_status dgp_field_read(const char* path, dgp_boundary boundary, dgp_field** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new dgp_field{dgp::read_field(path, to_boundary(boundary))};
    });
}

dgp_status dgp_field_write(const dgp_field* f, const char* path)
{
    return guarded([&] {
        need(f, "field");
        need(path, "path");
        dgp::write_field(path, f->f);
    });
}

void dgp_field_free(dgp_field* f) { delete f; }

dgp_status dgp_field_shape(const dgp_field* f, int* nx, int* ny, int* channels)
{
    return guarded([&] {
        need(f, "field");
        if (nx) *nx = f->f.nx();
        if (ny) *ny = f->f.ny();
        if (channels) *channels = f->f.channels();
    });
}

double* dgp_field_data(dgp_field* f) { return f ? f->f.storage().data() : nullptr; }

dgp_status dgp_relative_error(const dgp_field* pred, const dgp_field* truth, double* out)
{
    return guarded([&] {
        need(pred, "pred");
        need(truth, "truth");
        need(out, "out");
        *out = dgp::relative_error(pred->f, truth->f);
    });
}

dgp_status dgp_max_error(const dgp_field* pred, const dgp_field* truth, double* out)
{
    return guarded([&] {
        need(pred, "pred");
        need(truth, "truth");
        need(out, "out");
        *out = dgp::max_error(pred->f, truth->f);
    });
}

dgp_status dgp_solve_darcy(const dgp_field* perm, dgp_field** out)
{
    return guarded([&] {
        need(perm, "perm");
        need(out, "out");
        *out = new dgp_field{dgp::solve_darcy(dgp::DarcyProblem::with_unit_source(perm->f))};
    });
}

dgp_status dgp_render_pgm(const dgp_field* f, int channel, const char* path, int has_range, double lo, double hi)
{
    return guarded([&] {
        need(f, "field");
        need(path, "path");
        dgp::require(channel >= 0 && channel < f->f.channels(), "channel out of range");
        dgp::Field one(f->f.grid(), 1);
        for (std::size_t p = 0; p < one.size(); ++p) one[p] = f->f[p * f->f.channels() + channel];
        dgp::render_pgm(one, path, to_range(has_range, lo, hi));
    });
}

dgp_status dgp_config_from_json(const char* json, dgp_config** out)
{
    return guarded([&] {
        need(json, "json");
        need(out, "out");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(json);
        } catch (const nlohmann::json::exception& e) {
            throw dgp::Error(dgp::ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
        }
        *out = new dgp_config{dgp::ExperimentConfig::from_json(j)};
    });
}

dgp_status dgp_config_to_json(const dgp_config* cfg, char** out_json)
{
    return guarded([&] {
        need(cfg, "config");
        need(out_json, "out_json");
        *out_json = dup_string(cfg->c.to_json().dump(2));
    });
}

void dgp_config_free(dgp_config* cfg) { delete cfg; }

dgp_status dgp_generate(const dgp_config* cfg)
{
    return guarded([&] {
        need(cfg, "config");
        dgp::cmd_generate(cfg->c);
    });
}

dgp_status dgp_train_surrogate(const dgp_config* cfg)
{
    return guarded([&] {
        need(cfg, "config");
        dgp::cmd_train_surrogate(cfg->c);
    });
}

dgp_status dgp_train_prior(const dgp_config* cfg)
{
    return guarded([&] {
        need(cfg, "config");
        dgp::cmd_train_prior(cfg->c);
    });
}

dgp_status dgp_invert(const dgp_config* cfg, const dgp_targets* targets)
{
    return guarded([&] {
        need(cfg, "config");
        dgp::cmd_invert(cfg->c, to_selection(targets));
    });
}

dgp_status dgp_mcmc(const dgp_config* cfg, const dgp_targets* targets)
{
    return guarded([&] {
        need(cfg, "config");
        dgp::cmd_mcmc(cfg->c, to_selection(targets));
    });
}

dgp_status dgp_eval(const dgp_config* cfg)
{
    return guarded([&] {
        need(cfg, "config");
        dgp::cmd_eval(cfg->c);
    });
}

dgp_status dgp_diag_bound(const dgp_config* cfg, const dgp_targets* targets)
{
    return guarded([&] {
        need(cfg, "config");
        dgp::cmd_diag_bound(cfg->c, to_selection(targets));
    });
}

dgp_status dgp_grad_check(const dgp_config* cfg, int n_models)
{
    return guarded([&] {
        need(cfg, "config");
        dgp::cmd_grad_check(cfg->c, n_models);
    });
}

dgp_status dgp_render(const char* in_path, const char* out_path, int channel, int has_range, double lo, double hi)
{
    return guarded([&] {
        need(in_path, "in_path");
        need(out_path, "out_path");
        dgp::cmd_render(in_path, out_path, to_range(has_range, lo, hi), channel);
    });
}

} // extern "C"
