/* Deep generative prior inverse design: C interface.
 *
 * All functions return a dgp_status. On failure a description of the last
 * error on the calling thread is available from dgp_last_error(). Objects are
 * opaque handles released with their *_free function; passing NULL to a free
 * function is allowed. */
#ifndef DGP_DGP_H
#define DGP_DGP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(DGP_BUILDING_LIBRARY)
#define DGP_API __attribute__((visibility("default")))
#else
#define DGP_API
#endif

typedef enum dgp_status {
    DGP_OK = 0,
    DGP_ERR_INVALID_ARGUMENT = 1,
    DGP_ERR_SHAPE_MISMATCH = 2,
    DGP_ERR_NON_FINITE = 3,
    DGP_ERR_FORMAT = 4, /* bad magic, version, dtype or truncated tensor file */
    DGP_ERR_IO = 5,
    DGP_ERR_SOLVER = 6,
    DGP_ERR_DIVERGENCE = 7,
    DGP_ERR_CFL = 8,
    DGP_ERR_INTERNAL = 9
} dgp_status;

typedef enum dgp_boundary {
    DGP_BOUNDARY_PERIODIC = 0,
    DGP_BOUNDARY_DIRICHLET_ZERO = 1,
    DGP_BOUNDARY_NEUMANN = 2
} dgp_boundary;

DGP_API const char* dgp_version(void);
/* Message of the most recent failure on this thread ("" if none). */
DGP_API const char* dgp_last_error(void);
/* Frees strings returned through char** out-parameters. */
DGP_API void dgp_string_free(char* s);

/* ---- fields: (ny, nx, channels) row-major, channel-last doubles ---- */
typedef struct dgp_field dgp_field;

DGP_API dgp_status dgp_field_create(int nx, int ny, int channels, dgp_boundary boundary, dgp_field** out);
DGP_API dgp_status dgp_field_read(const char* path, dgp_boundary boundary, dgp_field** out);
DGP_API dgp_status dgp_field_write(const dgp_field* f, const char* path);
DGP_API void dgp_field_free(dgp_field* f);
DGP_API dgp_status dgp_field_shape(const dgp_field* f, int* nx, int* ny, int* channels);
/* Pointer to nx*ny*channels values owned by the field. */
DGP_API double* dgp_field_data(dgp_field* f);

DGP_API dgp_status dgp_relative_error(const dgp_field* pred, const dgp_field* truth, double* out);
DGP_API dgp_status dgp_max_error(const dgp_field* pred, const dgp_field* truth, double* out);
/* Darcy pressure for permeability `perm` (DirichletZero grid) with unit source. */
DGP_API dgp_status dgp_solve_darcy(const dgp_field* perm, dgp_field** out);
/* Writes an 8-bit PGM of one channel; has_range = 0 uses the data min/max. */
DGP_API dgp_status dgp_render_pgm(const dgp_field* f, int channel, const char* path, int has_range, double lo,
                                  double hi);

/* ---- experiment configuration ---- */
typedef struct dgp_config dgp_config;

/* Parses and validates a JSON experiment config. Missing keys take the
 * defaults of the configured task. Invalid configs give DGP_ERR_INVALID_ARGUMENT. */
DGP_API dgp_status dgp_config_from_json(const char* json, dgp_config** out);
DGP_API dgp_status dgp_config_to_json(const dgp_config* cfg, char** out_json);
DGP_API void dgp_config_free(dgp_config* cfg);

/* Target selection for inversion commands: a tensor file, a test index, or
 * (with target_file = NULL and test_index < 0) the first max_targets test
 * observations, 0 meaning all. */
typedef struct dgp_targets {
    const char* target_file;
    long test_index;
    size_t max_targets;
} dgp_targets;

DGP_API dgp_status dgp_generate(const dgp_config* cfg);
DGP_API dgp_status dgp_train_surrogate(const dgp_config* cfg);
DGP_API dgp_status dgp_train_prior(const dgp_config* cfg);
DGP_API dgp_status dgp_invert(const dgp_config* cfg, const dgp_targets* targets);
DGP_API dgp_status dgp_mcmc(const dgp_config* cfg, const dgp_targets* targets);
DGP_API dgp_status dgp_eval(const dgp_config* cfg);
DGP_API dgp_status dgp_diag_bound(const dgp_config* cfg, const dgp_targets* targets);
DGP_API dgp_status dgp_grad_check(const dgp_config* cfg, int n_models);
DGP_API dgp_status dgp_render(const char* in_path, const char* out_path, int channel, int has_range, double lo,
                              double hi);

#ifdef __cplusplus
}
#endif

#endif
