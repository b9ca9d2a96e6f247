/* C interface to the vnrg library. All functions return a vnrg_status; on
 * failure vnrg_last_error() describes the problem (per thread). Handles are
 * opaque and must be released with the matching *_free function. */
#ifndef VNRG_VNRG_H
#define VNRG_VNRG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(VNRG_BUILDING_LIBRARY)
#define VNRG_API __declspec(dllexport)
#else
#define VNRG_API __declspec(dllimport)
#endif
#else
#define VNRG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vnrg_status {
  VNRG_OK = 0,
  VNRG_ERR_INVALID_ARGUMENT = 1,
  VNRG_ERR_NUMERICAL = 2,
  VNRG_ERR_FORMAT = 3,
  VNRG_ERR_IO = 4,
  VNRG_ERR_INTERNAL = 5
} vnrg_status;

typedef struct vnrg_model vnrg_model;
typedef struct vnrg_state vnrg_state;

VNRG_API const char* vnrg_version(void);
/* Message of the last failed call on this thread; empty after success. */
VNRG_API const char* vnrg_last_error(void);

/* ---- models ---- */
VNRG_API vnrg_status vnrg_model_ising(size_t n, double hx, double hz, vnrg_model** out);
/* profile: 0 Wilson, 1 uniform. */
VNRG_API vnrg_status vnrg_model_siam(int N, double lambda, double xi0, double eps_f, double U, int profile,
                                     vnrg_model** out);
VNRG_API void vnrg_model_free(vnrg_model* model);
VNRG_API vnrg_status vnrg_model_length(const vnrg_model* model, size_t* out);

/* ---- solvers ---- */
/* max_states = 0 means no cap beyond D. */
VNRG_API vnrg_status vnrg_run_nrg(const vnrg_model* model, size_t D, size_t max_states, int use_sectors,
                                  vnrg_state** out);
VNRG_API vnrg_status vnrg_run_dmrg(const vnrg_model* model, const vnrg_state* initial, size_t M, size_t D,
                                   size_t sweeps, uint64_t seed, vnrg_state** out);

typedef struct vnrg_sweep_options {
  size_t max_sweeps;
  double site_tol;
  size_t site_max_iters;
  double sweep_tol;
  /* 0 uniform, 1 position, 2 Boltzmann */
  int weights;
  double beta;
  int optimize_bond_tensor;
  int use_sectors;
  size_t D;
} vnrg_sweep_options;

VNRG_API void vnrg_sweep_options_default(vnrg_sweep_options* options);
/* Sweeps `initial` and stores the result in *out. final_cost may be NULL. */
VNRG_API vnrg_status vnrg_run_vnrg(const vnrg_model* model, const vnrg_state* initial,
                                   const vnrg_sweep_options* options, vnrg_state** out, double* final_cost);

/* ---- states ---- */
VNRG_API void vnrg_state_free(vnrg_state* state);
VNRG_API vnrg_status vnrg_state_num_states(const vnrg_state* state, size_t* out);
VNRG_API vnrg_status vnrg_state_length(const vnrg_state* state, size_t* out);
/* Fills out[0..capacity) with <H> per state, ascending; *count receives the
 * number of states. */
VNRG_API vnrg_status vnrg_state_energies(const vnrg_state* state, const vnrg_model* model, double* out,
                                         size_t capacity, size_t* count);
VNRG_API vnrg_status vnrg_state_variances(const vnrg_state* state, const vnrg_model* model, double* out,
                                          size_t capacity, size_t* count);
VNRG_API vnrg_status vnrg_state_isometry_residual(const vnrg_state* state, double* out);

/* ---- checkpoints ---- */
VNRG_API vnrg_status vnrg_state_save(const vnrg_state* state, const char* path);
VNRG_API vnrg_status vnrg_state_load(const char* path, vnrg_state** out);
/* Writes a NUL-terminated description into buf (truncated to size) and the
 * full length into *needed. */
VNRG_API vnrg_status vnrg_checkpoint_describe(const char* path, char* buf, size_t size, size_t* needed);

/* ---- experiments ---- */
typedef struct vnrg_run_overrides {
  const char* output_dir; /* NULL keeps the config value */
  int has_seed;
  uint64_t seed;
  int oracle; /* nonzero forces the oracle comparison on */
} vnrg_run_overrides;

VNRG_API vnrg_status vnrg_experiment_run(const char* config_path, const vnrg_run_overrides* overrides);
/* *equal is 1 when the tables agree (ignoring stage wall times). Differences
 * are written to buf like vnrg_checkpoint_describe. */
VNRG_API vnrg_status vnrg_csv_compare(const char* path_a, const char* path_b, double tol, int* equal, char* buf,
                                      size_t size, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* VNRG_VNRG_H */
