#ifndef SGDOL_H
#define SGDOL_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum SgdolStatus {
  SGDOL_STATUS_OK = 0,
  SGDOL_STATUS_NULL_POINTER = 1,
  SGDOL_STATUS_INVALID_ARGUMENT = 2,
  SGDOL_STATUS_DIMENSION_MISMATCH = 3,
  SGDOL_STATUS_NON_FINITE = 4,
  SGDOL_STATUS_DIVERGED = 5,
  SGDOL_STATUS_CONTRACT_VIOLATION = 6,
  SGDOL_STATUS_PARSE_ERROR = 7,
  SGDOL_STATUS_VALIDATION_ERROR = 8,
  SGDOL_STATUS_IO_ERROR = 9,
  SGDOL_STATUS_PANIC = 10,
} SgdolStatus;

// An optimizer with its current iterate.
typedef struct SgdolOptimizer SgdolOptimizer;

// A stochastic gradient oracle.
typedef struct SgdolOracle SgdolOracle;

// A random stream: fixed by `(seed, stream_id)`.
typedef struct SgdolRng SgdolRng;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null if the last
// call succeeded. Valid until the next call on the same thread.
const char *sgdol_last_error(void);

// Creates a random stream.
//
// # Safety
// `out` must be a valid pointer.
enum SgdolStatus sgdol_rng_new(uint64_t seed, uint64_t stream_id, struct SgdolRng **out);

// # Safety
// `rng` must come from [`sgdol_rng_new`] (or be null) and not be used after.
void sgdol_rng_free(struct SgdolRng *rng);

// Two-dimensional Rosenbrock function with additive Gaussian gradient noise
// of standard deviation `sigma`.
//
// # Safety
// `out` must be a valid pointer.
enum SgdolStatus sgdol_oracle_rosenbrock(double sigma, struct SgdolOracle **out);

// `f(x) = ½ Σ diag[i]·x[i]²` with per-coordinate Gaussian noise `noise[i]`
// (`noise` may be null for none).
//
// # Safety
// `diag` (and `noise`, if non-null) must point to `dim` doubles; `out` must
// be a valid pointer.
enum SgdolStatus sgdol_oracle_quadratic(const double *diag,
                                        const double *noise,
                                        size_t dim,
                                        struct SgdolOracle **out);

// Bounded-loss classification objective over a LibSVM file (bias column
// appended). `batch_size == 0` means full batch; `n_features == 0` infers
// the feature count.
//
// # Safety
// `path` must be a nul-terminated string; `out` a valid pointer.
enum SgdolStatus sgdol_oracle_libsvm(const char *path,
                                     size_t batch_size,
                                     size_t n_features,
                                     struct SgdolOracle **out);

// # Safety
// `oracle` must come from an `sgdol_oracle_*` constructor (or be null).
void sgdol_oracle_free(struct SgdolOracle *oracle);

// Dimension of the oracle's domain (0 for a null handle).
//
// # Safety
// `oracle` must be a valid handle or null.
size_t sgdol_oracle_dim(const struct SgdolOracle *oracle);

// Draws a pair of independent stochastic gradients at `x` into `g` and
// `g_prime`.
//
// # Safety
// `x`, `g` and `g_prime` must point to `dim` doubles; handles must be valid.
enum SgdolStatus sgdol_oracle_sample_pair(const struct SgdolOracle *oracle,
                                          const double *x,
                                          size_t dim,
                                          struct SgdolRng *rng,
                                          double *g,
                                          double *g_prime);

// Exact `f(x)`.
//
// # Safety
// `x` must point to `dim` doubles; `value` must be valid.
enum SgdolStatus sgdol_oracle_value(const struct SgdolOracle *oracle,
                                    const double *x,
                                    size_t dim,
                                    double *value);

// SGD with a single stepsize learned by FTRL on surrogate losses.
//
// # Safety
// `x1` must point to `dim` doubles; `out` must be valid.
enum SgdolStatus sgdol_optimizer_new(double m,
                                     double alpha,
                                     const double *x1,
                                     size_t dim,
                                     struct SgdolOptimizer **out);

// Any optimizer, described by TOML text such as
// `kind = "adam"\nlr = 0.01` (the keys of one `[[optimizer]]` entry).
//
// # Safety
// `config` must be nul-terminated; `x1` must point to `dim` doubles.
enum SgdolStatus sgdol_optimizer_from_toml(const char *config,
                                           const double *x1,
                                           size_t dim,
                                           struct SgdolOptimizer **out);

// # Safety
// `opt` must come from an `sgdol_optimizer_*` constructor (or be null).
void sgdol_optimizer_free(struct SgdolOptimizer *opt);

// Plays one round with the pair `(g, g_prime)`. Writes the mean stepsize
// used to `eta` when it is non-null.
//
// # Safety
// `g` and `g_prime` must point to `dim` doubles.
enum SgdolStatus sgdol_optimizer_step(struct SgdolOptimizer *opt,
                                      const double *g,
                                      const double *g_prime,
                                      size_t dim,
                                      double *eta);

// Copies the current iterate into `x`.
//
// # Safety
// `x` must point to `dim` doubles.
enum SgdolStatus sgdol_optimizer_x(const struct SgdolOptimizer *opt, double *x, size_t dim);

// Closed-form FTRL stepsize from the running sums `Σ⟨g, g'⟩` and `Σ‖g‖²`.
//
// # Safety
// `eta` must be a valid pointer.
enum SgdolStatus sgdol_ftrl_stepsize(double alpha,
                                     double m,
                                     double sum_inner,
                                     double sum_sq,
                                     double *eta);

// Runs the experiment in a TOML config file and writes its CSV/JSON output
// to `output_dir` (or the config's `output` when null).
//
// # Safety
// `config_path` must be nul-terminated; `output_dir` nul-terminated or null.
enum SgdolStatus sgdol_run_config(const char *config_path, const char *output_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SGDOL_H */
