#ifndef NCPHI4_H
#define NCPHI4_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Ncphi4Status {
  NCPHI4_STATUS_OK = 0,
  NCPHI4_STATUS_NULL_POINTER = 1,
  NCPHI4_STATUS_INVALID_UTF8 = 2,
  // Unparseable or invalid graph text, or unknown catalog name.
  NCPHI4_STATUS_GRAPH = 3,
  // Parameters, cutoff or kinematics outside the evaluator's domain.
  NCPHI4_STATUS_DOMAIN = 4,
  // Quadrature did not converge or Monte Carlo degenerated.
  NCPHI4_STATUS_NUMERICAL = 5,
  NCPHI4_STATUS_UNSUPPORTED = 6,
  NCPHI4_STATUS_PANIC = 7,
} Ncphi4Status;

typedef enum Ncphi4GraphClass {
  NCPHI4_GRAPH_CLASS_PLANAR_REGULAR = 0,
  NCPHI4_GRAPH_CLASS_PLANAR_IRREGULAR = 1,
  NCPHI4_GRAPH_CLASS_NONPLANAR = 2,
} Ncphi4GraphClass;

typedef enum Ncphi4Divergence {
  NCPHI4_DIVERGENCE_RENORMALIZABLE = 0,
  NCPHI4_DIVERGENCE_FINITE_RENORMALIZATION = 1,
  NCPHI4_DIVERGENCE_CONVERGENT = 2,
} Ncphi4Divergence;

typedef enum Ncphi4Method {
  NCPHI4_METHOD_AUTO = 0,
  NCPHI4_METHOD_BESSEL1D = 1,
  NCPHI4_METHOD_REDUCED3D = 2,
  NCPHI4_METHOD_SCHWINGER_GAUSS = 3,
  NCPHI4_METHOD_SCHWINGER_MC = 4,
} Ncphi4Method;

// Opaque graph handle.
typedef struct Ncphi4Graph Ncphi4Graph;

typedef struct Ncphi4Params {
  double a;
  double mu2;
  double theta;
  double m_base;
} Ncphi4Params;

// Schwinger window `[alpha_min, alpha_max]` (`alpha_max` may be
// infinite); `p_uv > 0` adds a hard momentum cutoff.
typedef struct Ncphi4Cutoff {
  double alpha_min;
  double alpha_max;
  double p_uv;
} Ncphi4Cutoff;

typedef struct Ncphi4Topology {
  size_t n_vertices;
  size_t n_external;
  size_t n_lines;
  size_t n_faces;
  size_t genus;
  size_t broken_faces;
  enum Ncphi4GraphClass graph_class;
  enum Ncphi4Divergence divergence;
  int64_t omega_bound;
} Ncphi4Topology;

typedef struct Ncphi4Amplitude {
  double re;
  double im;
  double abs_err;
  enum Ncphi4Method method;
  // Effective sample size, or -1 for deterministic methods.
  double ess;
} Ncphi4Amplitude;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL
// terminated). Returns the message length in bytes, excluding the NUL.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t ncphi4_last_error(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *ncphi4_version(void);

// Model defaults: `a = 1`, `μ² = 1`, `θ = 1`, `M = 2`.
struct Ncphi4Params ncphi4_params_default(void);

// The unrestricted window `[0, ∞)`.
struct Ncphi4Cutoff ncphi4_cutoff_full(void);

// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum Ncphi4Status ncphi4_graph_catalog(const char *name, struct Ncphi4Graph **out);

// Parses a graph in the line-oriented text format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum Ncphi4Status ncphi4_graph_parse(const char *text, struct Ncphi4Graph **out);

// # Safety
// `g` must be null or a handle from this library not yet freed.
void ncphi4_graph_free(struct Ncphi4Graph *g);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum Ncphi4Status ncphi4_graph_topology(const struct Ncphi4Graph *g, struct Ncphi4Topology *out);

// Amplitude at the template external momenta of scale `k`, with the
// vertex coupling factored out. `rel_tol` applies to quadrature methods,
// `samples` and `seed` to Monte Carlo.
//
// # Safety
// `g` must be a live handle; `params`, `cut` and `out` valid pointers.
enum Ncphi4Status ncphi4_amplitude(const struct Ncphi4Graph *g,
                                   double k,
                                   const struct Ncphi4Params *params,
                                   const struct Ncphi4Cutoff *cut,
                                   enum Ncphi4Method method,
                                   double rel_tol,
                                   size_t samples,
                                   uint64_t seed,
                                   struct Ncphi4Amplitude *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCPHI4_H */
