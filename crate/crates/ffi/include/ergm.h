#ifndef ERGM_H
#define ERGM_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

typedef enum ErgmStatus {
  ERGM_STATUS_OK = 0,
  ERGM_STATUS_NULL_POINTER = 1,
  /**
   * Out-of-range vertex, self-loop, bad probability, bad template or model, size mismatch.
   */
  ERGM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Malformed snapshot bytes.
   */
  ERGM_STATUS_SNAPSHOT = 3,
  ERGM_STATUS_IO = 4,
  /**
   * A fixed-point system had no qualifying solution.
   */
  ERGM_STATUS_NO_SOLUTION = 5,
  /**
   * The output buffer is too small; the required length was still written.
   */
  ERGM_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * Panic or other unexpected failure.
   */
  ERGM_STATUS_INTERNAL = 7,
} ErgmStatus;

typedef enum ErgmRegime {
  ERGM_REGIME_HIGH = 0,
  ERGM_REGIME_LOW = 1,
  ERGM_REGIME_CRITICAL = 2,
} ErgmRegime;

/**
 * Opaque Glauber chain with its own random stream.
 */
typedef struct ErgmChain ErgmChain;

/**
 * Opaque simple graph on `n` labelled vertices.
 */
typedef struct ErgmGraph ErgmGraph;

/**
 * Opaque model: vertex count, coefficients and templates.
 */
typedef struct ErgmModel ErgmModel;

typedef struct ErgmLandscape {
  enum ErgmRegime regime;
  /**
   * Total number of local maxima, which may exceed the buffer passed in.
   */
  size_t num_maxima;
  /**
   * Unique global maximiser, or NaN.
   */
  double p_star;
  /**
   * Endpoint supremum when `L'` has one sign on the interior, or NaN.
   */
  double endpoint_supremum;
} ErgmLandscape;

typedef struct ErgmLocalMax {
  double p;
  double value;
  double second;
  bool is_global;
  bool is_degenerate;
} ErgmLocalMax;

typedef struct ErgmTergmSolution {
  double p1;
  double p2;
  double q;
} ErgmTergmSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty when none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ergm_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ergm_version(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_new_empty(size_t n, struct ErgmGraph **out);

/**
 * `pairs` holds `2 * num_edges` vertex indices.
 *
 * # Safety
 * `pairs` must point to `2 * num_edges` readable values; `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_from_edges(size_t n,
                                      const size_t *pairs,
                                      size_t num_edges,
                                      struct ErgmGraph **out);

/**
 * Erdős–Rényi `G(n, p)` drawn from stream `stream_id` of `seed`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_gnp(size_t n,
                               double p,
                               uint64_t seed,
                               uint64_t stream_id,
                               struct ErgmGraph **out);

/**
 * # Safety
 * `g` must be a live handle or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_clone(const struct ErgmGraph *g, struct ErgmGraph **out);

/**
 * Null is accepted.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void ergm_graph_free(struct ErgmGraph *g);

/**
 * # Safety
 * `g` must be a live handle or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_n(const struct ErgmGraph *g, size_t *out);

/**
 * # Safety
 * `g` must be a live handle or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_edge_count(const struct ErgmGraph *g, size_t *out);

/**
 * # Safety
 * `g` must be a live handle or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_degree(const struct ErgmGraph *g, size_t u, size_t *out);

/**
 * # Safety
 * `g` must be a live handle or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_has_edge(const struct ErgmGraph *g, size_t u, size_t v, bool *out);

/**
 * `changed` may be null.
 *
 * # Safety
 * `g` must be a live handle or null; `changed` must be null or valid for writes.
 */
enum ErgmStatus ergm_graph_set_edge(struct ErgmGraph *g,
                                    size_t u,
                                    size_t v,
                                    bool present,
                                    bool *changed);

/**
 * Encodes the graph as an `ERGX` snapshot. Pass a null `buf` to query the
 * length. When `cap` is too small nothing is copied, `*len` is set, and
 * `ERGM_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes of writes; `len` must be valid for writes.
 */
enum ErgmStatus ergm_graph_to_snapshot(const struct ErgmGraph *g,
                                       uint8_t *buf,
                                       size_t cap,
                                       size_t *len);

/**
 * # Safety
 * `bytes` must point to `len` readable bytes; `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_from_snapshot(const uint8_t *bytes, size_t len, struct ErgmGraph **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum ErgmStatus ergm_graph_read_snapshot(const char *path, struct ErgmGraph **out);

/**
 * # Safety
 * `g` must be a live handle or null; `path` must be a NUL-terminated string.
 */
enum ErgmStatus ergm_graph_write_snapshot(const struct ErgmGraph *g, const char *path);

/**
 * Homomorphism density `t(H, X)` of a template given as `edge`, `triangle`,
 * `two_star`, `k_star:K`, `cycle:K`, or an edge list like `0-1,1-2`.
 *
 * # Safety
 * `g` must be a live handle or null; `template_spec` must be NUL-terminated; `out` must be valid for writes.
 */
enum ErgmStatus ergm_hom_density(const struct ErgmGraph *g,
                                 const char *template_spec,
                                 double *out);

/**
 * `beta[0]` multiplies the edge density; `beta[i]` for `i ≥ 1` multiplies
 * template `templates[i - 1]`, so `num_templates` must be `beta_len - 1`.
 *
 * # Safety
 * `beta` must hold `beta_len` values, `templates` `num_templates` NUL-terminated strings; `out` must be valid for writes.
 */
enum ErgmStatus ergm_model_new(size_t n,
                               const double *beta,
                               size_t beta_len,
                               const char *const *templates,
                               size_t num_templates,
                               struct ErgmModel **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum ErgmStatus ergm_model_edge_triangle(size_t n,
                                         double beta0,
                                         double beta1,
                                         struct ErgmModel **out);

/**
 * Null is accepted.
 *
 * # Safety
 * `m` must come from this library and not be used afterwards.
 */
void ergm_model_free(struct ErgmModel *m);

/**
 * # Safety
 * `m` must be a live handle or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_model_n(const struct ErgmModel *m, size_t *out);

/**
 * `P(X_uv = 1 | rest)` under the model.
 *
 * # Safety
 * Handles must be live or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_conditional_prob(const struct ErgmModel *m,
                                      const struct ErgmGraph *g,
                                      size_t u,
                                      size_t v,
                                      double *out);

/**
 * # Safety
 * Handles must be live or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_hamiltonian(const struct ErgmModel *m, const struct ErgmGraph *g, double *out);

/**
 * Analyses the scalar landscape with default options. Up to `cap` maxima
 * are copied into `maxima` (which may be null when `cap` is 0).
 *
 * # Safety
 * `m` must be a live handle or null; `summary` must be valid for writes; `maxima` valid for `cap` writes.
 */
enum ErgmStatus ergm_landscape_analyze(const struct ErgmModel *m,
                                       struct ErgmLandscape *summary,
                                       struct ErgmLocalMax *maxima,
                                       size_t cap);

/**
 * Fixed points `p1`, `p2`, `q` of the edge + triangle cavity construction.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum ErgmStatus ergm_solve_tergm(double beta0, double beta1, struct ErgmTergmSolution *out);

/**
 * Starts a chain at a copy of `g`. The model and graph handles remain owned
 * by the caller.
 *
 * # Safety
 * Handles must be live or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_chain_new(const struct ErgmModel *m,
                               const struct ErgmGraph *g,
                               uint64_t seed,
                               uint64_t stream_id,
                               struct ErgmChain **out);

/**
 * Null is accepted.
 *
 * # Safety
 * `c` must come from this library and not be used afterwards.
 */
void ergm_chain_free(struct ErgmChain *c);

/**
 * One Glauber update. The resampled pair and its new state are written to
 * the optional outputs.
 *
 * # Safety
 * `c` must be a live handle or null; outputs must be null or valid for writes.
 */
enum ErgmStatus ergm_chain_step(struct ErgmChain *c, size_t *u, size_t *v, bool *present);

/**
 * # Safety
 * `c` must be a live handle or null.
 */
enum ErgmStatus ergm_chain_run(struct ErgmChain *c, uint64_t steps);

/**
 * # Safety
 * `c` must be a live handle or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_chain_steps(const struct ErgmChain *c, uint64_t *out);

/**
 * Copies the current state into a new graph handle.
 *
 * # Safety
 * `c` must be a live handle or null; `out` must be valid for writes.
 */
enum ErgmStatus ergm_chain_graph(const struct ErgmChain *c, struct ErgmGraph **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERGM_H */
