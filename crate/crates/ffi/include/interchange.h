#ifndef INTERCHANGE_H
#define INTERCHANGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stdint.h>

/**
 * Status codes. The non-zero engine categories match the CLI exit codes.
 */
typedef enum IcStatus {
  IC_STATUS_OK = 0,
  IC_STATUS_CONFIG = 2,
  IC_STATUS_PRECONDITION = 3,
  IC_STATUS_RESOURCE = 4,
  IC_STATUS_NULL_POINTER = 5,
  IC_STATUS_INVALID_UTF8 = 6,
  IC_STATUS_PANIC = 7,
} IcStatus;

/**
 * Graph sampler selector for [`ic_graph_sample`].
 */
typedef enum IcSampler {
  IC_SAMPLER_AUTO = 0,
  IC_SAMPLER_REJECTION = 1,
  IC_SAMPLER_INCREMENTAL = 2,
} IcSampler;

/**
 * Opaque exact chain over all permutations of a small graph.
 */
typedef struct IcChain IcChain;

/**
 * Opaque regular graph.
 */
typedef struct IcGraph IcGraph;

/**
 * Opaque permutation state with incremental cycle bookkeeping.
 */
typedef struct IcState IcState;

/**
 * Effect of one transposition. `kind` is `+1` for a split, `-1` for a merge.
 */
typedef struct IcDelta {
  int32_t kind;
  uint32_t x;
  uint32_t y;
  uint64_t cycles_before;
  uint64_t cycles_after;
  int64_t same_cycle_delta;
} IcDelta;

typedef struct IcEstimate {
  double value;
  double std_error;
  double ess;
  uint64_t replicas;
  double theta;
  double t;
  bool low_ess;
} IcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; valid until the next failing call.
 */
const char *ic_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ic_version(void);

/**
 * Frees a string returned by this library.
 */
void ic_string_free(char *s);

/**
 * Samples a simple `d`-regular graph on `n` vertices.
 */
enum IcStatus ic_graph_sample(uint64_t n,
                              uint64_t d,
                              uint64_t seed,
                              enum IcSampler sampler,
                              struct IcGraph **out);

/**
 * The complete graph `K_n`.
 */
enum IcStatus ic_graph_complete(uint64_t n, struct IcGraph **out);

/**
 * The cycle `C_n`.
 */
enum IcStatus ic_graph_cycle(uint64_t n, struct IcGraph **out);

/**
 * Parses the plain-text graph format (`n d` header, then `u v` lines).
 */
enum IcStatus ic_graph_from_text(const char *text, struct IcGraph **out);

/**
 * Serializes a graph; release the string with [`ic_string_free`].
 */
enum IcStatus ic_graph_to_text(const struct IcGraph *g, char **out);

uint64_t ic_graph_n(const struct IcGraph *g);

uint64_t ic_graph_d(const struct IcGraph *g);

uint64_t ic_graph_num_edges(const struct IcGraph *g);

/**
 * Endpoints `x < y` of edge `index`.
 */
enum IcStatus ic_graph_edge(const struct IcGraph *g, uint64_t index, uint32_t *x, uint32_t *y);

void ic_graph_free(struct IcGraph *g);

/**
 * The identity permutation on the vertices of `g`.
 */
enum IcStatus ic_state_identity(const struct IcGraph *g, struct IcState **out);

/**
 * Composes the transposition of edge `index` on the left. `out` may be null.
 */
enum IcStatus ic_state_apply_edge(struct IcState *s, uint64_t index, struct IcDelta *out);

/**
 * Composes `τ_{x,y}` on the left; `{x, y}` must be an edge. `out` may be null.
 */
enum IcStatus ic_state_apply_transposition(struct IcState *s,
                                           uint32_t x,
                                           uint32_t y,
                                           struct IcDelta *out);

uint64_t ic_state_num_cycles(const struct IcState *s);

uint64_t ic_state_largest_cycle(const struct IcState *s);

uint64_t ic_state_same_cycle_edges(const struct IcState *s);

/**
 * Copies the permutation's images into `buf`, which must hold `n` entries.
 */
enum IcStatus ic_state_image(const struct IcState *s, uint32_t *buf, uint64_t len);

void ic_state_free(struct IcState *s);

/**
 * `T(θ, d)`.
 */
enum IcStatus ic_critical_time(double theta, double d, double *out);

enum IcStatus ic_stirring_interval_bound(double d, double epsilon, double s, double *out);

enum IcStatus ic_theorem1_pointwise_bound(uint32_t theta,
                                          double d,
                                          double epsilon,
                                          double t,
                                          double *out);

enum IcStatus ic_theorem2_integral_bound(double theta,
                                         double d,
                                         double epsilon,
                                         double a,
                                         double b,
                                         double *out);

/**
 * Estimates `log Z_θ(t)`.
 */
enum IcStatus ic_estimate_log_partition(const struct IcGraph *g,
                                        double theta,
                                        double t,
                                        uint64_t replicas,
                                        uint64_t seed,
                                        struct IcEstimate *out);

/**
 * Estimates `P_{θ,t}(A_η)`.
 */
enum IcStatus ic_estimate_weighted_prob(const struct IcGraph *g,
                                        double theta,
                                        double t,
                                        double eta,
                                        uint64_t replicas,
                                        uint64_t seed,
                                        struct IcEstimate *out);

/**
 * Estimates `∫_a^b P_{θ,t}(A_η) dt`.
 */
enum IcStatus ic_estimate_weighted_time_integral(const struct IcGraph *g,
                                                 double theta,
                                                 double a,
                                                 double b,
                                                 double eta,
                                                 uint64_t grid_points,
                                                 uint64_t replicas,
                                                 uint64_t seed,
                                                 struct IcEstimate *out);

/**
 * Builds the exact chain; fails with `Resource` beyond `state_guard` states.
 */
enum IcStatus ic_chain_build(const struct IcGraph *g, uint64_t state_guard, struct IcChain **out);

enum IcStatus ic_chain_partition(const struct IcChain *c, double theta, double t, double *out);

enum IcStatus ic_chain_mean_cycles(const struct IcChain *c, double t, double *out);

enum IcStatus ic_chain_weighted_prob(const struct IcChain *c,
                                     double theta,
                                     double t,
                                     double eta,
                                     double *out);

void ic_chain_free(struct IcChain *c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INTERCHANGE_H */
