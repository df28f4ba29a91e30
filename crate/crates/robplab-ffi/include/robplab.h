#ifndef ROBPLAB_H
#define ROBPLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum RlStatus {
  RL_STATUS_OK = 0,
  /**
   * A parameter violated a precondition.
   */
  RL_STATUS_INVALID_ARGUMENT = 1,
  /**
   * A configured resource limit was exceeded.
   */
  RL_STATUS_RESOURCE_LIMIT = 2,
  /**
   * A certificate or property check failed.
   */
  RL_STATUS_VERIFICATION_FAILED = 3,
  /**
   * Malformed input text.
   */
  RL_STATUS_PARSE_ERROR = 4,
  /**
   * A required pointer was null.
   */
  RL_STATUS_NULL_POINTER = 5,
} RlStatus;

/**
 * Opaque undirected graph handle.
 */
typedef struct RlGraph RlGraph;

/**
 * Opaque branching-program handle.
 */
typedef struct RlProgram RlProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. Valid until
 * the next failing call; never null.
 */
const char *rl_last_error_message(void);

/**
 * Release a string returned through a `char **` output.
 *
 * # Safety
 * `s` must come from this library and not have been freed before.
 */
void rl_string_free(char *s);

/**
 * Parse a PACE-format (`p tw ...`) graph.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum RlStatus rl_graph_parse(const char *text, struct RlGraph **out);

/**
 * Build the hard-family instance for treewidth target `k >= 3` and tree
 * height `r`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RlStatus rl_graph_family(uint32_t k, uint32_t r, struct RlGraph **out);

/**
 * # Safety
 * `g` must be a live graph handle (or null, which is ignored).
 */
void rl_graph_free(struct RlGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
uint32_t rl_graph_vertex_count(const struct RlGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
size_t rl_graph_edge_count(const struct RlGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
uint32_t rl_graph_max_degree(const struct RlGraph *g);

/**
 * Write the graph in PACE format.
 *
 * # Safety
 * `g` must be a live graph handle; `out` a valid pointer.
 */
enum RlStatus rl_graph_write(const struct RlGraph *g, char **out);

/**
 * Write the monotone 2-CNF of the graph in DIMACS format. Fails on graphs
 * with isolated vertices.
 *
 * # Safety
 * `g` must be a live graph handle; `out` a valid pointer.
 */
enum RlStatus rl_phi_dimacs(const struct RlGraph *g, char **out);

/**
 * Exact matching width by subset dynamic programming; `limit` caps the
 * vertex count (22 is the conventional default).
 *
 * # Safety
 * `g` must be a live graph handle; `out_width` a valid pointer.
 */
enum RlStatus rl_exact_mw(const struct RlGraph *g, uint32_t limit, uint32_t *out_width);

/**
 * Upper bound on the matching width by seeded local search.
 *
 * # Safety
 * `g` must be a live graph handle; `out_width` a valid pointer.
 */
enum RlStatus rl_heuristic_mw(const struct RlGraph *g,
                              uint64_t budget,
                              uint64_t seed,
                              uint32_t *out_width);

/**
 * The constant `f(x) = -(x+1)/log2(1 - 2^-x)`; NaN for `x = 0`.
 */
double rl_f_const(uint32_t x);

/**
 * The size bound `2^(mw / f(max_degree))` for programs computing the
 * graph's monotone 2-CNF.
 *
 * # Safety
 * `g` must be a live graph handle; `out_bound` a valid pointer.
 */
enum RlStatus rl_nrobp_lower_bound(const struct RlGraph *g, uint32_t mw, double *out_bound);

/**
 * Build the frontier OBDD of the graph's monotone 2-CNF along the identity
 * variable order.
 *
 * # Safety
 * `g` must be a live graph handle; `out` a valid pointer.
 */
enum RlStatus rl_build_obdd(const struct RlGraph *g, struct RlProgram **out);

/**
 * Parse a branching program in the `nrobp` text format.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum RlStatus rl_program_parse(const char *text, struct RlProgram **out);

/**
 * Write the program in the `nrobp` text format.
 *
 * # Safety
 * `z` must be a live program handle; `out` a valid pointer.
 */
enum RlStatus rl_program_write(const struct RlProgram *z, char **out);

/**
 * # Safety
 * `z` must be a live program handle (or null, which is ignored).
 */
void rl_program_free(struct RlProgram *z);

/**
 * # Safety
 * `z` must be a live program handle.
 */
uint32_t rl_program_node_count(const struct RlProgram *z);

/**
 * # Safety
 * `z` must be a live program handle.
 */
size_t rl_program_edge_count(const struct RlProgram *z);

/**
 * # Safety
 * `z` must be a live program handle.
 */
uint32_t rl_program_var_count(const struct RlProgram *z);

/**
 * 1 when no root-leaf path repeats a variable, else 0.
 *
 * # Safety
 * `z` must be a live program handle.
 */
int32_t rl_program_is_read_once(const struct RlProgram *z);

/**
 * 1 when every node sees one variable set and root-leaf paths mention every
 * variable, else 0.
 *
 * # Safety
 * `z` must be a live program handle.
 */
int32_t rl_program_is_uniform(const struct RlProgram *z);

/**
 * Clean the program and eliminate irregular edges until it is uniform.
 *
 * # Safety
 * `z` must be a live program handle; `out` a valid pointer.
 */
enum RlStatus rl_uniformize(const struct RlProgram *z, struct RlProgram **out);

/**
 * Number of sets in the t-cover certificate extracted from the program,
 * after verifying it against the graph's vertex covers. `vc_limit` caps the
 * brute-force cover enumeration (20 is the conventional default).
 *
 * # Safety
 * `z` and `g` must be live handles; `out_sets` a valid pointer.
 */
enum RlStatus rl_certificate_set_count(const struct RlProgram *z,
                                       const struct RlGraph *g,
                                       uint32_t t,
                                       uint32_t vc_limit,
                                       size_t *out_sets);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ROBPLAB_H */
