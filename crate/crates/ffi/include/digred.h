#ifndef DIGRED_H
#define DIGRED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which way `digred_reverse` produced its instance.
 */
typedef enum DigredShortcut {
  DIGRED_SHORTCUT_FIXED_NO = 0,
  DIGRED_SHORTCUT_FIXED_YES = 1,
  DIGRED_SHORTCUT_ASSEMBLED = 2,
} DigredShortcut;

/**
 * Result of a call. Decisions use `Ok` for YES and `No` for NO.
 */
typedef enum DigredStatus {
  DIGRED_STATUS_OK = 0,
  DIGRED_STATUS_NO = 1,
  DIGRED_STATUS_NULL_POINTER = -1,
  DIGRED_STATUS_INVALID_UTF8 = -2,
  DIGRED_STATUS_PARSE = -3,
  DIGRED_STATUS_PRECONDITION = -4,
  DIGRED_STATUS_PANIC = -5,
} DigredStatus;

/**
 * A digraph.
 */
typedef struct DigredDigraph DigredDigraph;

/**
 * `D(A)` for a template, with everything needed to reverse instances.
 */
typedef struct DigredReduction DigredReduction;

/**
 * A relational structure (template or instance).
 */
typedef struct DigredStructure DigredStructure;

typedef struct DigredStats {
  size_t vertices;
  size_t edges;
  size_t height;
  /**
   * 1 if the counts match the closed-form formulas.
   */
  uint8_t matches;
} DigredStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Free with
 * [`digred_string_free`].
 */
char *digred_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void digred_string_free(char *s);

/**
 * Static version string.
 */
const char *digred_version(void);

/**
 * Parses the structure text format.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum DigredStatus digred_structure_parse(const char *src, struct DigredStructure **out);

/**
 * # Safety
 * `s` must be null or a live handle.
 */
void digred_structure_free(struct DigredStructure *s);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum DigredStatus digred_structure_serialize(const struct DigredStructure *s, char **out);

/**
 * Number of elements.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t digred_structure_size(const struct DigredStructure *s);

/**
 * Parses the digraph text format.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum DigredStatus digred_digraph_parse(const char *src, struct DigredDigraph **out);

/**
 * # Safety
 * `g` must be null or a live handle.
 */
void digred_digraph_free(struct DigredDigraph *g);

/**
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum DigredStatus digred_digraph_serialize(const struct DigredDigraph *g, char **out);

/**
 * # Safety
 * `g` must be null or a live handle.
 */
size_t digred_digraph_vertex_count(const struct DigredDigraph *g);

/**
 * Builds `D(A)`, merging the relations of `template` first.
 *
 * # Safety
 * `template` must be a live handle; `out` must be writable.
 */
enum DigredStatus digred_reduction_new(const struct DigredStructure *template_,
                                       struct DigredReduction **out);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
void digred_reduction_free(struct DigredReduction *r);

/**
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum DigredStatus digred_reduction_stats(const struct DigredReduction *r, struct DigredStats *out);

/**
 * A copy of the digraph `D(A)`.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum DigredStatus digred_reduction_digraph(const struct DigredReduction *r,
                                           struct DigredDigraph **out);

/**
 * Instance of `CSP(A)` to instance of `CSP(D(A))`.
 *
 * # Safety
 * `instance` must be a live handle; `out` must be writable.
 */
enum DigredStatus digred_forward(const struct DigredStructure *instance,
                                 struct DigredDigraph **out);

/**
 * Instance of `CSP(D(A))` to instance of the merged `CSP(A)`.
 * `shortcut` may be null.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum DigredStatus digred_reverse(const struct DigredReduction *r,
                                 const struct DigredDigraph *g,
                                 struct DigredStructure **out,
                                 enum DigredShortcut *shortcut);

/**
 * `Ok` if `instance` maps to `template`, `No` if not.
 *
 * # Safety
 * Handles must be live.
 */
enum DigredStatus digred_solve(const struct DigredStructure *instance,
                               const struct DigredStructure *template_);

/**
 * `Ok` if `g` maps to `D(A)`, `No` if not.
 *
 * # Safety
 * Handles must be live.
 */
enum DigredStatus digred_solve_digraph(const struct DigredDigraph *g,
                                       const struct DigredReduction *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIGRED_H */
