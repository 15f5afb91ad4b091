#ifndef MEDIATRIX_H
#define MEDIATRIX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum MdxStatus {
  MDX_STATUS_OK = 0,
  /**
   * Null pointer, invalid UTF-8 or out-of-range argument.
   */
  MDX_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed mesh, scene or descriptor text.
   */
  MDX_STATUS_PARSE = 2,
  /**
   * The surface could not be built or fails a precondition.
   */
  MDX_STATUS_SURFACE = 3,
  /**
   * The computation itself failed (separation, resolution, empty set).
   */
  MDX_STATUS_COMPUTATION = 4,
  MDX_STATUS_IO = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  MDX_STATUS_INTERNAL = 6,
} MdxStatus;

/**
 * Opaque triangulated surface.
 */
typedef struct MdxSurface MdxSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library and valid until the next call on this thread.
 */
const char *mdx_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *mdx_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mdx_string_free(char *s);

/**
 * Builds a generated surface by name (`flat_disk`, `sphere`, `flat_torus`,
 * `cone`, `doubled_disk`, `sqrt_horn`, ...) with default parameters and
 * target edge length `h`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum MdxStatus mdx_surface_builtin(const char *name, double h, struct MdxSurface **out);

/**
 * Builds a surface from a JSON descriptor such as
 * `{"generator":"cone","total_angle":4.71,"radius":1}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MdxStatus mdx_surface_from_json(const char *json, double h, struct MdxSurface **out);

/**
 * Parses an OBJ-style indexed face set from memory.
 *
 * # Safety
 * `obj` must be a NUL-terminated string; `out` must be writable.
 */
enum MdxStatus mdx_surface_load_obj(const char *obj, struct MdxSurface **out);

/**
 * # Safety
 * `s` must come from this library and not have been freed. Null is ignored.
 */
void mdx_surface_free(struct MdxSurface *s);

/**
 * Vertex count, or 0 for a null surface.
 *
 * # Safety
 * `s` must be null or a live surface.
 */
size_t mdx_surface_vertex_count(const struct MdxSurface *s);

/**
 * Face count, or 0 for a null surface.
 *
 * # Safety
 * `s` must be null or a live surface.
 */
size_t mdx_surface_face_count(const struct MdxSurface *s);

/**
 * # Safety
 * `s` must be a live surface; `out` must be writable.
 */
enum MdxStatus mdx_surface_euler_characteristic(const struct MdxSurface *s, int64_t *out);

/**
 * Total angle at vertex `v`.
 *
 * # Safety
 * `s` must be a live surface; `out` must be writable.
 */
enum MdxStatus mdx_surface_cone_angle(const struct MdxSurface *s, uint32_t v, double *out);

/**
 * Curvature-bounded-below check: `*pass` is 1 when no interior vertex has
 * total angle above `2π + tol_angle`. `*report` (optional) receives the full
 * report as JSON.
 *
 * # Safety
 * `s` must be a live surface; `pass` must be writable; `report` may be null.
 */
enum MdxStatus mdx_surface_validate(const struct MdxSurface *s,
                                    double tol_angle,
                                    int *pass,
                                    char **report);

/**
 * Runs a scene given as JSON and returns the report JSON. `*pass` (optional)
 * is 1 when every conclusive check passed. Failing checks are not an error.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `report` must be writable;
 * `pass` may be null.
 */
enum MdxStatus mdx_run_scene_json(const char *json, char **report, int *pass);

/**
 * Runs a builtin scene by name; see [`mdx_run_scene_json`].
 *
 * # Safety
 * As for [`mdx_run_scene_json`].
 */
enum MdxStatus mdx_run_builtin_scene(const char *name, char **report, int *pass);

/**
 * Equidistant set of `p` and `q` on `[lo, hi]` under a line metric
 * (`standard`, `bounded_ratio`/`d1`, `truncated`/`d2`), as a JSON array of
 * `{"kind":"point","x":..}` and `{"kind":"interval","lo":..,"hi":..}`.
 *
 * # Safety
 * `metric` must be a NUL-terminated string; `out` must be writable.
 */
enum MdxStatus mdx_line_equidistant(const char *metric,
                                    double p,
                                    double q,
                                    double lo,
                                    double hi,
                                    double resolution,
                                    char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MEDIATRIX_H */
