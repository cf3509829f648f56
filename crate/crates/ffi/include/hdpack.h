#ifndef HDPACK_H
#define HDPACK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Boundary normalization of a packing.
typedef enum HdpMode {
  // Horocyclic boundary circles filling the unit disc.
  HDP_MODE_DISC = 0,
  // Equal boundary radii, scaled into the unit disc.
  HDP_MODE_UNIFORM = 1,
} HdpMode;

typedef enum HdpStatus {
  HDP_STATUS_OK = 0,
  HDP_STATUS_NULL_POINTER = 1,
  HDP_STATUS_INVALID_ARGUMENT = 2,
  HDP_STATUS_NO_CONVERGENCE = 3,
  HDP_STATUS_IO = 4,
  HDP_STATUS_PANIC = 5,
} HdpStatus;

// A planar map.
typedef struct HdpMap HdpMap;

// A truncation of a map together with its double circle packing.
typedef struct HdpPacking HdpPacking;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Length in bytes of the last error message on this thread, excluding the
// terminating nul.
size_t hdp_last_error_length(void);

// Copies the last error message on this thread into `buf` as a
// nul-terminated string, truncated to `cap - 1` bytes. Returns the number
// of bytes written, excluding the nul.
//
// # Safety
// `buf` must be null or point to `cap` writable bytes.
size_t hdp_last_error_message(char *buf, size_t cap);

// Builds `layers` layers of the `{p, q}` tiling around a vertex.
//
// # Safety
// `out` must be null or writable.
enum HdpStatus hdp_map_tiling(size_t p, size_t q, size_t layers, struct HdpMap **out);

// Square-lattice patch with its outer face marked.
//
// # Safety
// `out` must be null or writable.
enum HdpStatus hdp_map_grid(size_t cols, size_t rows, struct HdpMap **out);

// Parses a map from its JSON rotation-system form.
//
// # Safety
// `json` must be null or a nul-terminated string; `out` must be null or
// writable.
enum HdpStatus hdp_map_from_json(const char *json, struct HdpMap **out);

// # Safety
// `map` must be null or a live map handle.
enum HdpStatus hdp_map_vertex_count(const struct HdpMap *map, size_t *out);

// Whether the map is simple and 3-connected.
//
// # Safety
// `map` must be null or a live map handle; `out` must be null or writable.
enum HdpStatus hdp_map_is_polyhedral(const struct HdpMap *map, bool *out);

// # Safety
// `map` must be null or a handle not yet freed.
void hdp_map_free(struct HdpMap *map);

// Packs the ball of `radius` around `root`, or everything inside the
// marked outer face when `radius` is 0.
//
// # Safety
// `map` must be null or a live map handle; `out` must be null or writable.
enum HdpStatus hdp_pack(const struct HdpMap *map,
                        size_t root,
                        size_t radius,
                        enum HdpMode mode,
                        double tol,
                        struct HdpPacking **out);

// # Safety
// `packing` must be null or a live packing handle; `out` must be null or
// writable.
enum HdpStatus hdp_packing_vertex_count(const struct HdpPacking *packing, size_t *out);

// Center and radius of the circle of truncation vertex `v`.
//
// # Safety
// `packing` must be null or a live packing handle; `x`, `y` and `r` must
// be null or writable.
enum HdpStatus hdp_packing_vertex_circle(const struct HdpPacking *packing,
                                         size_t v,
                                         double *x,
                                         double *y,
                                         double *r);

// Largest dyadic `δ` for which the shrunken discs separate.
//
// # Safety
// `packing` must be null or a live packing handle; `out` must be null or
// writable.
enum HdpStatus hdp_packing_delta0(const struct HdpPacking *packing, double *out);

// Writes the SVG drawing of the packing to `path`.
//
// # Safety
// `packing` must be null or a live packing handle; `path` must be null or
// a nul-terminated string.
enum HdpStatus hdp_packing_write_svg(const struct HdpPacking *packing, const char *path);

// Capacity of a set of truncation vertices.
//
// # Safety
// `packing` must be null or a live packing handle; `set` must point to
// `len` indices (or be null with `len` 0); `out` must be null or writable.
enum HdpStatus hdp_capacity(const struct HdpPacking *packing,
                            const size_t *set,
                            size_t len,
                            double *out);

// Douglas integral of the periodic function sampled at `n` equally spaced
// angles starting from 0, evaluated with `n_theta` nodes.
//
// # Safety
// `samples` must point to `n` values; `out` must be null or writable.
enum HdpStatus hdp_douglas_energy(const double *samples, size_t n, size_t n_theta, double *out);

// # Safety
// `packing` must be null or a handle not yet freed.
void hdp_packing_free(struct HdpPacking *packing);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HDPACK_H */
