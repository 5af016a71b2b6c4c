#ifndef DOMINO_CYL_H
#define DOMINO_CYL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which floor cocycle a transfer system uses.
 */
typedef enum DcCocycle {
  DC_COCYCLE_KERNEL = 0,
  DC_COCYCLE_CONNECTOR = 1,
} DcCocycle;

/**
 * Result codes. The first four agree with the command-line exit codes.
 */
typedef enum DcStatus {
  DC_STATUS_OK = 0,
  DC_STATUS_INVALID_INPUT = 1,
  DC_STATUS_RESOURCE_BOUND = 2,
  DC_STATUS_INTERNAL = 3,
  DC_STATUS_NULL_POINTER = 4,
  DC_STATUS_PANIC = 5,
} DcStatus;

/**
 * A quadriculated disk.
 */
typedef struct DcDisk DcDisk;

/**
 * A transfer system (plugs, floors and the twist cocycle) over a disk.
 */
typedef struct DcSystem DcSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dc_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library, not yet freed.
 */
void dc_string_free(char *s);

/**
 * Parses an ASCII disk (`#` cell, `.` hole, one row per line).
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be writable.
 */
enum DcStatus dc_disk_parse(const char *text, struct DcDisk **out);

/**
 * The `width × height` rectangle.
 *
 * # Safety
 * `out` must be writable.
 */
enum DcStatus dc_disk_rectangle(int64_t width, int64_t height, struct DcDisk **out);

/**
 * # Safety
 * `disk` must be null or a live handle from this library.
 */
void dc_disk_free(struct DcDisk *disk);

/**
 * Number of cells, or 0 for a null handle.
 *
 * # Safety
 * `disk` must be null or a live handle.
 */
size_t dc_disk_cells(const struct DcDisk *disk);

/**
 * Builds the transfer system of `disk` with the reference kernel along `+e1`.
 * `plug_bound` caps the number of plugs (0 selects the default).
 *
 * # Safety
 * `disk` must be a live handle; `out` must be writable.
 */
enum DcStatus dc_system_new(const struct DcDisk *disk,
                            enum DcCocycle cocycle,
                            size_t plug_bound,
                            struct DcSystem **out);

/**
 * # Safety
 * `sys` must be null or a live handle from this library.
 */
void dc_system_free(struct DcSystem *sys);

/**
 * Number of plugs, or 0 for a null handle.
 *
 * # Safety
 * `sys` must be null or a live handle.
 */
size_t dc_system_plugs(const struct DcSystem *sys);

/**
 * Number of tilings of height `n`, as a decimal string.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum DcStatus dc_count(const struct DcSystem *sys, size_t n, char **out);

/**
 * `P_n` as JSON `{"<exponent>": "<decimal>"}`.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum DcStatus dc_twist_polynomial(const struct DcSystem *sys, size_t n, char **out);

/**
 * Spectral report as JSON (`lambda1`, `gap`, `sigma2`, `C0`, `C1`, `etaCurve`).
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum DcStatus dc_spectral_report(const struct DcSystem *sys, size_t grid, char **out);

/**
 * Twist of the uniform sample number `index` of height `n` under `seed`.
 *
 * # Safety
 * `sys` must be a live handle; `twist` must be writable.
 */
enum DcStatus dc_sample_twist(const struct DcSystem *sys,
                              size_t n,
                              uint64_t seed,
                              uint64_t index,
                              int64_t *twist);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DOMINO_CYL_H */
