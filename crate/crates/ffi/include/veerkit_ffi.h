#ifndef VEERKIT_FFI_H
#define VEERKIT_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VkColour {
  VK_COLOUR_RED = 0,
  VK_COLOUR_BLUE = 1,
} VkColour;

/**
 * Status codes. The values 0 to 4 agree with the exit codes of the `veerkit`
 * command line tool.
 */
typedef enum VkStatus {
  VK_STATUS_OK = 0,
  VK_STATUS_CHECK_FAILED = 1,
  VK_STATUS_PARSE_ERROR = 2,
  VK_STATUS_DEPTH_EXHAUSTED = 3,
  VK_STATUS_INSUFFICIENT_CONTINENT = 4,
  VK_STATUS_NULL_POINTER = 5,
  VK_STATUS_INVALID_UTF8 = 6,
  VK_STATUS_OUT_OF_RANGE = 7,
  VK_STATUS_PANIC = 8,
} VkStatus;

/**
 * A circular-order oracle over a growing continent.
 */
typedef struct VkOrder VkOrder;

/**
 * A veering triangulation.
 */
typedef struct VkVeering VkVeering;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *vk_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void vk_string_free(char *s);

/**
 * Parses a taut signature and runs the structure checks.
 *
 * # Safety
 * `sig` must be a nul-terminated string and `out` a valid pointer.
 */
enum VkStatus vk_veering_from_sig(const char *sig, struct VkVeering **out);

/**
 * # Safety
 * `v` must be null or a handle from `vk_veering_from_sig`.
 */
void vk_veering_free(struct VkVeering *v);

/**
 * # Safety
 * `v` must be a valid handle.
 */
uintptr_t vk_veering_tet_count(const struct VkVeering *v);

/**
 * # Safety
 * `v` must be a valid handle.
 */
uintptr_t vk_veering_edge_count(const struct VkVeering *v);

/**
 * # Safety
 * `v` must be a valid handle and `out` a valid pointer.
 */
enum VkStatus vk_veering_edge_colour(const struct VkVeering *v, uintptr_t edge, enum VkColour *out);

/**
 * JSON check report for a signature. Returns `CheckFailed` with the report
 * still written when a structure check fails.
 *
 * # Safety
 * `sig` must be a nul-terminated string and `out` a valid pointer.
 */
enum VkStatus vk_check_json(const char *sig, char **out);

/**
 * Rebuilds the triangulation from link-space rectangles and writes the
 * result as JSON. A negative `radius` grows the ball until it suffices.
 *
 * # Safety
 * `v` must be a valid handle and `out` a valid pointer.
 */
enum VkStatus vk_roundtrip_json(const struct VkVeering *v,
                                int32_t radius,
                                uintptr_t max_depth,
                                char **out);

/**
 * # Safety
 * `v` must be a valid handle and `out` a valid pointer.
 */
enum VkStatus vk_order_new(const struct VkVeering *v, uintptr_t max_depth, struct VkOrder **out);

/**
 * # Safety
 * `o` must be null or a handle from `vk_order_new`.
 */
void vk_order_free(struct VkOrder *o);

/**
 * Circular order of three cusps given by path names `t<k>.v<j>[/g<f>...]`.
 *
 * # Safety
 * `o` must be a valid handle, the names nul-terminated strings and `out` a
 * valid pointer.
 */
enum VkStatus vk_order_triple(struct VkOrder *o,
                              const char *a,
                              const char *b,
                              const char *c,
                              int8_t *out);

/**
 * Lifted tetrahedra developed so far by an order oracle.
 *
 * # Safety
 * `o` must be a valid handle.
 */
uintptr_t vk_order_witness_size(const struct VkOrder *o);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VEERKIT_FFI_H */
