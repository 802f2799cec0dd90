#ifndef PAVECRACK_H
#define PAVECRACK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  PC_STATUS_INVALID_ARGUMENT = 2,
  PC_STATUS_IO = 3,
  PC_STATUS_FORMAT = 4,
  PC_STATUS_DIMENSION_MISMATCH = 5,
  PC_STATUS_INVALID_PARAMETER = 6,
  PC_STATUS_CONFIG = 7,
  PC_STATUS_EMPTY_SET = 8,
  PC_STATUS_PANIC = 9,
} PcStatus;

/**
 * Pipeline parameters.
 */
typedef struct PcConfig PcConfig;

/**
 * Grayscale image with intensities in `[0, 1]`.
 */
typedef struct PcImage PcImage;

/**
 * Binary crack mask.
 */
typedef struct PcMask PcMask;

/**
 * Scores of a detected mask against a reference mask.
 */
typedef struct PcEvalReport {
  /**
   * Directed Hausdorff distance from detected to reference.
   */
  double h_ab;
  /**
   * Directed Hausdorff distance from reference to detected.
   */
  double h_ba;
  double hausdorff;
  /**
   * Buffered-match similarity in `[0, 100]`.
   */
  double sm;
  double tau;
  size_t detected_count;
  size_t reference_count;
} PcEvalReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * Valid until the next pavecrack call on the same thread.
 */
const char *pc_last_error_message(void);

/**
 * Loads a P2/P5 PGM file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum PcStatus pc_image_load_pgm(const char *path, struct PcImage **out);

/**
 * Builds an image from `width * height` row-major 8-bit levels.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` be a valid pointer.
 */
enum PcStatus pc_image_from_u8(size_t width,
                               size_t height,
                               const uint8_t *data,
                               size_t len,
                               struct PcImage **out);

/**
 * # Safety
 * `image` must be null or a handle from this library not yet freed.
 */
void pc_image_free(struct PcImage *image);

/**
 * # Safety
 * `image` must be null or a live handle.
 */
size_t pc_image_width(const struct PcImage *image);

/**
 * # Safety
 * `image` must be null or a live handle.
 */
size_t pc_image_height(const struct PcImage *image);

/**
 * Loads a PGM as a mask; nonzero pixels are foreground.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum PcStatus pc_mask_load_pgm(const char *path, struct PcMask **out);

/**
 * Writes the mask as a binary PGM with foreground 255.
 *
 * # Safety
 * `mask` must be a live handle and `path` a nul-terminated string.
 */
enum PcStatus pc_mask_save_pgm(const struct PcMask *mask, const char *path);

/**
 * # Safety
 * `mask` must be null or a live handle.
 */
size_t pc_mask_width(const struct PcMask *mask);

/**
 * # Safety
 * `mask` must be null or a live handle.
 */
size_t pc_mask_height(const struct PcMask *mask);

/**
 * Number of foreground pixels.
 *
 * # Safety
 * `mask` must be null or a live handle.
 */
size_t pc_mask_count(const struct PcMask *mask);

/**
 * Copies the mask row-major into `buf` as 0/1 bytes.
 *
 * # Safety
 * `mask` must be a live handle and `buf` point to `len` writable bytes.
 */
enum PcStatus pc_mask_copy_bits(const struct PcMask *mask, uint8_t *buf, size_t len);

/**
 * # Safety
 * `mask` must be null or a handle from this library not yet freed.
 */
void pc_mask_free(struct PcMask *mask);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum PcStatus pc_config_default(struct PcConfig **out);

/**
 * Loads a TOML configuration file; missing keys take their defaults.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum PcStatus pc_config_load(const char *path, struct PcConfig **out);

/**
 * Parses a TOML configuration from a string.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum PcStatus pc_config_from_toml(const char *text, struct PcConfig **out);

/**
 * # Safety
 * `config` must be null or a handle from this library not yet freed.
 */
void pc_config_free(struct PcConfig *config);

/**
 * Runs the full detection pipeline. A null `config` uses the defaults.
 *
 * # Safety
 * `image` must be a live handle, `config` null or a live handle, and `out`
 * a valid pointer.
 */
enum PcStatus pc_detect(const struct PcImage *image,
                        const struct PcConfig *config,
                        struct PcMask **out);

/**
 * Scores `detected` against `reference` with search radius `tau`.
 *
 * # Safety
 * Both masks must be live handles and `out` a valid pointer.
 */
enum PcStatus pc_evaluate(const struct PcMask *detected,
                          const struct PcMask *reference,
                          double tau,
                          struct PcEvalReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAVECRACK_H */
