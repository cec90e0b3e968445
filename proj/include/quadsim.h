/* SPDX-License-Identifier: Apache-2.0
 *
 * quadsim — deterministic quadtree-coded image compression and analog
 * transmission simulator. C API of the shared library.
 *
 * Conventions:
 *   - every function returns a qs_status; QS_OK is 0
 *   - handles are opaque; destroy what you create
 *   - strings returned through char** are owned by the caller and must be
 *     released with qs_string_free()
 *   - on failure, qs_context_last_error() (or qs_last_error() for the
 *     handle-free calls) returns a human-readable message valid until the
 *     next call on the same context/thread
 */

#ifndef QUADSIM_H
#define QUADSIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define QUADSIM_API __declspec(dllexport)
#else
#define QUADSIM_API __attribute__((visibility("default")))
#endif

typedef enum qs_status {
  QS_OK = 0,
  QS_ERROR_INVALID_ARGUMENT = 1,
  QS_ERROR_IO = 2,
  QS_ERROR_FORMAT = 3,
  QS_ERROR_RUNTIME = 4
} qs_status;

/* Owns a validated system configuration. */
typedef struct qs_context qs_context;

QUADSIM_API const char* qs_version(void);

/* config_json may be NULL (defaults) or a JSON object mirroring the config
 * file format; unknown keys are rejected. */
QUADSIM_API qs_status qs_context_create(const char* config_json, qs_context** out);
QUADSIM_API qs_status qs_context_create_from_file(const char* path, qs_context** out);
QUADSIM_API void qs_context_destroy(qs_context* ctx);

QUADSIM_API const char* qs_context_last_error(const qs_context* ctx);
QUADSIM_API const char* qs_last_error(void); /* thread-local, handle-free calls */

/* Resolved configuration as JSON. */
QUADSIM_API qs_status qs_context_config_json(qs_context* ctx, char** out_json);

/* Source coding: PPM/PGM in, QLIC stream out, and back. */
QUADSIM_API qs_status qs_lic_encode_file(qs_context* ctx, const char* image_path,
                                         const char* stream_path);
QUADSIM_API qs_status qs_lic_decode_file(qs_context* ctx, const char* stream_path,
                                         const char* image_path);

/* Batch runner. job_json selects the mode:
 *   {"mode":"lic",     "images":["a.ppm",...], "dump_dir":"..."?}
 *   {"mode":"deepsc",  "images":[...], "channel":{"variant":"rayleigh",...},
 *    "snr_db":10, "nmse_db":-20 | "perfect_csi":true, "dump_dir":...?}
 *   {"mode":"baseline","images":[...], "snr_db":10}
 *   {"mode":"sweep",   "images":[...], "axis":"eta|snr|delta|channel",
 *    "values":[...], ...deepsc keys}
 * The report JSON is returned through out_report_json. */
QUADSIM_API qs_status qs_run_job(qs_context* ctx, const char* job_json,
                                 char** out_report_json);

/* BD metric between two RD curves, each a JSON array of {"rate":r,
 * "quality":q} objects (or a sweep report, whose points are used). */
QUADSIM_API qs_status qs_bd_metric_json(const char* curve_a_json,
                                        const char* curve_b_json, double* out_percent);

QUADSIM_API void qs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* QUADSIM_H */
