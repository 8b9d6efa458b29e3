/* ivph: instrumental-variable estimation of proportional hazards models
 * under right censoring, via presmoothing.
 *
 * C interface over the C++ core: opaque handles, integer status codes,
 * a thread-local error message. All functions return IVPH_OK on success.
 */
#ifndef IVPH_H
#define IVPH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ivph_status {
  IVPH_OK = 0,
  IVPH_ERROR_CONFIG = 2,   /* bad configuration value or key */
  IVPH_ERROR_DATA = 3,     /* unreadable/invalid input data */
  IVPH_ERROR_NUMERIC = 4,  /* estimation failure */
  IVPH_ERROR_INTERNAL = 5, /* anything else */
  IVPH_ERROR_ARGUMENT = 6  /* null handle or bad argument */
} ivph_status;

typedef struct ivph_config ivph_config;
typedef struct ivph_dataset ivph_dataset;
typedef struct ivph_result ivph_result;

const char* ivph_version(void);

/* Message for the last failing call on this thread; empty string if none. */
const char* ivph_last_error(void);

/* ----- configuration: flat key=value store with typed validation ----- */
ivph_status ivph_config_create(ivph_config** out);
void ivph_config_free(ivph_config* cfg);
ivph_status ivph_config_set(ivph_config* cfg, const char* key, const char* value);
/* Load key=value lines ('#' comments) from a file. */
ivph_status ivph_config_load_file(ivph_config* cfg, const char* path);

/* ----- datasets ----- */
ivph_status ivph_dataset_read_csv(const char* path, const ivph_config* cfg, ivph_dataset** out);
void ivph_dataset_free(ivph_dataset* data);
ivph_status ivph_dataset_n_rows(const ivph_dataset* data, size_t* out);
ivph_status ivph_dataset_n_levels(const ivph_dataset* data, int* out);

/* ----- runs -----
 * Each run writes <output>.csv and <output>.txt when an output path is
 * configured, and returns a result handle for in-process access. */
ivph_status ivph_estimate(const ivph_dataset* data, const ivph_config* cfg, ivph_result** out);
ivph_status ivph_simulate(const ivph_config* cfg, ivph_result** out);
ivph_status ivph_bootstrap(const ivph_dataset* data, const ivph_config* cfg, ivph_result** out);

/* ----- results ----- */
void ivph_result_free(ivph_result* result);
/* Scalar lookup by dotted key, e.g. "proposed.beta.0", "proposed.sd.1",
 * "naive.beta.0", "proposed.bias.0", "proposed.rmse", "proposed.cp95.0". */
ivph_status ivph_result_get(const ivph_result* result, const char* key, double* out);
/* Number of coefficient components. */
ivph_status ivph_result_dim(const ivph_result* result, size_t* out);
/* Aligned-text rendering of the run report (owned by the result). */
const char* ivph_result_text(const ivph_result* result);

#ifdef __cplusplus
}
#endif

#endif /* IVPH_H */
