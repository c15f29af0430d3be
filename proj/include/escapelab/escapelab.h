#ifndef ESCAPELAB_ESCAPELAB_H
#define ESCAPELAB_ESCAPELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ESCAPELAB_API __declspec(dllexport)
#else
#define ESCAPELAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum el_status {
  EL_OK = 0,
  EL_ERR_VALIDATION = 1,
  EL_ERR_DOMAIN = 2,
  EL_ERR_INVALID_ISOMETRY = 3,
  EL_ERR_SIGNAL = 4,
  EL_ERR_PRECISION = 5,
  EL_ERR_RESOLUTION = 6,
  EL_ERR_REDUCTION = 7,
  EL_ERR_FORMAT = 8,
  EL_ERR_UNKNOWN_COMMAND = 9,
  EL_ERR_ARGUMENT = 10, /* null handle or too small buffer */
  EL_ERR_INTERNAL = 11
} el_status;

typedef enum el_format { EL_FORMAT_CONFIG = -1, EL_FORMAT_CSV = 0, EL_FORMAT_JSON = 1, EL_FORMAT_BOTH = 2 } el_format;

typedef struct el_config el_config;
typedef struct el_record el_record;

typedef struct el_run_options {
  int has_seed;
  uint64_t seed;
  int threads; /* 0: ESCAPELAB_THREADS or 1 */
} el_run_options;

ESCAPELAB_API const char* el_version(void);
ESCAPELAB_API const char* el_status_name(el_status status);
/* Message of the last failure on the calling thread. */
ESCAPELAB_API const char* el_last_error(void);
/* Required point count after EL_ERR_RESOLUTION, else 0. */
ESCAPELAB_API int el_last_required_points(void);
/* Process exit code for a status: 0, 2 (invalid input), 3 (numerical signal), 64, or 1. */
ESCAPELAB_API int el_exit_code(el_status status);

/* Subcommands run by el_run, separated by spaces. */
ESCAPELAB_API const char* el_commands(void);

ESCAPELAB_API el_status el_config_default(el_config** out);
ESCAPELAB_API el_status el_config_load(const char* path, el_config** out);
ESCAPELAB_API el_status el_config_parse(const char* text, const char* base_dir, el_config** out);
/* key is "section.key". */
ESCAPELAB_API el_status el_config_set(el_config* cfg, const char* key, const char* value);
ESCAPELAB_API el_status el_config_get(const el_config* cfg, const char* key, const char** value);
/* Fills buf (NUL terminated); *needed receives the full length including NUL. */
ESCAPELAB_API el_status el_config_canonical(const el_config* cfg, char* buf, size_t len, size_t* needed);
/* 64 hex digits plus NUL. */
ESCAPELAB_API el_status el_config_hash(const el_config* cfg, char* buf, size_t len);
ESCAPELAB_API void el_config_free(el_config* cfg);

ESCAPELAB_API el_status el_run(const char* command, const el_config* cfg, const el_run_options* opts,
                               el_record** out);
/* Writes <dir>/<run_id>.json and/or .csv; EL_FORMAT_CONFIG uses output.format of the run's config. */
ESCAPELAB_API el_status el_record_write(const el_record* rec, const char* dir, el_format format);
ESCAPELAB_API el_status el_record_load(const char* path, el_record** out);
ESCAPELAB_API el_status el_record_load_run(const char* dir, const char* run_id, el_record** out);
ESCAPELAB_API void el_record_free(el_record* rec);

ESCAPELAB_API const char* el_record_run_id(const el_record* rec);
ESCAPELAB_API const char* el_record_command(const el_record* rec);
ESCAPELAB_API const char* el_record_config_hash(const el_record* rec);
ESCAPELAB_API const char* el_record_config(const el_record* rec);
ESCAPELAB_API uint64_t el_record_seed(const el_record* rec);
ESCAPELAB_API size_t el_record_columns(const el_record* rec);
ESCAPELAB_API size_t el_record_rows(const el_record* rec);
ESCAPELAB_API const char* el_record_column_name(const el_record* rec, size_t col);
/* Numeric value of a cell; NaN for text cells or out-of-range indices. */
ESCAPELAB_API double el_record_value(const el_record* rec, size_t row, size_t col);
/* Cell as written to CSV. The pointer stays valid until the next call on this record. */
ESCAPELAB_API const char* el_record_text(const el_record* rec, size_t row, size_t col);
/* Summary entry by key; returns 0 when absent. */
ESCAPELAB_API int el_record_summary(const el_record* rec, const char* key, double* value);
ESCAPELAB_API size_t el_record_warnings(const el_record* rec);
ESCAPELAB_API const char* el_record_warning_code(const el_record* rec, size_t i);
ESCAPELAB_API const char* el_record_warning_message(const el_record* rec, size_t i);
/* Human-readable summary; valid until the record is freed. */
ESCAPELAB_API const char* el_record_describe(const el_record* rec);
ESCAPELAB_API el_status el_record_csv(const el_record* rec, char* buf, size_t len, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif
