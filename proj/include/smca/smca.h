/*
 * smca: simulation and correlation analysis of a two-arm sensorimotor scene.
 *
 * C interface over the C++ core. Every object is an opaque handle released
 * with its matching *_free function (NULL is accepted). Functions return an
 * smca_status; on failure smca_last_error() describes the problem for the
 * calling thread.
 */
#ifndef SMCA_SMCA_H
#define SMCA_SMCA_H

#include <stddef.h>
#include <stdint.h>

#if defined(SMCA_BUILDING_LIBRARY)
#define SMCA_API __attribute__((visibility("default")))
#else
#define SMCA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum smca_status {
  SMCA_OK = 0,
  SMCA_ERR_USAGE = 1,
  SMCA_ERR_VALIDATION = 2,
  SMCA_ERR_DATA = 3,
  SMCA_ERR_INTERNAL = 4
} smca_status;

/* Refines SMCA_ERR_DATA. */
typedef enum smca_data_error {
  SMCA_DATA_NONE = 0,
  SMCA_DATA_IO,
  SMCA_DATA_HEADER,
  SMCA_DATA_COLUMN_COUNT,
  SMCA_DATA_PARSE,
  SMCA_DATA_CHECKSUM,
  SMCA_DATA_TOO_SHORT,
  SMCA_DATA_GAP,
  SMCA_DATA_MISSING_CELLS,
  SMCA_DATA_UNKNOWN_PANEL
} smca_data_error;

typedef enum smca_label {
  SMCA_LABEL_SELF = 0,
  SMCA_LABEL_OTHER_ACTIVE = 1,
  SMCA_LABEL_PASSIVE = 2
} smca_label;

#define SMCA_POINT_COUNT 7
#define SMCA_MOTOR_COUNT 6

SMCA_API const char* smca_version(void);
SMCA_API const char* smca_last_error(void);
SMCA_API smca_data_error smca_last_data_error(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct smca_config smca_config;

SMCA_API smca_status smca_config_default(smca_config** out);
/* `path` may be "default" for the built-in configuration. */
SMCA_API smca_status smca_config_load(const char* path, smca_config** out);
SMCA_API smca_status smca_config_parse(const char* yaml_text, smca_config** out);
/* Writes the 16-hex-digit fingerprint plus NUL; needs len >= 17. */
SMCA_API smca_status smca_config_hash(const smca_config* config, char* buf, size_t len);
SMCA_API void smca_config_free(smca_config* config);

/* ---- world simulation --------------------------------------------------- */

typedef struct smca_world smca_world;

typedef struct smca_observation {
  double x[SMCA_POINT_COUNT];
  double y[SMCA_POINT_COUNT];
  double h[SMCA_POINT_COUNT];
  int object_visible;
} smca_observation;

typedef struct smca_contact {
  int64_t step;
  int sensory_point;
  int target_point; /* 6 = object */
  double impulse;
} smca_contact;

SMCA_API smca_status smca_world_create(const smca_config* config, uint64_t seed, smca_world** out);
/* commands: m0..m5 (bottom agent then top agent), rad/s. `contacts` may be
 * NULL; otherwise up to `capacity` events are copied and `count` receives
 * the total number of events of the step. */
SMCA_API smca_status smca_world_step(smca_world* world, const double commands[SMCA_MOTOR_COUNT],
                                     smca_contact* contacts, size_t capacity, size_t* count);
SMCA_API smca_status smca_world_observe(const smca_world* world, smca_observation* out);
SMCA_API smca_status smca_world_set_object(smca_world* world, double x, double vx);
SMCA_API smca_status smca_world_get_object(const smca_world* world, double* x, double* vx);
SMCA_API smca_status smca_world_set_angles(smca_world* world, const double angles[SMCA_MOTOR_COUNT]);
SMCA_API void smca_world_free(smca_world* world);

/* ---- traces ------------------------------------------------------------- */

typedef struct smca_trace smca_trace;

SMCA_API smca_status smca_simulate(const smca_config* config, uint64_t seed, int64_t steps, smca_trace** out);
SMCA_API smca_status smca_trace_read(const char* path, smca_trace** out);
SMCA_API smca_status smca_trace_write(const smca_trace* trace, const char* path);
SMCA_API size_t smca_trace_rows(const smca_trace* trace);
SMCA_API void smca_trace_free(smca_trace* trace);

/* ---- correlation panels ------------------------------------------------- */

typedef struct smca_panels smca_panels;

SMCA_API smca_status smca_analyze(const smca_trace* trace, smca_panels** out);
SMCA_API smca_status smca_panels_read(const char* dir, smca_panels** out);
SMCA_API smca_status smca_panels_write(const smca_panels* panels, const char* dir);
/* tag is one of 'A', 'B', 'C', 'D'. */
SMCA_API smca_status smca_panel_shape(const smca_panels* panels, char tag, size_t* rows, size_t* cols);
SMCA_API smca_status smca_panel_cell(const smca_panels* panels, char tag, size_t row, size_t col, double* value,
                                     int* defined, size_t* n_effective);
SMCA_API void smca_panels_free(smca_panels* panels);

/* ---- agency analysis ---------------------------------------------------- */

typedef struct smca_agency_params {
  int perspective; /* 0 bottom agent, 1 top agent */
  double cluster_threshold;
  double control_threshold;
  int lag_window;
  double motion_epsilon;
  double autonomy_threshold;
} smca_agency_params;

typedef struct smca_report smca_report;

SMCA_API void smca_agency_params_default(smca_agency_params* params);
SMCA_API smca_status smca_segment(const smca_panels* panels, const smca_trace* trace,
                                  const smca_agency_params* params, smca_report** out);
SMCA_API size_t smca_report_cluster_count(const smca_report* report);
/* points must hold SMCA_POINT_COUNT ints. */
SMCA_API smca_status smca_report_cluster(const smca_report* report, size_t index, int* points, size_t* npoints,
                                         smca_label* label);
/* Owned by the report. */
SMCA_API const char* smca_report_json(const smca_report* report);
SMCA_API void smca_report_free(smca_report* report);

/* ---- pipeline stages ---------------------------------------------------- */

typedef struct smca_simulate_request {
  const char* config; /* path or "default" */
  uint64_t seed;
  int64_t steps;
  const char* out_dir;
  int force;
} smca_simulate_request;

SMCA_API smca_status smca_cmd_simulate(const smca_simulate_request* request);
SMCA_API smca_status smca_cmd_analyze(const char* log_path, const char* out_dir);
/* out_path may be NULL for <panels_dir>/agency_report.json. */
SMCA_API smca_status smca_cmd_segment(const char* panels_dir, const char* log_path, const smca_agency_params* params,
                                      const char* out_path);
/* SMCA_ERR_DATA when a listed output is missing or its hash differs. */
SMCA_API smca_status smca_manifest_verify(const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* SMCA_SMCA_H */
