#ifndef REFSIM_REFSIM_H_
#define REFSIM_REFSIM_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(REFSIM_BUILDING)
#define REFSIM_API __attribute__((visibility("default")))
#else
#define REFSIM_API
#endif

/* Status codes double as process exit codes for the CLI. */
typedef enum refsim_status {
  REFSIM_OK = 0,
  REFSIM_CONFIG_ERROR = 1,     /* bad config, bad trace, unreadable/unwritable file */
  REFSIM_SIMULATION_ERROR = 2, /* internal assertion: illegal command, geometry violation */
  REFSIM_AUDIT_ERROR = 3,      /* retention audit or timing oracle failed */
  REFSIM_INVALID_ARGUMENT = 4  /* NULL handle or out-of-range index */
} refsim_status;

typedef struct refsim_experiment refsim_experiment;
typedef struct refsim_results refsim_results;

/* Optional per-cell dumps; NULL or "" disables. With several cells each path
   gets a `.policy-density-workload` tag before its extension. */
typedef struct refsim_outputs {
  const char* refresh_log;
  const char* cmd_trace;
  const char* latency_histogram;
} refsim_outputs;

/* Message for the last failure on this thread; never NULL. */
REFSIM_API const char* refsim_last_error(void);

REFSIM_API refsim_status refsim_experiment_new(refsim_experiment** out);
REFSIM_API refsim_status refsim_experiment_load(const char* path, refsim_experiment** out);
REFSIM_API void refsim_experiment_free(refsim_experiment* exp);

/* key is `section.key` or a bare [system] key, exactly as in config files. */
REFSIM_API refsim_status refsim_experiment_set(refsim_experiment* exp, const char* key,
                                               const char* value);

/* Each call adds one workload to the sweep: every core runs `kind`
   ("random" or "stream") with the configured workload parameters. */
REFSIM_API refsim_status refsim_experiment_add_synthetic(refsim_experiment* exp, const char* kind);

/* Adds one workload whose cores cycle over the given trace files. */
REFSIM_API refsim_status refsim_experiment_add_traces(refsim_experiment* exp,
                                                      const char* const* paths, size_t count);

REFSIM_API refsim_status refsim_run(const refsim_experiment* exp, const refsim_outputs* outputs,
                                    refsim_results** out);
REFSIM_API void refsim_results_free(refsim_results* res);

REFSIM_API size_t refsim_results_count(const refsim_results* res);
REFSIM_API refsim_status refsim_results_ws(const refsim_results* res, size_t index, double* ws);

/* path NULL writes to stdout. */
REFSIM_API refsim_status refsim_results_write_csv(const refsim_results* res, const char* path);
REFSIM_API refsim_status refsim_results_write_solo_csv(const refsim_results* res, const char* path);

#ifdef __cplusplus
}
#endif

#endif  // REFSIM_REFSIM_H_
