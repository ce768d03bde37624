/* voikit — value-of-information scheduling and control toolkit.
 *
 * C interface to the simulation and computation core. All entry points
 * return a status code from the voikit_status enum; on failure a
 * human-readable message is available from voikit_last_error() (the
 * message is thread-local and valid until the next failing call on the
 * same thread). Objects are exposed as opaque handles and must be
 * released with their matching _free/_close function. Strings returned
 * through char** out-parameters are heap-allocated and must be released
 * with voikit_string_free().
 */

#ifndef VOIKIT_H
#define VOIKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VOIKIT_API __declspec(dllexport)
#else
#define VOIKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum voikit_status {
  VOIKIT_OK = 0,
  VOIKIT_ERR_IO = 2,       /* unreadable or unparsable config / file */
  VOIKIT_ERR_INVALID = 3,  /* model/cost invariant violations, bad policy */
  VOIKIT_ERR_ARG = 4,      /* null handle, stage out of range, size mismatch */
  VOIKIT_ERR_INTERNAL = 5, /* numerical failure or unexpected condition */
} voikit_status;

/* Parsed experiment configuration (model, costs, policies, grid,
 * quadrature, seeds). Parsing checks shape and types only; semantic
 * validation happens in voikit_validate / voikit_session_open. */
typedef struct voikit_config voikit_config;

/* A validated experiment: model and costs (symmetrized where needed),
 * Riccati solution, encoder covariance schedule, and lazily built
 * value-of-information table. */
typedef struct voikit_session voikit_session;

/* Sampled value-of-information table on a symmetric mismatch grid. */
typedef struct voikit_voi_table voikit_voi_table;

VOIKIT_API const char* voikit_version(void);

/* Thread-local message describing the most recent failure on this
 * thread. Never NULL; empty string when no failure has occurred. */
VOIKIT_API const char* voikit_last_error(void);

VOIKIT_API void voikit_string_free(char* s);

/* --- configuration ------------------------------------------------- */

VOIKIT_API voikit_status voikit_config_load(const char* path,
                                            voikit_config** out);
VOIKIT_API voikit_status voikit_config_parse(const char* json_text,
                                             voikit_config** out);
VOIKIT_API void voikit_config_free(voikit_config* cfg);

/* Configuration with all defaults resolved, serialized as JSON.
 * Re-parsing this document reproduces the experiment bit-exactly. */
VOIKIT_API voikit_status voikit_config_resolved_json(const voikit_config* cfg,
                                                     char** out);

/* Validates model and cost invariants. *report_json receives a JSON
 * document with the list of violations (empty list when valid).
 * Returns VOIKIT_OK when valid, VOIKIT_ERR_INVALID otherwise. */
VOIKIT_API voikit_status voikit_validate(const voikit_config* cfg,
                                         char** report_json);

/* --- session ------------------------------------------------------- */

VOIKIT_API voikit_status voikit_session_open(const voikit_config* cfg,
                                             voikit_session** out);
VOIKIT_API void voikit_session_close(voikit_session* s);

/* Backward Riccati pass results: S(k), L(k), Gamma(k), theta(k). */
VOIKIT_API voikit_status voikit_riccati_csv(const voikit_session* s,
                                            char** out);
VOIKIT_API voikit_status voikit_riccati_json(const voikit_session* s,
                                             char** out);

/* --- value of information ------------------------------------------ */

VOIKIT_API voikit_status voikit_voi_table_build(const voikit_session* s,
                                                voikit_voi_table** out);
VOIKIT_API void voikit_voi_table_free(voikit_voi_table* t);

/* Interpolated VoI_k(e); exact at grid nodes, clamped outside. */
VOIKIT_API voikit_status voikit_voi_table_lookup(const voikit_voi_table* t,
                                                 int stage, const double* e,
                                                 size_t n, double* out);
VOIKIT_API voikit_status voikit_voi_table_csv(const voikit_voi_table* t,
                                              char** out);
VOIKIT_API voikit_status voikit_voi_table_meta_json(const voikit_voi_table* t,
                                                    char** out);

/* Closed-form quadratic approximation VoI+_k(e). */
VOIKIT_API voikit_status voikit_voi_quadratic(const voikit_session* s,
                                              int stage, const double* e,
                                              size_t n, double* out);

/* --- experiments ---------------------------------------------------- */

/* Single closed-loop rollout under the config's scheduler/controller.
 * The trace CSV has one row per decision stage 0..N plus a terminal row
 * holding the final state. verbose != 0 appends estimator diagnostics. */
VOIKIT_API voikit_status voikit_simulate_csv(const voikit_session* s,
                                             uint64_t seed, int verbose,
                                             char** trace_csv);

/* Monte Carlo comparison of the config's policy list under common
 * random numbers; per-policy statistics and all pairwise paired
 * differences as JSON. seed_count <= 0 uses the config's seed count. */
VOIKIT_API voikit_status voikit_compare_json(const voikit_session* s,
                                             int seed_count,
                                             char** summary_json);

/* Rate-regulation tradeoff sweep: one CSV row per lambda with mean and
 * standard error of R, J and Phi under the config's scheduler. */
VOIKIT_API voikit_status voikit_sweep_csv(const voikit_config* cfg,
                                          const double* lambdas, size_t count,
                                          int seed_count, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* VOIKIT_H */
