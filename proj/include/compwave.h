/* C interface to the composite-wave laboratory.
 *
 * All functions return cw_status; on failure cw_last_error() holds a
 * human-readable message (thread-local).  Strings returned through output
 * parameters are heap-allocated and must be released with cw_free().
 */
#ifndef COMPWAVE_H
#define COMPWAVE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    CW_OK = 0,
    CW_ERR_INVALID_ARGUMENT = 1,
    CW_ERR_PARSE = 2,
    CW_ERR_VALIDATION = 3,
    CW_ERR_RUNTIME = 4,
    CW_ERR_IO = 5
} cw_status;

const char* cw_version(void);
const char* cw_last_error(void);
void cw_free(char* ptr);

/* Run configuration (opaque). */
typedef struct cw_config cw_config;

cw_status cw_config_default(cw_config** out);
cw_status cw_config_parse(const char* json_text, cw_config** out);
cw_status cw_config_load(const char* path, cw_config** out);
/* dotted_key like "channel.t_end"; json_value parsed as JSON, bare words
 * become strings. */
cw_status cw_config_override(cw_config* cfg, const char* dotted_key, const char* json_value);
cw_status cw_config_canonical_json(const cw_config* cfg, char** out_json);
void cw_config_free(cw_config* cfg);

/* Planar wave profile evaluators (opaque). */
typedef struct cw_profiles cw_profiles;

typedef struct {
    double u_r;    /* smooth fan profile */
    double du_r;   /* d/dx1 */
    double u_c;    /* diffusion-wave profile */
    double du_c;
    double u_hat;  /* superposition */
    double du_hat;
    double eta;    /* normalized weight in [0, 1] */
} cw_profile_sample;

cw_status cw_profiles_create(const cw_config* cfg, cw_profiles** out);
cw_status cw_profiles_eval(const cw_profiles* p, double x1, double t, cw_profile_sample* out);
/* Root of u_hat(., t); fails when the bracket holds no sign change. */
cw_status cw_profiles_interface(const cw_profiles* p, double t, double* x_out);
void cw_profiles_free(cw_profiles* p);

/* Executes a pipeline stage ("profiles", "cell", "ansatz", "simulate",
 * "analyze" or "verify-all") with everything it depends on, writing the
 * artifacts and manifest under out_dir.  manifest_json (optional) receives
 * the manifest; all_passed (optional) is 1 unless an acceptance check
 * failed. */
cw_status cw_run_stage(const cw_config* cfg, const char* stage, const char* out_dir,
                       char** manifest_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* COMPWAVE_H */
