#include "compwave.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "ansatz.hpp"
#include "config.hpp"
#include "pipeline.hpp"
#include "profiles.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

cw_status set_error(cw_status st, const std::string& msg) {
    g_last_error = msg;
    return st;
}

std::string join_errors(const std::vector<compwave::ConfigError>& errs) {
    std::string msg;
    for (const auto& e : errs) {
        if (!msg.empty()) msg += "; ";
        msg += e.path.empty() ? e.message : e.path + ": " + e.message;
    }
    return msg;
}

}  // namespace

struct cw_config {
    compwave::RunConfig cfg;
};

struct cw_profiles {
    compwave::ProfileSet set;
};

extern "C" {

const char* cw_version(void) { return "0.1.0"; }

const char* cw_last_error(void) { return g_last_error.c_str(); }

void cw_free(char* ptr) { std::free(ptr); }

cw_status cw_config_default(cw_config** out) {
    if (!out) return set_error(CW_ERR_INVALID_ARGUMENT, "null output pointer");
    *out = new cw_config{compwave::default_config()};
    return CW_OK;
}

cw_status cw_config_parse(const char* json_text, cw_config** out) {
    if (!json_text || !out) return set_error(CW_ERR_INVALID_ARGUMENT, "null argument");
    compwave::ParseResult r = compwave::parse_config(json_text);
    if (!r.ok) return set_error(CW_ERR_VALIDATION, join_errors(r.errors));
    *out = new cw_config{r.config};
    return CW_OK;
}

cw_status cw_config_load(const char* path, cw_config** out) {
    if (!path || !out) return set_error(CW_ERR_INVALID_ARGUMENT, "null argument");
    compwave::ParseResult r = compwave::load_config(path);
    if (!r.ok) return set_error(CW_ERR_VALIDATION, join_errors(r.errors));
    *out = new cw_config{r.config};
    return CW_OK;
}

cw_status cw_config_override(cw_config* cfg, const char* dotted_key, const char* json_value) {
    if (!cfg || !dotted_key || !json_value)
        return set_error(CW_ERR_INVALID_ARGUMENT, "null argument");
    compwave::ParseResult r = compwave::override_config(cfg->cfg, dotted_key, json_value);
    if (!r.ok) return set_error(CW_ERR_VALIDATION, join_errors(r.errors));
    cfg->cfg = r.config;
    return CW_OK;
}

cw_status cw_config_canonical_json(const cw_config* cfg, char** out_json) {
    if (!cfg || !out_json) return set_error(CW_ERR_INVALID_ARGUMENT, "null argument");
    *out_json = dup_string(compwave::canonical_json(cfg->cfg));
    return *out_json ? CW_OK : set_error(CW_ERR_RUNTIME, "allocation failed");
}

void cw_config_free(cw_config* cfg) { delete cfg; }

cw_status cw_profiles_create(const cw_config* cfg, cw_profiles** out) {
    if (!cfg || !out) return set_error(CW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        *out = new cw_profiles{
            compwave::ProfileSet(cfg->cfg.endpoints, cfg->cfg.flux(), cfg->cfg.diffusion[0])};
        return CW_OK;
    } catch (const std::exception& e) {
        return set_error(CW_ERR_VALIDATION, e.what());
    }
}

cw_status cw_profiles_eval(const cw_profiles* p, double x1, double t, cw_profile_sample* out) {
    if (!p || !out) return set_error(CW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const compwave::ProfileValue r = p->set.rarefaction(x1, t);
        const compwave::ProfileValue c = p->set.contact(x1, t);
        out->u_r = r.u;
        out->du_r = r.du;
        out->u_c = c.u;
        out->du_c = c.du;
        out->u_hat = r.u + c.u;
        out->du_hat = r.du + c.du;
        out->eta = compwave::eta_weight(x1, t, p->set);
        return CW_OK;
    } catch (const std::exception& e) {
        return set_error(CW_ERR_INVALID_ARGUMENT, e.what());
    }
}

cw_status cw_profiles_interface(const cw_profiles* p, double t, double* x_out) {
    if (!p || !x_out) return set_error(CW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const compwave::InterfaceCurve c = compwave::interface_curve({t}, p->set);
        if (c.samples.empty() || !c.samples[0].found)
            return set_error(CW_ERR_RUNTIME, "no sign change in the interface bracket");
        *x_out = c.samples[0].x;
        return CW_OK;
    } catch (const std::exception& e) {
        return set_error(CW_ERR_RUNTIME, e.what());
    }
}

void cw_profiles_free(cw_profiles* p) { delete p; }

cw_status cw_run_stage(const cw_config* cfg, const char* stage, const char* out_dir,
                       char** manifest_json, int* all_passed) {
    if (!cfg || !stage || !out_dir) return set_error(CW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const compwave::PipelineResult r = compwave::run_pipeline(cfg->cfg, stage, out_dir);
        if (manifest_json) *manifest_json = dup_string(r.manifest.to_json());
        if (all_passed) *all_passed = r.all_passed ? 1 : 0;
        return CW_OK;
    } catch (const std::invalid_argument& e) {
        return set_error(CW_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return set_error(CW_ERR_RUNTIME, e.what());
    }
}

}  // extern "C"
