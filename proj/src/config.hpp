#pragma once

#include <string>
#include <vector>

#include "cell.hpp"
#include "flux.hpp"
#include "profiles.hpp"

namespace compwave {

struct ConfigError {
    std::string path;
    std::string message;
};

struct CellConfig {
    double x1_period = 25.0;
    std::vector<int> points{64, 64};
    double t_end = 200.0;
    double snapshot_dt_min = 0.002;
    double snapshot_growth = 1.06;
    double snapshot_dt_max = 2.0;
};

struct ChannelConfig {
    double half_length = 400.0;
    std::vector<int> points{2048, 64};
    double t_end = 200.0;
    double record_dt_min = 0.002;
    double record_growth = 1.05;
    std::vector<double> snapshot_times{0.0, 1.0, 5.0, 10.0, 25.0, 50.0, 100.0, 150.0, 200.0};
    bool inject_source = false;
};

struct ProfilesConfig {
    double rate_t_lo = 10.0;
    double rate_t_hi = 1000.0;
    int rate_t_count = 25;
    double interface_t_lo = 1.0;
    double interface_t_hi = 2000.0;
    int interface_count = 90;
};

struct SourceConfig {
    double t_lo = 10.0;
    double t_hi = 10000.0;
    int t_count = 25;
    bool merge_cross_corner = false;
    double window_pad = 40.0;
};

struct ResidualConfig {
    double t_star = 0.1;
    double dt_fd_base = 0.04;
    double half_length = 30.0;
    int base_x1_points = 128;
    int base_transverse_points = 16;
    int base_cell_x1_points = 64;
    int levels = 3;
    double epsilon = 0.01;
    double cell_t_end = 0.2;
};

struct AnalysisConfig {
    double power_window_lo = 10.0;   // power fits exclude the early transient
    double power_window_hi = 200.0;
    double exp_window_lo = 5.0;
    double exp_window_hi = 200.0;
    double cell_window_lo = 30.0;
    double cell_window_hi = 150.0;
    double floor = 1e-13;
};

struct RunConfig {
    std::string flux_label = "quadratic";
    WaveEndpoints endpoints;
    int dimension = 2;
    std::vector<double> diffusion{1.0, 0.1, 0.1, 1.0};  // row-major n x n
    double epsilon = 0.01;
    ModeMap modes;  // relative amplitudes, rescaled to epsilon
    CellConfig cell;
    ChannelConfig channel;
    ProfilesConfig profiles;
    SourceConfig source;
    ResidualConfig residual;
    AnalysisConfig analysis;
    std::string output_dir = "out";
    unsigned long long seed = 20240701ULL;

    DiffusionMatrix diffusion_matrix() const;
    Flux flux() const { return make_flux(flux_label); }
};

RunConfig default_config();

// Typed, bounds-checked parse; returns every violated constraint with its
// field path instead of stopping at the first.
struct ParseResult {
    bool ok = false;
    RunConfig config;
    std::vector<ConfigError> errors;
};

ParseResult parse_config(const std::string& json_text);
ParseResult load_config(const std::string& path);

// Canonical serialization (sorted keys, full precision); hashing this is
// stable under re-serialization.
std::string canonical_json(const RunConfig& cfg);

// Apply a dotted-path override, value given as JSON text (bare words are
// treated as strings).
ParseResult override_config(const RunConfig& cfg, const std::string& dotted_key,
                            const std::string& value);

std::vector<ConfigError> validate(const RunConfig& cfg);

}  // namespace compwave
