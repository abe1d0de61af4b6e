#pragma once

#include <string>
#include <vector>

#include "ansatz.hpp"
#include "cell.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "profiles.hpp"

namespace compwave {

struct CheckResult {
    int criterion = 0;  // 1..10; 0 for stage-internal checks
    std::string name;
    bool pass = false;
    bool skipped = false;  // series already converged, nothing to fit
    double measured = 0.0;
    std::string detail;
};

struct ManifestFile {
    std::string path;  // relative to the output directory
    std::string checksum;
    unsigned long long bytes = 0;
};

struct RunManifest {
    std::string stage;
    std::string config_hash;
    std::vector<ManifestFile> files;
    std::vector<CheckResult> checks;
    bool all_passed = true;
    std::string to_json() const;
};

struct ProfilesArtifacts {
    ProfileSet profiles;
    ProfileRatesReport rates;
    InterfaceCurve interface;
};

struct CellArtifacts {
    PeriodicPerturbation pert;
    CellSolution minus, plus;
    CellDecay decay_minus, decay_plus;
    double expected_slow_rate = 0.0;  // slowest excited dispersion rate
    SeriesFit linear_fit;             // dedicated small-amplitude single-mode run
    double linear_expected = 0.0;
};

struct SourceArtifacts {
    std::vector<double> t;
    std::vector<double> l1, l2, linf;
    SeriesFit fit_l1, fit_l2;
    std::vector<double> res_h, res_l1, res_l2, res_linf;
    double order_l1 = 0.0;  // least-squares observed order across the levels
};

struct SimulateArtifacts {
    SimulationTrace trace;
};

struct FitEntry {
    std::string series;
    std::string kind;  // "power" | "exponential"
    SeriesFit fit;
    bool skipped = false;
};

struct AnalyzeArtifacts {
    std::vector<FitEntry> fits;
    const FitEntry* find(const std::string& series) const;
};

struct SchemeVerification {
    std::vector<double> mms_h, mms_err;
    double mms_order = 0.0;
    double diffusion_rate = 0.0;
    double diffusion_expected = 0.0;
};

ProfilesArtifacts run_profiles_stage(const RunConfig& cfg);
CellArtifacts run_cell_stage(const RunConfig& cfg);
SourceArtifacts run_source_stage(const RunConfig& cfg, const ProfilesArtifacts& pa,
                                 const CellArtifacts& ca);
SimulateArtifacts run_simulate_stage(const RunConfig& cfg, const ProfilesArtifacts& pa,
                                     const CellArtifacts& ca);
AnalyzeArtifacts analyze_trace(const RunConfig& cfg, const SimulationTrace& trace);
AnalyzeArtifacts analyze_csv(const RunConfig& cfg, const std::string& norms_csv_path);
SchemeVerification run_scheme_verification(const RunConfig& cfg);

// Full acceptance table; every tolerance is pinned here.
std::vector<CheckResult> evaluate_criteria(const RunConfig& cfg, const ProfilesArtifacts& pa,
                                           const CellArtifacts& ca, const SourceArtifacts& sa,
                                           const SimulateArtifacts& sim,
                                           const AnalyzeArtifacts& an,
                                           const SchemeVerification& sv);

struct PipelineResult {
    RunManifest manifest;
    bool all_passed = true;
};

// Executes the named stage and everything it depends on, writing the
// artifacts and the manifest under out_dir.  "verify-all" additionally
// evaluates the acceptance table; all_passed reflects it.
PipelineResult run_pipeline(const RunConfig& cfg, const std::string& stage,
                            const std::string& out_dir);

}  // namespace compwave
