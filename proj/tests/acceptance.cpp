// Acceptance suite: runs the full default pipeline and prints one line per
// criterion check.  Exit status 0 iff every check passes (skipped checks
// count as passing: they mark series that already converged).

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>

#include "pipeline.hpp"

int main(int argc, char** argv) {
    using namespace compwave;
    std::string out_dir = "acceptance_out";
    if (argc > 1) out_dir = argv[1];
    if (const char* env = std::getenv("COMPWAVE_ACCEPT_OUT")) out_dir = env;

    const RunConfig cfg = default_config();
    std::printf("running the full verification pipeline (desk-scale default)...\n");
    std::fflush(stdout);

    PipelineResult result;
    try {
        result = run_pipeline(cfg, "verify-all", out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pipeline aborted: %s\n", e.what());
        return 2;
    }

    std::map<int, bool> per_criterion;
    for (const auto& c : result.manifest.checks) {
        std::printf("[%s]%s criterion %2d | %-34s | measured % .6g | %s\n",
                    c.pass ? "PASS" : "FAIL", c.skipped ? " (skipped)" : "          ",
                    c.criterion, c.name.c_str(), c.measured, c.detail.c_str());
        auto it = per_criterion.find(c.criterion);
        if (it == per_criterion.end()) per_criterion[c.criterion] = c.pass;
        else it->second = it->second && c.pass;
    }
    std::printf("\n");
    for (const auto& [crit, pass] : per_criterion)
        std::printf("criterion %2d: %s\n", crit, pass ? "PASS" : "FAIL");
    std::printf("\nacceptance: %s (artifacts in %s)\n",
                result.all_passed ? "ALL CRITERIA PASSED" : "FAILURES PRESENT",
                out_dir.c_str());
    return result.all_passed ? 0 : 1;
}
