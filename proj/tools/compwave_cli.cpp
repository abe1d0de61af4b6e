// Command-line front end; talks to the library through the C API only.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "compwave.h"

namespace {

int fail(const char* what) {
    std::fprintf(stderr, "error: %s: %s\n", what, cw_last_error());
    return 2;
}

void print_checks(const std::string& manifest_json) {
    const auto j = nlohmann::json::parse(manifest_json);
    if (!j.contains("checks")) return;
    std::map<int, std::pair<bool, int>> per_criterion;  // pass, count
    for (const auto& c : j["checks"]) {
        const int crit = c["criterion"].get<int>();
        const bool pass = c["pass"].get<bool>();
        const bool skipped = c.value("skipped", false);
        std::printf("  [%s]%s criterion %2d | %-34s | measured % .6g | %s\n",
                    pass ? "PASS" : "FAIL", skipped ? " (skipped)" : "          ", crit,
                    c["name"].get<std::string>().c_str(), c["measured"].get<double>(),
                    c["detail"].get<std::string>().c_str());
        auto& agg = per_criterion[crit];
        if (per_criterion[crit].second == 0) agg.first = true;
        agg.first = agg.first && pass;
        agg.second += 1;
    }
    std::printf("\n");
    for (const auto& [crit, agg] : per_criterion)
        std::printf("criterion %2d: %s (%d checks)\n", crit, agg.first ? "PASS" : "FAIL",
                    agg.second);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"composite-wave laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::vector<std::string> overrides;
    bool dump_config = false;
    app.add_option("--config", config_path, "run configuration (JSON); defaults built in");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--stage-override", overrides, "key=value override, dotted path")
        ->take_all();
    app.add_flag("--dump-config", dump_config, "print the effective config and exit");

    const std::vector<std::string> stages{"profiles", "cell",    "ansatz",
                                          "simulate", "analyze", "verify-all"};
    std::string chosen;
    for (const auto& s : stages) {
        CLI::App* sub = app.add_subcommand(s);
        sub->callback([&chosen, s]() { chosen = s; });
    }

    CLI11_PARSE(app, argc, argv);

    cw_config* cfg = nullptr;
    cw_status st = config_path.empty() ? cw_config_default(&cfg)
                                       : cw_config_load(config_path.c_str(), &cfg);
    if (st != CW_OK) return fail("config");

    for (const auto& ov : overrides) {
        const size_t eq = ov.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --stage-override needs key=value, got '%s'\n",
                         ov.c_str());
            cw_config_free(cfg);
            return 2;
        }
        st = cw_config_override(cfg, ov.substr(0, eq).c_str(), ov.substr(eq + 1).c_str());
        if (st != CW_OK) {
            fail("override");
            cw_config_free(cfg);
            return 2;
        }
    }

    if (dump_config) {
        char* json = nullptr;
        if (cw_config_canonical_json(cfg, &json) != CW_OK) return fail("dump");
        std::printf("%s\n", json);
        cw_free(json);
        cw_config_free(cfg);
        return 0;
    }

    char* manifest = nullptr;
    int all_passed = 1;
    st = cw_run_stage(cfg, chosen.c_str(), out_dir.c_str(), &manifest, &all_passed);
    if (st != CW_OK) {
        fail("run");
        cw_config_free(cfg);
        return 2;
    }
    std::printf("stage %s complete; artifacts in %s\n", chosen.c_str(), out_dir.c_str());
    if (chosen == "verify-all" && manifest) {
        print_checks(manifest);
        std::printf("verify-all: %s\n", all_passed ? "ALL CHECKS PASSED" : "CHECKS FAILED");
    }
    cw_free(manifest);
    cw_config_free(cfg);
    return chosen == "verify-all" ? (all_passed ? 0 : 1) : 0;
}
