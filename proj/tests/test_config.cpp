#include <doctest.h>

#include "config.hpp"

using namespace compwave;

namespace {
bool has_error(const std::vector<ConfigError>& errs, const std::string& path_part,
               const std::string& msg_part = "") {
    for (const auto& e : errs)
        if (e.path.find(path_part) != std::string::npos &&
            e.message.find(msg_part) != std::string::npos)
            return true;
    return false;
}
}  // namespace

TEST_CASE("default configuration is valid and round-trips") {
    const RunConfig cfg = default_config();
    CHECK(validate(cfg).empty());
    const std::string canon = canonical_json(cfg);
    const ParseResult r = parse_config(canon);
    REQUIRE(r.ok);
    CHECK(canonical_json(r.config) == canon);
}

TEST_CASE("missing required key is reported by name") {
    const ParseResult r = parse_config("{}");
    CHECK_FALSE(r.ok);
    CHECK(has_error(r.errors, "epsilon", "missing"));
}

TEST_CASE("malformed JSON yields a parse error, not a crash") {
    const ParseResult r = parse_config("{not json");
    CHECK_FALSE(r.ok);
    REQUIRE_FALSE(r.errors.empty());
    CHECK(r.errors[0].message.find("parse error") != std::string::npos);
}

TEST_CASE("containment rejects a channel too short for the horizon") {
    const ParseResult r = override_config(default_config(), "channel.half_length", "100.0");
    CHECK_FALSE(r.ok);
    CHECK(has_error(r.errors, "channel.half_length", "wave fans need"));
}

TEST_CASE("cross-module consistency: transverse sizes, cell horizon") {
    RunConfig cfg = default_config();
    cfg.cell.points = {64, 32};
    CHECK(has_error(validate(cfg), "cell.points", "transverse"));
    cfg = default_config();
    cfg.cell.t_end = 10.0;
    CHECK(has_error(validate(cfg), "cell.t_end", "horizon"));
}

TEST_CASE("flux label, endpoints, budget, and matrix checks") {
    RunConfig cfg = default_config();
    cfg.flux_label = "cosine";
    CHECK(has_error(validate(cfg), "flux"));
    cfg = default_config();
    cfg.endpoints.u_minus = 0.5;
    CHECK(has_error(validate(cfg), "endpoints.u_minus"));
    cfg = default_config();
    cfg.epsilon = 0.5;
    CHECK(has_error(validate(cfg), "epsilon", "budget"));
    cfg = default_config();
    cfg.diffusion = {1.0, 3.0, 3.0, 1.0};
    CHECK(has_error(validate(cfg), "diffusion", "positive definite"));
}

TEST_CASE("zero wave-vector and dimension mismatches are rejected") {
    RunConfig cfg = default_config();
    ModeKey zero;
    cfg.modes[zero] = 0.3;
    CHECK(has_error(validate(cfg), "modes", "zero wave-vector"));
    cfg = default_config();
    ModeKey k3;
    k3.k[2] = 1;
    cfg.modes[k3] = 0.3;
    CHECK(has_error(validate(cfg), "modes", "3 components"));
}

TEST_CASE("overrides navigate dotted paths and re-validate") {
    ParseResult r = override_config(default_config(), "channel.t_end", "50.0");
    REQUIRE(r.ok);
    CHECK(r.config.channel.t_end == 50.0);
    r = override_config(default_config(), "flux", "cubic");
    // cubic moves the fan edge to 3(1+t): the default channel no longer
    // contains it, so the override fails validation
    CHECK_FALSE(r.ok);
    CHECK(has_error(r.errors, "channel.half_length"));
    r = override_config(default_config(), "epsilon", "0.02");
    REQUIRE(r.ok);
    CHECK(r.config.epsilon == 0.02);
}

TEST_CASE("three-dimensional configuration validates") {
    RunConfig cfg = default_config();
    cfg.dimension = 3;
    cfg.diffusion = {1.0, 0.1, 0.05, 0.1, 1.0, 0.1, 0.05, 0.1, 1.0};
    cfg.cell.points = {32, 16, 16};
    cfg.channel.points = {512, 16, 16};
    cfg.modes.clear();
    ModeKey k;
    k.k[1] = 1;
    cfg.modes[k] = 1.0;
    CHECK(validate(cfg).empty());
}
