#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace compwave {

using nlohmann::json;

DiffusionMatrix RunConfig::diffusion_matrix() const {
    return make_diffusion(dimension, diffusion);
}

RunConfig default_config() {
    RunConfig cfg;
    ModeKey k10, k20, k01, k02;
    k10.k[0] = 1;
    k20.k[0] = 2;
    k01.k[1] = 1;
    k02.k[1] = 2;
    cfg.modes[k10] = 1.0;
    cfg.modes[k20] = 1.0;
    cfg.modes[k01] = 1.0;
    cfg.modes[k02] = 1.0;
    return cfg;
}

namespace {

json modes_to_json(const ModeMap& m, int dim) {
    json arr = json::array();
    for (const auto& [key, amp] : m) {
        json e;
        e["k"] = dim == 3 ? json{key.k[0], key.k[1], key.k[2]} : json{key.k[0], key.k[1]};
        e["amplitude"] = amp;
        arr.push_back(e);
    }
    return arr;
}

json to_json(const RunConfig& c) {
    json j;
    j["flux"] = c.flux_label;
    j["endpoints"] = {{"u_minus", c.endpoints.u_minus}, {"u_plus", c.endpoints.u_plus}};
    j["dimension"] = c.dimension;
    json a = json::array();
    for (int i = 0; i < c.dimension; ++i) {
        json row = json::array();
        for (int jdx = 0; jdx < c.dimension; ++jdx)
            row.push_back(c.diffusion[static_cast<size_t>(i) * c.dimension + jdx]);
        a.push_back(row);
    }
    j["diffusion"] = a;
    j["epsilon"] = c.epsilon;
    j["modes"] = modes_to_json(c.modes, c.dimension);
    j["cell"] = {{"x1_period", c.cell.x1_period},
                 {"points", c.cell.points},
                 {"t_end", c.cell.t_end},
                 {"snapshot_dt_min", c.cell.snapshot_dt_min},
                 {"snapshot_growth", c.cell.snapshot_growth},
                 {"snapshot_dt_max", c.cell.snapshot_dt_max}};
    j["channel"] = {{"half_length", c.channel.half_length},
                    {"points", c.channel.points},
                    {"t_end", c.channel.t_end},
                    {"record_dt_min", c.channel.record_dt_min},
                    {"record_growth", c.channel.record_growth},
                    {"snapshot_times", c.channel.snapshot_times},
                    {"inject_source", c.channel.inject_source}};
    j["profiles"] = {{"rate_t_lo", c.profiles.rate_t_lo},
                     {"rate_t_hi", c.profiles.rate_t_hi},
                     {"rate_t_count", c.profiles.rate_t_count},
                     {"interface_t_lo", c.profiles.interface_t_lo},
                     {"interface_t_hi", c.profiles.interface_t_hi},
                     {"interface_count", c.profiles.interface_count}};
    j["source"] = {{"t_lo", c.source.t_lo},
                   {"t_hi", c.source.t_hi},
                   {"t_count", c.source.t_count},
                   {"merge_cross_corner", c.source.merge_cross_corner},
                   {"window_pad", c.source.window_pad}};
    j["residual"] = {{"t_star", c.residual.t_star},
                     {"dt_fd_base", c.residual.dt_fd_base},
                     {"half_length", c.residual.half_length},
                     {"base_x1_points", c.residual.base_x1_points},
                     {"base_transverse_points", c.residual.base_transverse_points},
                     {"base_cell_x1_points", c.residual.base_cell_x1_points},
                     {"levels", c.residual.levels},
                     {"epsilon", c.residual.epsilon},
                     {"cell_t_end", c.residual.cell_t_end}};
    j["analysis"] = {{"power_window_lo", c.analysis.power_window_lo},
                     {"power_window_hi", c.analysis.power_window_hi},
                     {"exp_window_lo", c.analysis.exp_window_lo},
                     {"exp_window_hi", c.analysis.exp_window_hi},
                     {"cell_window_lo", c.analysis.cell_window_lo},
                     {"cell_window_hi", c.analysis.cell_window_hi},
                     {"floor", c.analysis.floor}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

struct Reader {
    const json& root;
    std::vector<ConfigError>& errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }

    const json* find(const std::string& dotted) const {
        const json* cur = &root;
        std::stringstream ss(dotted);
        std::string part;
        while (std::getline(ss, part, '.')) {
            if (!cur->is_object() || !cur->contains(part)) return nullptr;
            cur = &(*cur)[part];
        }
        return cur;
    }

    template <typename T>
    void get(const std::string& path, T& out, bool required = false) {
        const json* v = find(path);
        if (!v) {
            if (required) fail(path, "missing required key");
            return;
        }
        try {
            out = v->get<T>();
        } catch (const std::exception&) {
            fail(path, "wrong type");
        }
    }
};

}  // namespace

std::vector<ConfigError> validate(const RunConfig& cfg) {
    std::vector<ConfigError> errs;
    auto fail = [&](const std::string& p, const std::string& m) { errs.push_back({p, m}); };

    if (cfg.dimension < 2 || cfg.dimension > 3) fail("dimension", "must be 2 or 3");
    if (cfg.flux_label != "quadratic" && cfg.flux_label != "cubic")
        fail("flux", "unknown label (expected quadratic or cubic)");
    if (!(cfg.endpoints.u_minus < 0.0)) fail("endpoints.u_minus", "must be negative");
    if (!(cfg.endpoints.u_plus > 0.0)) fail("endpoints.u_plus", "must be positive");
    if (cfg.epsilon < 0.0 || cfg.epsilon > 0.1)
        fail("epsilon", "must lie in [0, 0.1] (solver stability budget)");

    const size_t nn = static_cast<size_t>(cfg.dimension) * cfg.dimension;
    if (cfg.diffusion.size() != nn) {
        fail("diffusion", "need dimension x dimension entries");
    } else {
        try {
            diffusion_lower_bound(cfg.diffusion_matrix());
        } catch (const std::exception& e) {
            fail("diffusion", e.what());
        }
    }

    for (const auto& [key, amp] : cfg.modes) {
        if (key.k[0] == 0 && key.k[1] == 0 && key.k[2] == 0)
            fail("modes", "zero wave-vector (constant component) not allowed");
        if (cfg.dimension == 2 && key.k[2] != 0) fail("modes", "k has 3 components in 2-d");
        (void)amp;
    }
    if (cfg.epsilon > 0.0 && cfg.modes.empty())
        fail("modes", "epsilon > 0 needs at least one mode");

    if (cfg.cell.points.size() != static_cast<size_t>(cfg.dimension))
        fail("cell.points", "need one entry per dimension");
    if (cfg.channel.points.size() != static_cast<size_t>(cfg.dimension))
        fail("channel.points", "need one entry per dimension");
    if (cfg.cell.points.size() == cfg.channel.points.size())
        for (size_t d = 1; d < cfg.cell.points.size(); ++d)
            if (cfg.cell.points[d] != cfg.channel.points[d])
                fail("cell.points", "transverse sizes must equal channel transverse sizes");
    if (cfg.cell.x1_period <= 0.0) fail("cell.x1_period", "must be positive");
    if (cfg.cell.t_end < cfg.channel.t_end)
        fail("cell.t_end", "must cover the channel horizon");

    // Fan containment: the right fan edge moves at lambda_+ = f1'(u_plus)
    // and carries an exponential tail of O(1) width; the diffusion wave
    // has width sqrt(4 a11 (1+t)).
    if (cfg.diffusion.size() == nn && cfg.endpoints.u_plus > 0.0) {
        double lambda_plus = 0.0;
        try {
            lambda_plus = cfg.flux().deriv(cfg.endpoints.u_plus);
        } catch (const std::exception&) {
            lambda_plus = 0.0;
        }
        const double a11 = cfg.diffusion[0];
        const double need = lambda_plus * (1.0 + cfg.channel.t_end) + 20.0 +
                            std::sqrt(4.0 * std::max(a11, 0.0) * (1.0 + cfg.channel.t_end));
        if (cfg.channel.half_length < need) {
            std::ostringstream os;
            os << "half_length " << cfg.channel.half_length
               << " too small for t_end: the wave fans need L >= " << need
               << " (containment of the interface envelope)";
            fail("channel.half_length", os.str());
        }
    }

    if (cfg.residual.levels < 2 || cfg.residual.levels > 4) fail("residual.levels", "need 2..4");
    if (cfg.output_dir.empty()) fail("output_dir", "must not be empty");
    return errs;
}

ParseResult parse_config(const std::string& json_text) {
    ParseResult r;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        r.errors.push_back({"", std::string("JSON parse error: ") + e.what()});
        return r;
    }
    RunConfig cfg = default_config();
    std::vector<ConfigError>& errs = r.errors;
    Reader rd{j, errs};

    rd.get("flux", cfg.flux_label);
    rd.get("endpoints.u_minus", cfg.endpoints.u_minus);
    rd.get("endpoints.u_plus", cfg.endpoints.u_plus);
    rd.get("dimension", cfg.dimension);
    rd.get("epsilon", cfg.epsilon, true);
    if (const json* a = rd.find("diffusion")) {
        cfg.diffusion.clear();
        if (a->is_array()) {
            for (const auto& row : *a) {
                if (row.is_array())
                    for (const auto& v : row) cfg.diffusion.push_back(v.get<double>());
                else
                    cfg.diffusion.push_back(row.get<double>());
            }
        } else {
            errs.push_back({"diffusion", "must be an array"});
        }
    }
    if (const json* m = rd.find("modes")) {
        cfg.modes.clear();
        if (!m->is_array()) {
            errs.push_back({"modes", "must be an array"});
        } else {
            for (const auto& e : *m) {
                try {
                    ModeKey key;
                    const auto& kv = e.at("k");
                    for (size_t d = 0; d < kv.size() && d < 3; ++d)
                        key.k[d] = kv[d].get<int>();
                    cfg.modes[key] = e.at("amplitude").get<double>();
                } catch (const std::exception&) {
                    errs.push_back({"modes", "each entry needs k (array) and amplitude"});
                }
            }
        }
    }
    rd.get("cell.x1_period", cfg.cell.x1_period);
    rd.get("cell.points", cfg.cell.points);
    rd.get("cell.t_end", cfg.cell.t_end);
    rd.get("cell.snapshot_dt_min", cfg.cell.snapshot_dt_min);
    rd.get("cell.snapshot_growth", cfg.cell.snapshot_growth);
    rd.get("cell.snapshot_dt_max", cfg.cell.snapshot_dt_max);
    rd.get("channel.half_length", cfg.channel.half_length);
    rd.get("channel.points", cfg.channel.points);
    rd.get("channel.t_end", cfg.channel.t_end);
    rd.get("channel.record_dt_min", cfg.channel.record_dt_min);
    rd.get("channel.record_growth", cfg.channel.record_growth);
    rd.get("channel.snapshot_times", cfg.channel.snapshot_times);
    rd.get("channel.inject_source", cfg.channel.inject_source);
    rd.get("profiles.rate_t_lo", cfg.profiles.rate_t_lo);
    rd.get("profiles.rate_t_hi", cfg.profiles.rate_t_hi);
    rd.get("profiles.rate_t_count", cfg.profiles.rate_t_count);
    rd.get("profiles.interface_t_lo", cfg.profiles.interface_t_lo);
    rd.get("profiles.interface_t_hi", cfg.profiles.interface_t_hi);
    rd.get("profiles.interface_count", cfg.profiles.interface_count);
    rd.get("source.t_lo", cfg.source.t_lo);
    rd.get("source.t_hi", cfg.source.t_hi);
    rd.get("source.t_count", cfg.source.t_count);
    rd.get("source.merge_cross_corner", cfg.source.merge_cross_corner);
    rd.get("source.window_pad", cfg.source.window_pad);
    rd.get("residual.t_star", cfg.residual.t_star);
    rd.get("residual.dt_fd_base", cfg.residual.dt_fd_base);
    rd.get("residual.half_length", cfg.residual.half_length);
    rd.get("residual.base_x1_points", cfg.residual.base_x1_points);
    rd.get("residual.base_transverse_points", cfg.residual.base_transverse_points);
    rd.get("residual.base_cell_x1_points", cfg.residual.base_cell_x1_points);
    rd.get("residual.levels", cfg.residual.levels);
    rd.get("residual.epsilon", cfg.residual.epsilon);
    rd.get("residual.cell_t_end", cfg.residual.cell_t_end);
    rd.get("analysis.power_window_lo", cfg.analysis.power_window_lo);
    rd.get("analysis.power_window_hi", cfg.analysis.power_window_hi);
    rd.get("analysis.exp_window_lo", cfg.analysis.exp_window_lo);
    rd.get("analysis.exp_window_hi", cfg.analysis.exp_window_hi);
    rd.get("analysis.cell_window_lo", cfg.analysis.cell_window_lo);
    rd.get("analysis.cell_window_hi", cfg.analysis.cell_window_hi);
    rd.get("analysis.floor", cfg.analysis.floor);
    rd.get("output_dir", cfg.output_dir);
    rd.get("seed", cfg.seed);

    std::vector<ConfigError> post = validate(cfg);
    errs.insert(errs.end(), post.begin(), post.end());
    r.ok = errs.empty();
    r.config = cfg;
    return r;
}

ParseResult load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back({"", "cannot open config file: " + path});
        return r;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_json(const RunConfig& cfg) {
    return to_json(cfg).dump(2);
}

ParseResult override_config(const RunConfig& cfg, const std::string& dotted_key,
                            const std::string& value) {
    json j = to_json(cfg);
    std::string ptr = "/" + dotted_key;
    for (auto& ch : ptr)
        if (ch == '.') ch = '/';
    json v;
    try {
        v = json::parse(value);
    } catch (const std::exception&) {
        v = value;  // bare word: keep as string
    }
    try {
        j[json::json_pointer(ptr)] = v;
    } catch (const std::exception& e) {
        ParseResult r;
        r.errors.push_back({dotted_key, std::string("override failed: ") + e.what()});
        return r;
    }
    return parse_config(j.dump());
}

}  // namespace compwave
