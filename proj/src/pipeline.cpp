#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "io.hpp"

namespace compwave {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void apply_thread_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("COMPWAVE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return g;
}

json fit_json(const SeriesFit& f) {
    json j;
    j["status"] = f.status == FitStatus::Ok ? "ok"
                  : f.status == FitStatus::ConvergedFloor ? "converged" : "degenerate";
    j["slope"] = f.slope;
    j["rate"] = f.rate;
    j["stderr"] = f.stderr_slope;
    j["r2"] = f.r2;
    j["npoints"] = f.npoints;
    j["window"] = {f.window_lo, f.window_hi};
    return j;
}

double ls_order(const std::vector<double>& h, const std::vector<double>& err) {
    // least-squares slope of log(err) against log(h)
    const size_t n = h.size();
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) { sx += std::log(h[i]); sy += std::log(err[i]); }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
        sxy += (std::log(h[i]) - mx) * (std::log(err[i]) - my);
    }
    return sxy / sxx;
}

SeriesFit auto_exponential(const std::vector<double>& t, const std::vector<double>& v,
                           double floor) {
    SeriesFit f;
    if (t.empty() || series_at_floor(v, floor)) {
        f.status = FitStatus::ConvergedFloor;
        return f;
    }
    size_t ipeak = 0;
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[ipeak]) ipeak = i;
    const double cutoff = std::max(10.0 * floor, v[ipeak] * 1e-9);
    size_t iend = v.size() - 1;
    for (size_t i = ipeak; i < v.size(); ++i)
        if (v[i] > cutoff) iend = i;
    size_t count = 0;
    for (size_t i = ipeak; i <= iend; ++i)
        if (v[i] > 0.0) ++count;
    if (count < 8) iend = v.size() - 1;
    return fit_exponential(t, v, t[ipeak], t[iend]);
}

}  // namespace

const FitEntry* AnalyzeArtifacts::find(const std::string& series) const {
    for (const auto& f : fits)
        if (f.series == series) return &f;
    return nullptr;
}

ProfilesArtifacts run_profiles_stage(const RunConfig& cfg) {
    ProfileSet profiles(cfg.endpoints, cfg.flux(), cfg.diffusion[0]);
    ProfileRatesReport rates = check_profile_rates(
        profiles, {1.0, 2.0, kInfNorm},
        log_grid(cfg.profiles.rate_t_lo, cfg.profiles.rate_t_hi, cfg.profiles.rate_t_count));
    InterfaceCurve curve = interface_curve(
        log_grid(cfg.profiles.interface_t_lo, cfg.profiles.interface_t_hi,
                 cfg.profiles.interface_count),
        profiles);
    return ProfilesArtifacts{std::move(profiles), std::move(rates), std::move(curve)};
}

CellArtifacts run_cell_stage(const RunConfig& cfg) {
    std::vector<double> periods{cfg.cell.x1_period, 1.0};
    if (cfg.dimension == 3) periods.push_back(1.0);
    const TorusGrid grid = make_torus_grid(cfg.dimension, cfg.cell.points, periods);
    CellArtifacts ca;
    ca.pert = make_perturbation(grid, cfg.modes, cfg.epsilon);

    const DiffusionMatrix A = cfg.diffusion_matrix();
    const FluxKind fk = cfg.flux().kind;
    CellRunOptions opt;
    opt.t_end = cfg.cell.t_end;
    opt.snapshot_dt_min = cfg.cell.snapshot_dt_min;
    opt.snapshot_growth = cfg.cell.snapshot_growth;
    opt.snapshot_dt_max = cfg.cell.snapshot_dt_max;
    ca.minus = solve_cell(cfg.endpoints.u_minus, ca.pert, fk, TransverseKind::HalfSquare, A, opt);
    ca.plus = solve_cell(cfg.endpoints.u_plus, ca.pert, fk, TransverseKind::HalfSquare, A, opt);
    ca.decay_minus = cell_decay_rate(ca.minus, cfg.analysis.cell_window_lo, cfg.analysis.cell_window_hi);
    ca.decay_plus = cell_decay_rate(ca.plus, cfg.analysis.cell_window_lo, cfg.analysis.cell_window_hi);

    ca.expected_slow_rate = std::numeric_limits<double>::infinity();
    for (const auto& [key, amp] : cfg.modes) {
        (void)amp;
        ca.expected_slow_rate =
            std::min(ca.expected_slow_rate, dispersion_rate(A, key, grid.periods));
    }
    if (cfg.modes.empty()) ca.expected_slow_rate = 0.0;

    // Small-amplitude single-mode run against the analytic dispersion rate.
    {
        std::vector<int> pts{8, cfg.cell.points[1]};
        std::vector<double> pds{1.0, 1.0};
        if (cfg.dimension == 3) {
            pts.push_back(cfg.cell.points[2]);
            pds.push_back(1.0);
        }
        const TorusGrid lg = make_torus_grid(cfg.dimension, pts, pds);
        ModeKey k01;
        k01.k[1] = 1;
        ModeMap single;
        single[k01] = 1.0;
        PeriodicPerturbation lp = make_perturbation(lg, single, 1e-3);
        CellRunOptions lopt;
        lopt.t_end = 0.35;
        lopt.snapshot_dt_min = 0.005;
        lopt.snapshot_growth = 1.0;
        lopt.snapshot_dt_max = 0.005;
        CellSolution ls = solve_cell(cfg.endpoints.u_plus, lp, fk, TransverseKind::HalfSquare, A, lopt);
        CellDecay ld = cell_decay_rate(ls, 0.05, 0.3);
        ca.linear_fit = ld.sup_fit;
        ca.linear_expected = dispersion_rate(A, k01, lg.periods);
    }
    return ca;
}

SourceArtifacts run_source_stage(const RunConfig& cfg, const ProfilesArtifacts& pa,
                                 const CellArtifacts& ca) {
    SourceArtifacts sa;
    const DiffusionMatrix A = cfg.diffusion_matrix();
    const TransverseFluxSet tset = make_transverse(cfg.dimension);
    const AnsatzInputs in{&pa.profiles, &ca.minus, &ca.plus};
    const double h = channel_line(make_channel_grid(cfg.dimension, cfg.channel.half_length,
                                                    cfg.channel.points))
                         .h;

    sa.t = log_grid(cfg.source.t_lo, cfg.source.t_hi, cfg.source.t_count);
    for (double t : sa.t) {
        const double wc = std::sqrt(4.0 * pa.profiles.a11() * (1.0 + t));
        const double lo = -12.0 * wc - cfg.source.window_pad;
        const double hi = pa.profiles.lambda_plus() * (1.0 + t) + cfg.source.window_pad;
        const int n1 = static_cast<int>(std::ceil((hi - lo) / h)) + 1;
        LineGrid line{lo, (hi - lo) / (n1 - 1), n1};
        const bool alive = t <= ca.minus.times.back() + 1e-12 && cfg.epsilon > 0.0;
        std::array<int, 3> shape{n1, 1, 1};
        if (alive) shape = {n1, ca.minus.grid.points[1], ca.minus.grid.points[2]};
        AnsatzState st = build_ansatz(in, t, line, shape);
        SourceOptions sopt;
        sopt.merge_cross_corner = cfg.source.merge_cross_corner;
        SourceField sf = compute_source(st, tset, A, sopt);
        sa.l1.push_back(sf.l1);
        sa.l2.push_back(sf.l2);
        sa.linf.push_back(sf.linf);
    }
    const double f_lo = std::max(100.0, cfg.source.t_lo);
    sa.fit_l1 = fit_power(sa.t, sa.l1, f_lo, cfg.source.t_hi);
    sa.fit_l2 = fit_power(sa.t, sa.l2, f_lo, cfg.source.t_hi);

    // Order-of-accuracy study for the background equation residual; the
    // periodic fields are re-solved per level so every error source scales.
    const int n = cfg.dimension;
    for (int level = 0; level < cfg.residual.levels; ++level) {
        const int mult = 1 << level;
        std::vector<int> cpoints{cfg.residual.base_x1_points * mult,
                                 cfg.residual.base_transverse_points * mult};
        std::vector<int> cellpoints{cfg.residual.base_cell_x1_points * mult,
                                    cfg.residual.base_transverse_points * mult};
        std::vector<double> periods{1.0, 1.0};
        if (n == 3) {
            cpoints.push_back(cfg.residual.base_transverse_points * mult);
            cellpoints.push_back(cfg.residual.base_transverse_points * mult);
            periods.push_back(1.0);
        }
        const TorusGrid cgrid = make_torus_grid(n, cellpoints, periods);
        ModeMap modes;
        ModeKey k11, k01;
        k11.k[0] = 1;
        k11.k[1] = 1;
        k01.k[1] = 1;
        modes[k11] = 1.0;
        modes[k01] = 1.0;
        PeriodicPerturbation pert = make_perturbation(cgrid, modes, cfg.residual.epsilon);
        CellRunOptions copt;
        copt.t_end = cfg.residual.cell_t_end;
        copt.snapshot_dt_min = 0.002;
        copt.snapshot_growth = 1.03;
        copt.snapshot_dt_max = 0.01;
        const FluxKind fk = cfg.flux().kind;
        CellSolution cm = solve_cell(cfg.endpoints.u_minus, pert, fk, TransverseKind::HalfSquare, A, copt);
        CellSolution cp = solve_cell(cfg.endpoints.u_plus, pert, fk, TransverseKind::HalfSquare, A, copt);

        const ChannelGrid ch = make_channel_grid(n, cfg.residual.half_length, cpoints);
        const LineGrid line = channel_line(ch);
        const double dt_fd = cfg.residual.dt_fd_base / mult;
        AnsatzInputs rin{&pa.profiles, &cm, &cp};
        SourceOptions sopt;
        sopt.merge_cross_corner = cfg.source.merge_cross_corner;
        ResidualNorms rn = ansatz_residual(rin, cfg.residual.t_star, dt_fd, line,
                                           {ch.points[0], ch.points[1], ch.points[2]},
                                           tset, A, sopt);
        sa.res_h.push_back(line.h);
        sa.res_l1.push_back(rn.l1);
        sa.res_l2.push_back(rn.l2);
        sa.res_linf.push_back(rn.linf);
    }
    sa.order_l1 = ls_order(sa.res_h, sa.res_l1);
    return sa;
}

SimulateArtifacts run_simulate_stage(const RunConfig& cfg, const ProfilesArtifacts& pa,
                                     const CellArtifacts& ca) {
    const ChannelGrid grid =
        make_channel_grid(cfg.dimension, cfg.channel.half_length, cfg.channel.points);
    const AnsatzInputs in{&pa.profiles, &ca.minus, &ca.plus};
    ChannelRunOptions opt;
    opt.t_end = cfg.channel.t_end;
    opt.record_dt_min = cfg.channel.record_dt_min;
    opt.record_growth = cfg.channel.record_growth;
    opt.snapshot_times = cfg.channel.snapshot_times;
    opt.inject_source = cfg.channel.inject_source;
    opt.epsilon = cfg.epsilon;
    opt.source_options.merge_cross_corner = cfg.source.merge_cross_corner;
    SimulateArtifacts sim;
    sim.trace = simulate_channel(grid, in, cfg.flux().kind, TransverseKind::HalfSquare,
                                 make_transverse(cfg.dimension), cfg.diffusion_matrix(), opt);
    return sim;
}

namespace {
AnalyzeArtifacts analyze_series(const RunConfig& cfg,
                                const std::vector<std::pair<std::string, NamedSeries>>& all) {
    AnalyzeArtifacts an;
    const double floor = cfg.analysis.floor;
    const bool verification = cfg.channel.inject_source;
    auto series = [&](const std::string& name) -> const NamedSeries* {
        for (const auto& [n, s] : all)
            if (n == name) return &s;
        return nullptr;
    };
    auto add_power = [&](const std::string& name) {
        const NamedSeries* s = series(name);
        if (!s) return;
        FitEntry e;
        e.series = name;
        e.kind = "power";
        if (verification || series_at_floor(s->value, floor)) {
            e.skipped = true;
            e.fit.status = FitStatus::ConvergedFloor;
        } else {
            const double hi = std::min(cfg.analysis.power_window_hi, s->t.back());
            e.fit = fit_power(s->t, s->value, cfg.analysis.power_window_lo, hi);
        }
        an.fits.push_back(e);
    };
    auto add_exp = [&](const std::string& name) {
        const NamedSeries* s = series(name);
        if (!s) return;
        FitEntry e;
        e.series = name;
        e.kind = "exponential";
        if (verification) {
            e.skipped = true;
            e.fit.status = FitStatus::ConvergedFloor;
        } else {
            e.fit = auto_exponential(s->t, s->value, floor);
            e.skipped = e.fit.status == FitStatus::ConvergedFloor;
        }
        an.fits.push_back(e);
    };
    add_power("u_minus_uhat_linf");
    add_power("phi_zero_l2");
    add_power("phi_zero_linf");
    add_power("phi_l1");
    add_power("phi_linf");
    add_exp("phi_nonzero_l2");
    add_exp("phi_nonzero_linf");
    add_exp("ubar_minus_uhat_w1inf");
    return an;
}
}  // namespace

AnalyzeArtifacts analyze_trace(const RunConfig& cfg, const SimulationTrace& trace) {
    std::vector<std::pair<std::string, NamedSeries>> all;
    for (const auto& [name, vals] : trace.series)
        all.emplace_back(name, NamedSeries{trace.record_times, vals});
    return analyze_series(cfg, all);
}

AnalyzeArtifacts analyze_csv(const RunConfig& cfg, const std::string& norms_csv_path) {
    return analyze_series(cfg, read_named_series(norms_csv_path));
}

SchemeVerification run_scheme_verification(const RunConfig& cfg) {
    SchemeVerification sv;
    const int n = cfg.dimension;
    const DiffusionMatrix A = cfg.diffusion_matrix();
    const Flux flux = cfg.flux();
    constexpr double kTwoPi = 6.28318530717958647692;

    // Forced run against a manufactured field with analytic derivatives.
    const double B = 0.75, amp = 0.2, k1 = 3.14159265358979323846, omega = 1.0;
    auto exact = [&](double x1, double x2, double x3, double t) {
        double v = B + amp * std::sin(k1 * x1 - omega * t) * std::cos(kTwoPi * x2);
        if (n == 3) v = B + amp * std::sin(k1 * x1 - omega * t) * std::cos(kTwoPi * x2) *
                            std::cos(kTwoPi * x3);
        return v;
    };
    auto forcing = [&](double x1, double x2, double x3, double t) {
        const double th = k1 * x1 - omega * t;
        const double c2 = std::cos(kTwoPi * x2), s2 = std::sin(kTwoPi * x2);
        const double c3 = n == 3 ? std::cos(kTwoPi * x3) : 1.0;
        const double s3 = n == 3 ? std::sin(kTwoPi * x3) : 0.0;
        const double u = B + amp * std::sin(th) * c2 * c3;
        const double ut = -omega * amp * std::cos(th) * c2 * c3;
        const double u1 = k1 * amp * std::cos(th) * c2 * c3;
        const double u2 = -kTwoPi * amp * std::sin(th) * s2 * c3;
        const double u3 = -kTwoPi * amp * std::sin(th) * c2 * s3;
        const double u11 = -k1 * k1 * amp * std::sin(th) * c2 * c3;
        const double u22 = -kTwoPi * kTwoPi * amp * std::sin(th) * c2 * c3;
        const double u33 = -kTwoPi * kTwoPi * amp * std::sin(th) * c2 * c3;
        const double u12 = -kTwoPi * k1 * amp * std::cos(th) * s2 * c3;
        const double u13 = -kTwoPi * k1 * amp * std::cos(th) * c2 * s3;
        const double u23 = kTwoPi * kTwoPi * amp * std::sin(th) * s2 * s3;
        double F = ut + flux.deriv(u) * u1 + u * u2;  // transverse flux u^2/2
        F -= A.at(0, 0) * u11 + A.at(1, 1) * u22 + (A.at(0, 1) + A.at(1, 0)) * u12;
        if (n == 3) {
            F += u * u3;
            F -= A.at(2, 2) * u33 + (A.at(0, 2) + A.at(2, 0)) * u13 +
                 (A.at(1, 2) + A.at(2, 1)) * u23;
        }
        return F;
    };

    const double L = 1.0, t_end = 0.1;
    for (int level = 0; level < 3; ++level) {
        const int mult = 1 << level;
        std::vector<int> pts{64 * mult + 1, 16 * mult};
        if (n == 3) pts = {16 * mult + 1, 8 * mult, 8 * mult};
        const ChannelGrid grid = make_channel_grid(n, L, pts);
        std::array<int, 3> shape{grid.points[0], grid.points[1], grid.points[2]};
        std::array<double, 3> h{grid.h1(), grid.transverse_spacing(1),
                                n == 3 ? grid.transverse_spacing(2) : 1.0};
        StepperOptions sopt;
        sopt.x1_boundary = X1Boundary::Dirichlet;
        Stepper stepper(n, shape, h, flux.kind, TransverseKind::HalfSquare, A, sopt);
        Field u0(n, shape);
        for (int i = 0; i < shape[0]; ++i)
            for (int j = 0; j < shape[1]; ++j)
                for (int k = 0; k < shape[2]; ++k)
                    u0(i, j, k) = exact(grid.x1(i), grid.node(1, j), grid.node(2, k), 0.0);
        stepper.set_state(u0);
        GhostFill ghost = [&](double time, int side, double* out, size_t count) {
            const double xg = side == 0 ? -L - grid.h1() : L + grid.h1();
            size_t s = 0;
            for (int j = 0; j < shape[1]; ++j)
                for (int k = 0; k < shape[2]; ++k)
                    out[s++] = exact(xg, grid.node(1, j), grid.node(2, k), time);
            (void)count;
        };
        std::vector<double> buf(static_cast<size_t>(shape[0]) * shape[1] * shape[2]);
        SourceEval source = [&](double time) -> const double* {
            size_t s = 0;
            for (int i = 0; i < shape[0]; ++i)
                for (int j = 0; j < shape[1]; ++j)
                    for (int k = 0; k < shape[2]; ++k)
                        buf[s++] = forcing(grid.x1(i), grid.node(1, j), grid.node(2, k), time);
            return buf.data();
        };
        double t = 0.0;
        while (t < t_end) {
            double dt = std::min(stepper.suggest_dt(), t_end - t);
            stepper.advance(t, dt, ghost, source);
            t += dt;
        }
        Field u;
        stepper.get_state(u);
        Field err(n, shape);
        for (int i = 0; i < shape[0]; ++i)
            for (int j = 0; j < shape[1]; ++j)
                for (int k = 0; k < shape[2]; ++k)
                    err(i, j, k) = u(i, j, k) - exact(grid.x1(i), grid.node(1, j), grid.node(2, k), t);
        sv.mms_h.push_back(grid.h1());
        sv.mms_err.push_back(lp_norm(err, 2.0, grid.x1_weights()));
    }
    sv.mms_order = ls_order(sv.mms_h, sv.mms_err);

    // Pure-diffusion single transverse mode against the analytic rate.
    {
        std::vector<int> pts{33, 64};
        if (n == 3) pts = {17, 64, 8};
        const ChannelGrid grid = make_channel_grid(n, L, pts);
        std::array<int, 3> shape{grid.points[0], grid.points[1], grid.points[2]};
        std::array<double, 3> h{grid.h1(), grid.transverse_spacing(1),
                                n == 3 ? grid.transverse_spacing(2) : 1.0};
        DiffusionMatrix I = make_diffusion(n, n == 2
                                                  ? std::vector<double>{1, 0, 0, 1}
                                                  : std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1});
        StepperOptions sopt;
        sopt.x1_boundary = X1Boundary::Dirichlet;
        Stepper stepper(n, shape, h, FluxKind::Zero, TransverseKind::Zero, I, sopt);
        const double base = 0.5, a0 = 0.01;
        sv.diffusion_expected = kTwoPi * kTwoPi;
        Field u0(n, shape);
        for (int i = 0; i < shape[0]; ++i)
            for (int j = 0; j < shape[1]; ++j)
                for (int k = 0; k < shape[2]; ++k)
                    u0(i, j, k) = base + a0 * std::cos(kTwoPi * grid.node(1, j));
        stepper.set_state(u0);
        GhostFill ghost = [&](double time, int side, double* out, size_t count) {
            (void)side;
            size_t s = 0;
            for (int j = 0; j < shape[1]; ++j)
                for (int k = 0; k < shape[2]; ++k)
                    out[s++] = base + a0 * std::exp(-sv.diffusion_expected * time) *
                                          std::cos(kTwoPi * grid.node(1, j));
            (void)count;
        };
        std::vector<double> ts, vs;
        double t = 0.0;
        const double t_stop = 0.08;
        int step = 0;
        while (t < t_stop) {
            double dt = std::min(stepper.suggest_dt(), t_stop - t);
            stepper.advance(t, dt, ghost);
            t += dt;
            if (++step % 10 == 0) {
                ts.push_back(t);
                vs.push_back(std::max(std::abs(stepper.max_u() - base),
                                      std::abs(stepper.min_u() - base)));
            }
        }
        const SeriesFit f = fit_exponential(ts, vs, 0.0, t_stop);
        sv.diffusion_rate = f.rate;
    }
    return sv;
}

std::vector<CheckResult> evaluate_criteria(const RunConfig& cfg, const ProfilesArtifacts& pa,
                                           const CellArtifacts& ca, const SourceArtifacts& sa,
                                           const SimulateArtifacts& sim,
                                           const AnalyzeArtifacts& an,
                                           const SchemeVerification& sv) {
    std::vector<CheckResult> checks;
    auto add = [&](int crit, const std::string& name, bool pass, double measured,
                   const std::string& detail, bool skipped = false) {
        checks.push_back({crit, name, pass || skipped, skipped, measured, detail});
    };

    // 1. fan slope decay exponents, p in {1, 2, inf}
    for (const RateSeries& rs : pa.rates.rarefaction_dx) {
        const double target = rs.p == kInfNorm ? -1.0 : -1.0 + 1.0 / rs.p;
        std::ostringstream nm, dt;
        nm << "rarefaction_dx L" << (rs.p == kInfNorm ? std::string("inf")
                                                      : std::to_string(static_cast<int>(rs.p)));
        dt << "exponent target " << target << " +- 0.1";
        add(1, nm.str(), std::abs(rs.fit.slope - target) <= 0.1, rs.fit.slope, dt.str());
    }

    // 2. diffusion-wave slope exponents
    for (const RateSeries& rs : pa.rates.contact_dx) {
        if (rs.p == 1.0) {
            double worst = 0.0;
            for (double v : rs.value) worst = std::max(worst, std::abs(v + cfg.endpoints.u_minus));
            add(2, "contact_dx L1 constant", worst <= 1e-10, worst,
                "total variation constant to 1e-10");
        } else {
            const double target = rs.p == kInfNorm ? -0.5 : -0.5 * (1.0 - 1.0 / rs.p);
            std::ostringstream nm, dt;
            nm << "contact_dx L" << (rs.p == kInfNorm ? std::string("inf")
                                                      : std::to_string(static_cast<int>(rs.p)));
            dt << "exponent target " << target << " +- 0.05";
            add(2, nm.str(), std::abs(rs.fit.slope - target) <= 0.05, rs.fit.slope, dt.str());
        }
    }

    // 3. interface curve bounds and matching residual
    {
        const bool has_t0 = pa.interface.t0.has_value();
        int count_after = 0;
        for (const auto& s : pa.interface.samples)
            if (has_t0 && s.t >= *pa.interface.t0) ++count_after;
        add(3, "interface bounds hold from T0", has_t0 && count_after >= 3,
            has_t0 ? *pa.interface.t0 : -1.0,
            "two-sided envelope holds for every sample past the empirical T0");
        add(3, "interface matching residual decay", pa.interface.match_residual_fit.slope <= -0.6,
            pa.interface.match_residual_fit.slope, "power-fit exponent <= -0.6 (target -3/4)");
    }

    // 4. periodic cell relaxation
    {
        auto cell_check = [&](const char* tag, const CellDecay& d) {
            const bool converged = d.sup_fit.status == FitStatus::ConvergedFloor;
            add(4, std::string("cell sup decay ") + tag,
                d.sup_fit.status == FitStatus::Ok && d.sup_fit.rate > 0.0 && d.sup_fit.r2 >= 0.99,
                d.sup_fit.rate, "exponential with rate > 0, R2 >= 0.99", converged);
            add(4, std::string("cell grad decay ") + tag,
                d.grad_fit.status == FitStatus::Ok && d.grad_fit.rate > 0.0 && d.grad_fit.r2 >= 0.99,
                d.grad_fit.rate, "exponential with rate > 0, R2 >= 0.99", converged);
            add(4, std::string("cell mean drift ") + tag, d.max_mean_abs <= 1e-12, d.max_mean_abs,
                "discrete mean conserved to 1e-12");
        };
        cell_check("minus", ca.decay_minus);
        cell_check("plus", ca.decay_plus);
        const double rel = ca.linear_expected > 0.0
                               ? std::abs(ca.linear_fit.rate - ca.linear_expected) / ca.linear_expected
                               : 1.0;
        add(4, "cell linear-regime dispersion", rel <= 0.05, ca.linear_fit.rate,
            "rate within 5% of the analytic value " + std::to_string(ca.linear_expected));
    }

    // 5. source decay
    add(5, "source L1 exponent", sa.fit_l1.slope <= -0.9, sa.fit_l1.slope,
        "power-fit exponent <= -0.9 over [1e2, 1e4]");
    add(5, "source L2 exponent", sa.fit_l2.slope <= -0.65, sa.fit_l2.slope,
        "power-fit exponent <= -0.65 over [1e2, 1e4]");

    // 6. background-equation residual convergence
    add(6, "ansatz residual order", sa.order_l1 >= 1.9, sa.order_l1,
        "observed L1 order >= 1.9 over three grids");

    // 7. distance to the composite wave
    if (const FitEntry* f = an.find("u_minus_uhat_linf")) {
        add(7, "u - uhat sup decay",
            f->fit.slope >= -0.75 && f->fit.slope <= -0.35, f->fit.slope,
            "power-fit exponent in [-0.75, -0.35] over [10, t_end]", f->skipped);
    }

    // 8. mode decays
    if (const FitEntry* f = an.find("phi_nonzero_l2")) {
        add(8, "non-zero mode exponential",
            f->fit.status == FitStatus::Ok && f->fit.rate > 0.0 && f->fit.r2 >= 0.98,
            f->fit.rate, "log-linear with rate > 0, R2 >= 0.98", f->skipped);
    }
    if (const FitEntry* f = an.find("phi_zero_l2")) {
        add(8, "zero mode L2 exponent", std::abs(f->fit.slope + 0.25) <= 0.15, f->fit.slope,
            "power-fit exponent within 0.15 of -1/4", f->skipped);
    }
    if (const FitEntry* f = an.find("phi_l1")) {
        add(8, "phi L1 growth", f->fit.slope <= 0.15, f->fit.slope,
            "growth exponent <= 0.15", f->skipped);
    }

    // 9. structural invariants
    add(9, "maximum principle", sim.trace.max_principle_ok,
        sim.trace.max_principle_worst, "state within data range every step");
    {
        bool q2ok = true;
        double worst = 0.0;
        for (const auto& rs : sim.trace.region_energy) {
            worst = std::min({rs.q2.region1, rs.q2.region2, rs.q2.region3});
            if (rs.q2.region1 < 0.0 || rs.q2.region2 < 0.0 || rs.q2.region3 < 0.0) q2ok = false;
        }
        add(9, "region energies nonnegative", q2ok, worst, "all parts >= 0 at every snapshot");
    }
    {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        Field f(2, {64, 32, 1});
        std::vector<double> w(64, 1.0);
        w.front() = w.back() = 0.5;
        double worst_pyth = 0.0, worst_cross = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            for (double& v : f.v) v = uni(rng);
            const double total = lp_norm(f, 2.0, w);
            const std::vector<double> zm = zero_mode(f);
            const Field nz = nonzero_mode(f);
            const double z2 = lp_norm_line(zm, 2.0, w);
            const double n2 = lp_norm(nz, 2.0, w);
            worst_pyth = std::max(worst_pyth,
                                  std::abs(total * total - z2 * z2 - n2 * n2) / (total * total));
            const std::vector<double> cross = zero_mode(nz);
            for (double v : cross) worst_cross = std::max(worst_cross, std::abs(v));
        }
        add(9, "mode split Pythagoras", worst_pyth <= 1e-12, worst_pyth,
            "norm identity to 1e-12 on 100 random fields");
        add(9, "projections annihilate", worst_cross <= 1e-13, worst_cross,
            "transverse mean of the non-zero mode vanishes to 1e-13");
    }

    // 10. scheme verification
    add(10, "manufactured-solution order", sv.mms_order >= 1.9, sv.mms_order,
        "observed L2 order >= 1.9 over three grids");
    {
        const double rel = std::abs(sv.diffusion_rate - sv.diffusion_expected) /
                           sv.diffusion_expected;
        add(10, "single-mode diffusion rate", rel <= 0.01, sv.diffusion_rate,
            "rate within 1% of " + std::to_string(sv.diffusion_expected));
    }
    return checks;
}

std::string RunManifest::to_json() const {
    json j;
    j["stage"] = stage;
    j["config_hash"] = config_hash;
    json files_j = json::array();
    for (const auto& f : files)
        files_j.push_back({{"path", f.path}, {"checksum", f.checksum}, {"bytes", f.bytes}});
    j["files"] = files_j;
    json checks_j = json::array();
    for (const auto& c : checks)
        checks_j.push_back({{"criterion", c.criterion},
                            {"name", c.name},
                            {"pass", c.pass},
                            {"skipped", c.skipped},
                            {"measured", c.measured},
                            {"detail", c.detail}});
    j["checks"] = checks_j;
    j["all_passed"] = all_passed;
    return j.dump(2);
}

namespace {

void write_profiles_files(const RunConfig& cfg, const ProfilesArtifacts& pa,
                          const std::string& dir) {
    {
        CsvWriter csv(dir + "/profiles.csv", "t,x1,u_r,u_c,u_hat,du_r,du_c");
        for (double t : {0.0, 1.0, 10.0, 100.0, cfg.profiles.rate_t_hi}) {
            const double wc = std::sqrt(4.0 * pa.profiles.a11() * (1.0 + t));
            const double lo = -(20.0 + 3.0 * wc);
            const double hi = pa.profiles.lambda_plus() * (1.0 + t) + 20.0;
            const int npts = 400;
            for (int i = 0; i < npts; ++i) {
                const double x = lo + (hi - lo) * i / (npts - 1);
                const ProfileValue r = pa.profiles.rarefaction(x, t);
                const ProfileValue c = pa.profiles.contact(x, t);
                csv.row({t, x, r.u, c.u, r.u + c.u, r.du, c.du});
            }
        }
    }
    json j;
    auto rate_json = [](const std::vector<RateSeries>& v, double target_shift,
                        double target_scale) {
        json arr = json::array();
        for (const auto& rs : v) {
            json e;
            e["p"] = rs.p == kInfNorm ? json("inf") : json(rs.p);
            e["fit"] = fit_json(rs.fit);
            (void)target_shift;
            (void)target_scale;
            arr.push_back(e);
        }
        return arr;
    };
    j["rarefaction_dx"] = rate_json(pa.rates.rarefaction_dx, 0, 0);
    j["rarefaction_dxx"] = rate_json(pa.rates.rarefaction_dxx, 0, 0);
    j["contact_dx"] = rate_json(pa.rates.contact_dx, 0, 0);
    j["tail_right_trend"] = fit_json(pa.rates.tail_right_trend);
    j["tail_left_trend"] = fit_json(pa.rates.tail_left_trend);
    json itf;
    itf["t0"] = pa.interface.t0 ? json(*pa.interface.t0) : json();
    itf["match_residual_fit"] = fit_json(pa.interface.match_residual_fit);
    itf["zeta_sq_growth_slope"] = pa.interface.zeta_sq_growth.slope;
    json samples = json::array();
    for (const auto& s : pa.interface.samples)
        samples.push_back({{"t", s.t},
                           {"found", s.found},
                           {"x", s.x},
                           {"residual", s.residual},
                           {"bound_lo", s.bound_lo},
                           {"bound_hi", s.bound_hi},
                           {"bounds_ok", s.bounds_ok},
                           {"match_residual", s.match_residual}});
    itf["samples"] = samples;
    j["interface"] = itf;
    write_text(dir + "/profile_rates.json", j.dump(2));
}

void write_cell_files(const RunConfig& cfg, const CellArtifacts& ca, const std::string& dir) {
    auto dump = [&](const CellSolution& sol, const std::string& name) {
        std::vector<double> all;
        all.reserve(sol.tilde.size() * (sol.tilde.empty() ? 0 : sol.tilde[0].size()));
        for (const Field& f : sol.tilde) all.insert(all.end(), f.v.begin(), f.v.end());
        write_doubles(dir + "/" + name + ".bin", all);
        json h;
        h["format"] = "float64";
        h["background"] = sol.background;
        h["points"] = {sol.grid.points[0], sol.grid.points[1], sol.grid.points[2]};
        h["periods"] = {sol.grid.periods[0], sol.grid.periods[1], sol.grid.periods[2]};
        h["times"] = sol.times;
        h["endpoints"] = {{"u_minus", cfg.endpoints.u_minus}, {"u_plus", cfg.endpoints.u_plus}};
        write_text(dir + "/" + name + ".json", h.dump(2));
    };
    dump(ca.minus, "cell_minus");
    dump(ca.plus, "cell_plus");
    json j;
    j["minus"] = {{"sup", fit_json(ca.decay_minus.sup_fit)},
                  {"grad", fit_json(ca.decay_minus.grad_fit)},
                  {"max_mean_abs", ca.decay_minus.max_mean_abs}};
    j["plus"] = {{"sup", fit_json(ca.decay_plus.sup_fit)},
                 {"grad", fit_json(ca.decay_plus.grad_fit)},
                 {"max_mean_abs", ca.decay_plus.max_mean_abs}};
    j["expected_slow_rate"] = ca.expected_slow_rate;
    j["linear_regime"] = {{"fit", fit_json(ca.linear_fit)}, {"expected", ca.linear_expected}};
    write_text(dir + "/cell_decay.json", j.dump(2));
}

void write_source_files(const SourceArtifacts& sa, const std::string& dir) {
    {
        CsvWriter csv(dir + "/source_norms.csv", "t,p,norm");
        for (size_t i = 0; i < sa.t.size(); ++i) {
            csv.row(sa.t[i], "1", sa.l1[i]);
            csv.row(sa.t[i], "2", sa.l2[i]);
            csv.row(sa.t[i], "inf", sa.linf[i]);
        }
    }
    json j;
    j["fit_l1"] = fit_json(sa.fit_l1);
    j["fit_l2"] = fit_json(sa.fit_l2);
    json levels = json::array();
    for (size_t i = 0; i < sa.res_h.size(); ++i)
        levels.push_back({{"h", sa.res_h[i]},
                          {"l1", sa.res_l1[i]},
                          {"l2", sa.res_l2[i]},
                          {"linf", sa.res_linf[i]}});
    j["residual_levels"] = levels;
    j["order_l1"] = sa.order_l1;
    write_text(dir + "/ansatz_residual.json", j.dump(2));
}

void write_simulate_files(const SimulateArtifacts& sim, const std::string& dir) {
    {
        CsvWriter csv(dir + "/norms.csv", "t,name,value");
        for (size_t i = 0; i < sim.trace.record_times.size(); ++i)
            for (const auto& [name, vals] : sim.trace.series)
                csv.row(sim.trace.record_times[i], name, vals[i]);
    }
    {
        CsvWriter csv(dir + "/q2.csv", "t,region1,region2,region3,total");
        for (const auto& rs : sim.trace.region_energy)
            csv.row({rs.t, rs.q2.region1, rs.q2.region2, rs.q2.region3, rs.q2.total()});
    }
    json snaps;
    snaps["times"] = sim.trace.snapshot_times;
    if (!sim.trace.snapshots.empty())
        snaps["points"] = {sim.trace.snapshots[0].shape[0], sim.trace.snapshots[0].shape[1],
                           sim.trace.snapshots[0].shape[2]};
    snaps["format"] = "float64";
    write_text(dir + "/snapshots.json", snaps.dump(2));
    for (size_t i = 0; i < sim.trace.snapshots.size(); ++i) {
        std::ostringstream name;
        name << dir << "/u_" << i << ".bin";
        write_doubles(name.str(), sim.trace.snapshots[i].v);
    }
    json mon;
    mon["steps"] = sim.trace.steps;
    mon["max_principle_ok"] = sim.trace.max_principle_ok;
    mon["max_principle_worst"] = sim.trace.max_principle_worst;
    mon["boundary_dx1_max"] = sim.trace.boundary_dx1_max;
    mon["last_dt"] = sim.trace.last_dt;
    write_text(dir + "/monitor.json", mon.dump(2));
}

void write_analyze_files(const AnalyzeArtifacts& an, const std::string& dir) {
    json arr = json::array();
    for (const auto& e : an.fits) {
        json f;
        f["series"] = e.series;
        f["kind"] = e.kind;
        f["skipped"] = e.skipped;
        f["fit"] = fit_json(e.fit);
        arr.push_back(f);
    }
    json j;
    j["fits"] = arr;
    write_text(dir + "/fit_report.json", j.dump(2));
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg, const std::string& stage,
                            const std::string& out_dir) {
    static const std::vector<std::string> order{"profiles", "cell", "ansatz",
                                                "simulate", "analyze", "verify-all"};
    const auto it = std::find(order.begin(), order.end(), stage);
    if (it == order.end()) throw std::invalid_argument("unknown pipeline stage: " + stage);
    const int depth = static_cast<int>(it - order.begin());
    const bool verify = stage == "verify-all";

    apply_thread_env();
    fs::create_directories(out_dir);
    PipelineResult result;
    result.manifest.stage = stage;
    result.manifest.config_hash = fnv1a64_hex(canonical_json(cfg));
    write_text(out_dir + "/config.json", canonical_json(cfg));

    ProfilesArtifacts pa = run_profiles_stage(cfg);
    write_profiles_files(cfg, pa, out_dir);

    CellArtifacts ca;
    SourceArtifacts sa;
    SimulateArtifacts sim;
    AnalyzeArtifacts an;
    SchemeVerification sv;

    if (depth >= 1 || verify) {
        ca = run_cell_stage(cfg);
        write_cell_files(cfg, ca, out_dir);
    }
    if (depth >= 2 || verify) {
        sa = run_source_stage(cfg, pa, ca);
        write_source_files(sa, out_dir);
    }
    if (depth >= 3 || verify) {
        sim = run_simulate_stage(cfg, pa, ca);
        write_simulate_files(sim, out_dir);
    }
    if (depth >= 4 || verify) {
        an = analyze_csv(cfg, out_dir + "/norms.csv");
        write_analyze_files(an, out_dir);
    }
    if (verify) {
        sv = run_scheme_verification(cfg);
        result.manifest.checks = evaluate_criteria(cfg, pa, ca, sa, sim, an, sv);
        for (const auto& c : result.manifest.checks)
            if (!c.pass) result.all_passed = false;
    }
    result.manifest.all_passed = result.all_passed;

    // Every file in the output directory goes into the manifest.
    for (const auto& entry : fs::directory_iterator(out_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue;
        ManifestFile mf;
        mf.path = name;
        mf.bytes = entry.file_size();
        mf.checksum = file_checksum(entry.path().string());
        result.manifest.files.push_back(mf);
    }
    std::sort(result.manifest.files.begin(), result.manifest.files.end(),
              [](const ManifestFile& a, const ManifestFile& b) { return a.path < b.path; });
    write_text(out_dir + "/manifest.json", result.manifest.to_json());
    return result;
}

}  // namespace compwave
