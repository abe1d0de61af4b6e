#include <doctest.h>

#include <cmath>
#include <complex>

#include "cell.hpp"

using namespace compwave;

namespace {

TorusGrid unit_grid(int n1 = 32, int n2 = 32) {
    return make_torus_grid(2, {n1, n2}, {1.0, 1.0});
}

ModeKey key(int k1, int k2, int k3 = 0) {
    ModeKey k;
    k.k[0] = k1;
    k.k[1] = k2;
    k.k[2] = k3;
    return k;
}

const DiffusionMatrix kA = make_diffusion(2, {1.0, 0.1, 0.1, 1.0});

double field_mean(const Field& f) {
    return stable_sum(f.v) / static_cast<double>(f.size());
}

}  // namespace

TEST_CASE("torus grid normalization") {
    const TorusGrid g = make_torus_grid(2, {64, 32}, {25.0, 1.0});
    CHECK(g.spacing(0) == doctest::Approx(25.0 / 64.0));
    // transverse weights are 1/N each and sum to 1 exactly
    CHECK(32 * g.spacing(1) == 1.0);
    CHECK_THROWS_AS(make_torus_grid(2, {64, 32}, {25.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_torus_grid(2, {64}, {25.0}), std::invalid_argument);
}

TEST_CASE("empty mode map gives the zero perturbation") {
    const PeriodicPerturbation p = make_perturbation(unit_grid(), {}, 0.0);
    CHECK(p.epsilon == 0.0);
    for (double v : p.v0.v) CHECK(v == 0.0);
}

TEST_CASE("single cosine mode: zero mean, scaled sup") {
    const TorusGrid g = unit_grid(16, 64);
    ModeMap m;
    m[key(0, 1)] = 1.0;
    const PeriodicPerturbation p = make_perturbation(g, m, 0.01);
    CHECK(std::abs(field_mean(p.v0)) <= 1e-14 * 0.01);
    // single mode: H2-type weight (1 + (2 pi)^2)^2 / 2 on the amplitude
    const double expect_amp = 0.01 / std::sqrt(std::pow(1.0 + 4.0 * M_PI * M_PI, 2.0) / 2.0);
    double sup = 0.0;
    for (double v : p.v0.v) sup = std::max(sup, std::abs(v));
    CHECK(sup == doctest::Approx(expect_amp).epsilon(1e-10));
    CHECK(p.epsilon == doctest::Approx(surrogate_norm(p.v0, g)).epsilon(1e-10));
}

TEST_CASE("two-mode surrogate norm equals the weighted coefficient sum") {
    const TorusGrid g = unit_grid(32, 32);
    ModeMap m;
    m[key(1, 0)] = 1.0;
    m[key(0, 2)] = 0.5;
    const PeriodicPerturbation p = make_perturbation(g, m, 0.02);
    // coefficient oracle: cos(k.x) with amplitude a contributes
    // (1+|kappa|^2)^2 a^2/2 to the squared norm
    const double w1 = std::pow(1.0 + 4.0 * M_PI * M_PI, 2.0);
    const double w2 = std::pow(1.0 + 16.0 * M_PI * M_PI, 2.0);
    // the scale s solves s^2 (w1  1^2 + w2 0.25)/2 = eps^2
    const double s = 0.02 / std::sqrt((w1 + 0.25 * w2) / 2.0);
    double sup_err = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const double expect = s * (std::cos(2.0 * M_PI * i / 32.0) +
                                       0.5 * std::cos(2.0 * M_PI * 2.0 * j / 32.0));
            sup_err = std::max(sup_err, std::abs(p.v0(i, j) - expect));
        }
    CHECK(sup_err <= 1e-12);
}

TEST_CASE("constant component is rejected") {
    ModeMap m;
    m[key(0, 0)] = 1.0;
    CHECK_THROWS_AS(make_perturbation(unit_grid(), m, 0.01), std::invalid_argument);
}

TEST_CASE("unperturbed cell stays constant") {
    CellRunOptions opt;
    opt.t_end = 0.05;
    const PeriodicPerturbation p = make_perturbation(unit_grid(), {}, 0.0);
    const CellSolution sol =
        solve_cell(1.0, p, FluxKind::Quadratic, TransverseKind::HalfSquare, kA, opt);
    for (const Field& f : sol.tilde)
        for (double v : f.v) CHECK(std::abs(v) <= 1e-15);
}

TEST_CASE("mean conservation and maximum principle over a run") {
    const TorusGrid g = unit_grid(32, 32);
    ModeMap m;
    m[key(1, 0)] = 1.0;
    m[key(0, 1)] = 0.7;
    const PeriodicPerturbation p = make_perturbation(g, m, 0.01);
    CellRunOptions opt;
    opt.t_end = 0.3;
    opt.snapshot_dt_min = 0.01;
    const CellSolution sol =
        solve_cell(1.0, p, FluxKind::Quadratic, TransverseKind::HalfSquare, kA, opt);
    double sup0 = sol.sup_norm.front();
    for (size_t s = 0; s < sol.times.size(); ++s) {
        CHECK(sol.mean_abs[s] <= 1e-12);
        // range containment (discrete maximum principle up to round-off)
        double mx = 0.0;
        for (double v : sol.tilde[s].v) mx = std::max(mx, std::abs(v));
        CHECK(mx <= sup0 + 1e-8);
    }
    // sup norm non-increasing beyond the first few steps
    for (size_t s = 2; s + 1 < sol.times.size(); ++s)
        CHECK(sol.sup_norm[s + 1] <= sol.sup_norm[s] * (1.0 + 1e-10));
}

TEST_CASE("linear regime decays at the dispersion rate") {
    const TorusGrid g = unit_grid(8, 64);
    ModeMap m;
    m[key(0, 1)] = 1.0;
    const PeriodicPerturbation p = make_perturbation(g, m, 1e-3);
    CellRunOptions opt;
    opt.t_end = 0.3;
    opt.snapshot_dt_min = 0.004;
    opt.snapshot_growth = 1.0;
    opt.snapshot_dt_max = 0.004;
    const CellSolution sol =
        solve_cell(1.0, p, FluxKind::Quadratic, TransverseKind::HalfSquare, kA, opt);
    const CellDecay d = cell_decay_rate(sol, 0.04, 0.25);
    const double expected = dispersion_rate(kA, key(0, 1), g.periods);
    CHECK(expected == doctest::Approx(4.0 * M_PI * M_PI));
    REQUIRE(d.sup_fit.status == FitStatus::Ok);
    CHECK(d.sup_fit.r2 >= 0.99);
    CHECK(std::abs(d.sup_fit.rate - expected) / expected <= 0.05);
    CHECK(d.grad_fit.rate > 0.0);
}

TEST_CASE("x1 modes on a long cell decay at the slow rate") {
    const TorusGrid g = make_torus_grid(2, {64, 8}, {25.0, 1.0});
    ModeMap m;
    m[key(1, 0)] = 1.0;
    const PeriodicPerturbation p = make_perturbation(g, m, 1e-3);
    CellRunOptions opt;
    opt.t_end = 30.0;
    opt.snapshot_dt_min = 0.25;
    opt.snapshot_growth = 1.0;
    opt.snapshot_dt_max = 0.25;
    const CellSolution sol =
        solve_cell(1.0, p, FluxKind::Quadratic, TransverseKind::HalfSquare, kA, opt);
    const CellDecay d = cell_decay_rate(sol, 2.0, 28.0);
    const double expected = dispersion_rate(kA, key(1, 0), g.periods);
    CHECK(expected == doctest::Approx(4.0 * M_PI * M_PI / 625.0));
    REQUIRE(d.sup_fit.status == FitStatus::Ok);
    CHECK(std::abs(d.sup_fit.rate - expected) / expected <= 0.05);
}

TEST_CASE("refining the grid moves the fitted rate by under 2 percent") {
    ModeMap m;
    m[key(0, 1)] = 1.0;
    std::array<double, 2> rates{};
    int idx = 0;
    for (int n2 : {32, 64}) {
        const TorusGrid g = unit_grid(8, n2);
        const PeriodicPerturbation p = make_perturbation(g, m, 1e-3);
        CellRunOptions opt;
        opt.t_end = 0.25;
        opt.snapshot_dt_min = 0.004;
        opt.snapshot_growth = 1.0;
        opt.snapshot_dt_max = 0.004;
        const CellSolution sol =
            solve_cell(1.0, p, FluxKind::Quadratic, TransverseKind::HalfSquare, kA, opt);
        rates[idx++] = cell_decay_rate(sol, 0.04, 0.2).sup_fit.rate;
    }
    CHECK(std::abs(rates[1] - rates[0]) / rates[1] <= 0.02);
}

TEST_CASE("three-dimensional cell with full cross coupling") {
    const TorusGrid g = make_torus_grid(3, {12, 24, 24}, {1.0, 1.0, 1.0});
    const DiffusionMatrix A3 =
        make_diffusion(3, {1.0, 0.1, 0.05, 0.1, 1.0, 0.1, 0.05, 0.1, 1.0});
    ModeMap m;
    m[key(0, 1, 1)] = 1.0;
    const PeriodicPerturbation p = make_perturbation(g, m, 1e-3);
    CellRunOptions opt;
    opt.t_end = 0.1;
    opt.snapshot_dt_min = 0.002;
    opt.snapshot_growth = 1.0;
    opt.snapshot_dt_max = 0.002;
    const CellSolution sol =
        solve_cell(0.5, p, FluxKind::Quadratic, TransverseKind::HalfSquare, A3, opt);
    const CellDecay d = cell_decay_rate(sol, 0.02, 0.09);
    const double expected = dispersion_rate(A3, key(0, 1, 1), g.periods);
    // rate (2 pi)^2 (a22 + a33 + 2 a23)
    CHECK(expected == doctest::Approx(4.0 * M_PI * M_PI * 2.2));
    REQUIRE(d.sup_fit.status == FitStatus::Ok);
    CHECK(std::abs(d.sup_fit.rate - expected) / expected <= 0.05);
    CHECK(d.max_mean_abs <= 1e-12);
}

TEST_CASE("oversized steps trip the instability guard") {
    const TorusGrid g = unit_grid(16, 16);
    ModeMap m;
    m[key(1, 1)] = 1.0;
    const PeriodicPerturbation p = make_perturbation(g, m, 0.01);
    CellRunOptions opt;
    opt.t_end = 1.0;
    opt.dt_override = 0.05;  // far beyond the diffusive restriction
    CHECK_THROWS_WITH_AS(
        solve_cell(1.0, p, FluxKind::Quadratic, TransverseKind::HalfSquare, kA, opt),
        doctest::Contains("unstable at step"), std::runtime_error);
}

TEST_CASE("decay-rate fit reports the converged marker for zero data") {
    const PeriodicPerturbation p = make_perturbation(unit_grid(), {}, 0.0);
    CellRunOptions opt;
    opt.t_end = 0.05;
    const CellSolution sol =
        solve_cell(1.0, p, FluxKind::Quadratic, TransverseKind::HalfSquare, kA, opt);
    const CellDecay d = cell_decay_rate(sol, 0.0, 0.05);
    CHECK(d.sup_fit.status == FitStatus::ConvergedFloor);
    CHECK(d.grad_fit.status == FitStatus::ConvergedFloor);
}

TEST_CASE("synthetic exponential series recovers its rate exactly") {
    CellSolution sol;
    sol.grid = unit_grid(4, 4);
    sol.background = 1.0;
    for (int i = 0; i <= 20; ++i) {
        sol.times.push_back(0.05 * i);
        sol.sup_norm.push_back(0.7 * std::exp(-3.0 * sol.times.back()));
        sol.grad_sup_norm.push_back(0.9 * std::exp(-3.0 * sol.times.back()));
        sol.mean_abs.push_back(0.0);
        sol.tilde.emplace_back(2, sol.grid.points);
        sol.tilde.back().v[0] = sol.sup_norm.back();
    }
    const CellDecay d = cell_decay_rate(sol, 0.0, 1.0);
    CHECK(d.sup_fit.rate == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(d.grad_fit.rate == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("periodic sampling and time blending") {
    const TorusGrid g = make_torus_grid(2, {64, 8}, {25.0, 1.0});
    Field f(2, g.points);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 8; ++j)
            f(i, j) = std::cos(2.0 * M_PI * g.node(0, i) / 25.0) + 0.1 * j;
    // exact at nodes, including wrapped ones
    CHECK(sample_periodic(f, g, g.node(0, 5) + 50.0, 3, 0) ==
          doctest::Approx(f(5, 3)).epsilon(1e-14));
    // fourth-order accurate off the nodes
    const double mid = 0.5 * (g.node(0, 5) + g.node(0, 6));
    const double exact = std::cos(2.0 * M_PI * mid / 25.0) + 0.1 * 2;
    CHECK(std::abs(sample_periodic(f, g, mid, 2, 0) - exact) <= 5e-6);
}
