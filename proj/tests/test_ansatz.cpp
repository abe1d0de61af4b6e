#include <doctest.h>

#include <cmath>

#include "ansatz.hpp"

using namespace compwave;

namespace {

struct Fixture {
    ProfileSet profiles{{-1.0, 1.0}, make_flux("quadratic"), 1.0};
    DiffusionMatrix A = make_diffusion(2, {1.0, 0.1, 0.1, 1.0});
    TransverseFluxSet tset = make_transverse(2);
    TorusGrid cgrid = make_torus_grid(2, {48, 16}, {1.0, 1.0});
    CellSolution cm, cp;

    Fixture() {
        ModeMap modes;
        ModeKey k11, k01;
        k11.k[0] = 1;
        k11.k[1] = 1;
        k01.k[1] = 1;
        modes[k11] = 1.0;
        modes[k01] = 0.8;
        PeriodicPerturbation pert = make_perturbation(cgrid, modes, 0.02);
        CellRunOptions opt;
        opt.t_end = 0.15;
        opt.snapshot_dt_min = 0.002;
        opt.snapshot_growth = 1.0;
        opt.snapshot_dt_max = 0.002;
        cm = solve_cell(-1.0, pert, FluxKind::Quadratic, TransverseKind::HalfSquare, A, opt);
        cp = solve_cell(1.0, pert, FluxKind::Quadratic, TransverseKind::HalfSquare, A, opt);
    }

    AnsatzInputs inputs() { return {&profiles, &cm, &cp}; }
    AnsatzInputs profile_only() { return {&profiles, nullptr, nullptr}; }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

const LineGrid kLine{-28.0, 0.25, 177};  // [-28, 16]

}  // namespace

TEST_CASE("weight: midpoint, limits, monotonicity, derivatives") {
    const ProfileSet& pr = fixture().profiles;
    for (double t : {0.0, 4.0, 60.0}) {
        CHECK(eta_weight(0.0, t, pr) == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(eta_weight(-1e4, t, pr) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(eta_weight(1e4, t, pr) == doctest::Approx(1.0).epsilon(1e-14));
        double prev = -1.0;
        for (int i = 0; i <= 2000; ++i) {
            const double x = -40.0 + 80.0 * i / 2000.0;
            const double e = eta_weight(x, t, pr);
            CHECK(e >= prev - 1e-14);
            CHECK(e >= 0.0);
            CHECK(e <= 1.0);
            prev = e;
        }
    }
    // analytic derivatives against centered differences
    for (double t : {0.5, 7.0})
        for (double x : {-3.0, 0.0, 2.5}) {
            const EtaDerivs e = eta_derivs(x, t, pr);
            const double h = 1e-5;
            const double fdx = (eta_weight(x + h, t, pr) - eta_weight(x - h, t, pr)) / (2 * h);
            const double fdxx = (eta_weight(x + h, t, pr) - 2 * e.value +
                                 eta_weight(x - h, t, pr)) / (h * h);
            const double fdt = (eta_derivs(x, t + h, pr).value -
                                eta_derivs(x, t - h, pr).value) / (2 * h);
            CHECK(e.dx == doctest::Approx(fdx).epsilon(1e-6));
            CHECK(e.dxx == doctest::Approx(fdxx).epsilon(1e-4));
            CHECK(e.dt == doctest::Approx(fdt).epsilon(1e-6));
        }
}

TEST_CASE("without periodic fields the background is the composite wave") {
    Fixture& fx = fixture();
    AnsatzInputs in = fx.profile_only();
    const AnsatzState st = build_ansatz(in, 0.4, kLine, {0, 16, 1});
    CHECK(st.cells_zero);
    for (int i = 0; i < st.shape[0]; ++i)
        for (int j = 0; j < st.shape[1]; ++j)
            CHECK(st.ubar(i, j) == doctest::Approx(st.uhat[i]).epsilon(1e-15));
}

TEST_CASE("background assembly: far field, bound, periodic sampling") {
    Fixture& fx = fixture();
    AnsatzInputs in = fx.inputs();
    const double t = 0.05;
    const AnsatzState st = build_ansatz(in, t, kLine, {0, 16, 1});
    REQUIRE_FALSE(st.cells_zero);

    // far left: ubar == u_- + tilde_- up to the composite-wave tail
    for (int j = 0; j < 16; ++j) {
        const double expect = -1.0 + st.tminus(0, j);
        CHECK(st.ubar(0, j) == doctest::Approx(expect).epsilon(1e-6));
    }
    // |ubar - uhat| <= sup|tilde_-| + sup|tilde_+| pointwise
    double supm = 0.0, supp = 0.0;
    for (double v : st.tminus.v) supm = std::max(supm, std::abs(v));
    for (double v : st.tplus.v) supp = std::max(supp, std::abs(v));
    for (int i = 0; i < st.shape[0]; ++i)
        for (int j = 0; j < 16; ++j)
            CHECK(std::abs(st.ubar(i, j) - st.uhat[i]) <= supm + supp + 1e-14);

    // sampled periodic fields reproduce the snapshot values at matching nodes
    const int snap = fx.cm.snapshot_at_or_before(t);
    if (std::abs(fx.cm.times[snap] - t) < 1e-9) {
        const double x = fx.cm.grid.node(0, 5);
        int i_line = static_cast<int>(std::round((x - kLine.lo) / kLine.h));
        (void)i_line;
        CHECK(sample_periodic(fx.cm.tilde[snap], fx.cm.grid, x + 3.0, 4, 0) ==
              doctest::Approx(fx.cm.tilde[snap](5, 4)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(build_ansatz(in, t, LineGrid{-5.0, 0.25, 41}, {0, 16, 1}),
                    std::invalid_argument);
}

TEST_CASE("interaction term in the flat-contact and flat-fan limits") {
    // contact off: N reduces to the viscosity mismatch of the fan
    const ProfileSet no_contact({0.0, 1.0}, make_flux("quadratic"), 1.0);
    for (double x : {0.3, 1.2, 4.0}) {
        const double n = interaction_N(x, 2.0, no_contact);
        CHECK(n == doctest::Approx(no_contact.rarefaction_dxx(x, 2.0)).epsilon(1e-12));
        CHECK(interaction_term(x, 2.0, no_contact) == doctest::Approx(-n).epsilon(1e-12));
    }
    // fan off: the degenerate branch annihilates the contact transport
    const ProfileSet no_fan({-1.0, 0.0}, make_flux("quadratic"), 1.0);
    for (double x : {-2.0, 0.0, 3.0})
        CHECK(interaction_N(x, 2.0, no_fan) == 0.0);
}

TEST_CASE("interaction term against a term-by-term difference oracle") {
    const ProfileSet& pr = fixture().profiles;
    const Flux f = make_flux("quadratic");
    const double t = 100.0;
    const InterfaceCurve c = interface_curve({t}, pr);
    REQUIRE(c.samples[0].found);
    for (double x : {c.samples[0].x, 5.0, 20.0}) {
        const double h = 1e-4 * (1.0 + t);
        auto uc = [&](double xx) { return pr.contact(xx, t).u; };
        auto ur = [&](double xx) { return pr.rarefaction(xx, t).u; };
        const double dur = (ur(x + h) - ur(x - h)) / (2 * h);
        const double duc = (uc(x + h) - uc(x - h)) / (2 * h);
        const double d2ur = (ur(x + h) - 2 * ur(x) + ur(x - h)) / (h * h);
        const double fd_N = pr.a11() * d2ur -
                            (f.deriv(uc(x) + ur(x)) - f.deriv(ur(x))) * dur -
                            f.deriv(uc(x) + ur(x)) * duc;
        const double scale = std::max(std::abs(fd_N), 1e-6);
        CHECK(std::abs(interaction_N(x, t, pr) - fd_N) / scale < 1e-3);
    }
}

TEST_CASE("source without perturbation is the pure interaction part") {
    Fixture& fx = fixture();
    AnsatzInputs in = fx.profile_only();
    const AnsatzState st = build_ansatz(in, 0.4, kLine, {0, 16, 1});
    const SourceField sf = compute_source(st, fx.tset, fx.A);
    for (double v : sf.j1.v) CHECK(v == 0.0);
    CHECK(sf.l1 > 0.0);
    for (int i = 0; i < st.shape[0]; ++i)
        CHECK(sf.j2_line[i] == doctest::Approx(interaction_term(kLine.x(i), 0.4, fx.profiles))
                                   .epsilon(1e-12));
}

TEST_CASE("source splits consistently: independent regrouping to round-off") {
    Fixture& fx = fixture();
    AnsatzInputs in = fx.inputs();
    const double t = 0.05;
    const AnsatzState st = build_ansatz(in, t, kLine, {0, 16, 1});
    const SourceField sf = compute_source(st, fx.tset, fx.A);
    const Field whole = source_whole_route(in, st, fx.tset, fx.A);
    double worst = 0.0;
    for (int i = 0; i < st.shape[0]; ++i)
        for (int j = 0; j < 16; ++j)
            worst = std::max(worst, std::abs(whole(i, j) - sf.j(i, j, 0)));
    CHECK(worst <= 1e-9);
}

TEST_CASE("background equation residual shrinks at second order") {
    // two refinement levels with the periodic fields re-solved per level
    Fixture& fx = fixture();
    double res[2];
    for (int level = 0; level < 2; ++level) {
        const int mult = 1 << level;
        TorusGrid cg = make_torus_grid(2, {32 * mult, 8 * mult}, {1.0, 1.0});
        ModeMap modes;
        ModeKey k11, k01;
        k11.k[0] = 1;
        k11.k[1] = 1;
        k01.k[1] = 1;
        modes[k11] = 1.0;
        modes[k01] = 0.8;
        PeriodicPerturbation pert = make_perturbation(cg, modes, 0.02);
        CellRunOptions opt;
        opt.t_end = 0.1;
        opt.snapshot_dt_min = 0.002;
        opt.snapshot_growth = 1.0;
        opt.snapshot_dt_max = 0.002;
        CellSolution cm =
            solve_cell(-1.0, pert, FluxKind::Quadratic, TransverseKind::HalfSquare, fx.A, opt);
        CellSolution cp =
            solve_cell(1.0, pert, FluxKind::Quadratic, TransverseKind::HalfSquare, fx.A, opt);
        AnsatzInputs in{&fx.profiles, &cm, &cp};
        const int n1 = 128 * mult;
        const LineGrid line{-28.0, 44.0 / (n1 - 1), n1};
        const ResidualNorms rn = ansatz_residual(in, 0.06, 0.016 / mult, line,
                                                 {0, 8 * mult, 1}, fx.tset, fx.A);
        res[level] = rn.l1;
    }
    CHECK(std::log2(res[0] / res[1]) >= 1.6);
}

TEST_CASE("pure composite-wave residual also shrinks at second order") {
    Fixture& fx = fixture();
    AnsatzInputs in = fx.profile_only();
    double res[2];
    for (int level = 0; level < 2; ++level) {
        const int mult = 1 << level;
        const int n1 = 128 * mult;
        const LineGrid line{-28.0, 44.0 / (n1 - 1), n1};
        const ResidualNorms rn = ansatz_residual(in, 0.06, 0.016 / mult, line,
                                                 {0, 8, 1}, fx.tset, fx.A);
        res[level] = rn.l1;
    }
    CHECK(std::log2(res[0] / res[1]) >= 1.6);
}

TEST_CASE("corner coupling enters both cross sums") {
    // The (1,1) coupling appears once in each cross sum of the source.
    // Dropping one copy leaves exactly a11 eta' d(tp - tm)/dx1 behind,
    // which the independent regrouping pins down: only the double-counted
    // form matches it to round-off.
    Fixture& fx = fixture();
    AnsatzInputs in = fx.inputs();
    const double t = 0.05;
    const AnsatzState st = build_ansatz(in, t, kLine, {0, 16, 1});
    SourceOptions merged;
    merged.merge_cross_corner = true;
    const SourceField keep = compute_source(st, fx.tset, fx.A);
    const SourceField drop = compute_source(st, fx.tset, fx.A, merged);
    const Field whole = source_whole_route(in, st, fx.tset, fx.A);
    double gap_keep = 0.0, gap_drop = 0.0, expected_defect = 0.0;
    for (int i = 0; i < st.shape[0]; ++i)
        for (int j = 0; j < 16; ++j) {
            gap_keep = std::max(gap_keep, std::abs(whole(i, j) - keep.j(i, j, 0)));
            gap_drop = std::max(gap_drop, std::abs(whole(i, j) - drop.j(i, j, 0)));
            expected_defect = std::max(
                expected_defect, std::abs(fx.A.at(0, 0) * st.deta[i] *
                                          (st.dplus[0](i, j) - st.dminus[0](i, j))));
        }
    CHECK(gap_keep <= 1e-10);
    CHECK(gap_drop == doctest::Approx(expected_defect).epsilon(1e-6));
    CHECK(gap_drop > 100.0 * std::max(gap_keep, 1e-13));
    // and the residual never improves under the merged form
    const int n1 = 256;
    const LineGrid line{-28.0, 44.0 / (n1 - 1), n1};
    const ResidualNorms rk = ansatz_residual(in, t, 0.008, line, {0, 16, 1}, fx.tset, fx.A);
    const ResidualNorms rd =
        ansatz_residual(in, t, 0.008, line, {0, 16, 1}, fx.tset, fx.A, merged);
    CHECK(rd.l1 >= rk.l1 * (1.0 - 1e-9));
}
