#include <doctest.h>

#include <cmath>
#include <random>

#include "analysis.hpp"
#include "field.hpp"

using namespace compwave;

namespace {

Field random_field(std::mt19937_64& rng, int n1, int n2, int n3 = 1) {
    Field f(n3 > 1 ? 3 : 2, {n1, n2, n3});
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (double& v : f.v) v = uni(rng);
    return f;
}

std::vector<double> unit_weights(int n, double h = 1.0) {
    std::vector<double> w(n, h);
    w.front() = w.back() = 0.5 * h;
    return w;
}

}  // namespace

TEST_CASE("transverse average reproduces transverse-constant fields") {
    Field f(2, {16, 8, 1});
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 8; ++j) f(i, j) = std::sin(0.3 * i);
    const std::vector<double> avg = zero_mode(f);
    for (int i = 0; i < 16; ++i) CHECK(avg[i] == doctest::Approx(std::sin(0.3 * i)).epsilon(1e-15));
}

TEST_CASE("pure transverse mode averages to zero") {
    Field f(2, {16, 32, 1});
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 32; ++j) f(i, j) = std::sin(2.0 * M_PI * j / 32.0);
    for (double v : zero_mode(f)) CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("average agrees with a direct double loop") {
    std::mt19937_64 rng(42);
    Field f = random_field(rng, 24, 12, 6);
    const std::vector<double> avg = zero_mode(f);
    for (int i = 0; i < 24; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 12; ++j)
            for (int k = 0; k < 6; ++k) acc += f(i, j, k);
        CHECK(std::abs(avg[i] - acc / 72.0) <= 1e-13);
    }
}

TEST_CASE("projections annihilate each other") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Field f = random_field(rng, 20, 16);
        const Field nz = nonzero_mode(f);
        for (double v : zero_mode(nz)) CHECK(std::abs(v) <= 1e-13);
        // embed the average back and check its non-zero part vanishes
        Field emb(2, f.shape);
        const std::vector<double> avg = zero_mode(f);
        for (int i = 0; i < f.shape[0]; ++i)
            for (int j = 0; j < f.shape[1]; ++j) emb(i, j) = avg[i];
        const Field nz2 = nonzero_mode(emb);
        for (double v : nz2.v) CHECK(std::abs(v) <= 1e-13);
        // idempotence
        const Field nz3 = nonzero_mode(nz);
        for (size_t s = 0; s < nz.size(); ++s)
            CHECK(nz3.v[s] == doctest::Approx(nz.v[s]).epsilon(1e-14));
    }
}

TEST_CASE("norm split across the mode projections") {
    std::mt19937_64 rng(19);
    const std::vector<double> w = unit_weights(40, 0.37);
    for (int trial = 0; trial < 100; ++trial) {
        Field f = random_field(rng, 40, 24);
        const double total = lp_norm(f, 2.0, w);
        const double z = lp_norm_line(zero_mode(f), 2.0, w);
        const double nz = lp_norm(nonzero_mode(f), 2.0, w);
        const double gap = std::abs(total * total - z * z - nz * nz) / (total * total);
        CHECK(gap <= 1e-12);
    }
}

TEST_CASE("norms: bump width, homogeneity, direct sum") {
    const int n1 = 101;
    const double h = 0.01;
    const std::vector<double> w = unit_weights(n1, h);
    Field bump(2, {n1, 4, 1});
    // unit bump over [0.2, 0.5): width 0.3
    for (int i = 20; i < 50; ++i)
        for (int j = 0; j < 4; ++j) bump(i, j) = 1.0;
    for (double p : {1.0, 2.0, 4.0})
        CHECK(lp_norm(bump, p, w) == doctest::Approx(std::pow(0.3, 1.0 / p)).epsilon(0.05));
    CHECK(lp_norm(bump, kInfNorm, w) == 1.0);

    std::mt19937_64 rng(3);
    Field f = random_field(rng, n1, 4);
    Field g = f;
    for (double& v : g.v) v *= -2.5;
    CHECK(lp_norm(g, 2.0, w) == doctest::Approx(2.5 * lp_norm(f, 2.0, w)).epsilon(1e-14));
    double direct = 0.0;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < 4; ++j) direct += w[i] * 0.25 * f(i, j) * f(i, j);
    CHECK(lp_norm(f, 2.0, w) == doctest::Approx(std::sqrt(direct)).epsilon(1e-12));
    CHECK_THROWS_AS(lp_norm(f, 0.5, w), std::invalid_argument);
}

TEST_CASE("region energy: zero, single region, oracle") {
    const int n1 = 32, n2 = 8;
    const std::vector<double> w = unit_weights(n1, 0.2);
    std::vector<double> slope(n1, 0.7);
    Field phi(2, {n1, n2, 1}), ubar(2, {n1, n2, 1});

    RegionEnergy e0 = weighted_region_energy(phi, ubar, slope, w);
    CHECK(e0.total() == 0.0);

    // positive background, small positive bump: only the first region
    for (double& v : ubar.v) v = 0.5;
    for (int j = 0; j < n2; ++j) phi(4, j) = 0.1;
    RegionEnergy e1 = weighted_region_energy(phi, ubar, slope, w);
    CHECK(e1.region2 == 0.0);
    CHECK(e1.region3 == 0.0);
    CHECK(e1.region1 == doctest::Approx(w[4] * 0.7 * 0.01).epsilon(1e-12));

    // mixed signs against a pointwise-classified oracle
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (double& v : ubar.v) v = uni(rng);
    for (double& v : phi.v) v = uni(rng);
    RegionEnergy e2 = weighted_region_energy(phi, ubar, slope, w);
    double r1 = 0, r2 = 0, r3 = 0;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const double b = ubar(i, j), q = ubar(i, j) + phi(i, j);
            const double wt = w[i] * slope[i] / n2;
            if (q > 0 && b > 0) r1 += wt * phi(i, j) * phi(i, j);
            else if (q > 0 && b <= 0) r2 += wt * q * q;
            else if (q <= 0 && b > 0) r3 += wt * b * b;
        }
    CHECK(e2.region1 == doctest::Approx(r1).epsilon(1e-12));
    CHECK(e2.region2 == doctest::Approx(r2).epsilon(1e-12));
    CHECK(e2.region3 == doctest::Approx(r3).epsilon(1e-12));
    CHECK(e2.region1 >= 0.0);
    CHECK(e2.region2 >= 0.0);
    CHECK(e2.region3 >= 0.0);
}

TEST_CASE("power fit on exact and noisy series") {
    std::vector<double> t, v;
    for (int i = 0; i < 30; ++i) {
        t.push_back(1.0 + i * 3.0);
        v.push_back(2.7 * std::pow(1.0 + t.back(), -0.5));
    }
    SeriesFit f = fit_power(t, v, 0.0, 100.0);
    CHECK(f.status == FitStatus::Ok);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f.stderr_slope <= 1e-12);
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> c(t.size(), 4.2);
    SeriesFit fc = fit_power(t, c, 0.0, 100.0);
    CHECK(std::abs(fc.slope) <= 1e-13);

    std::mt19937_64 rng(2024);
    for (double target : {-0.25, -0.5, -0.75, -1.0}) {
        for (int seed = 0; seed < 100; ++seed) {
            std::normal_distribution<double> noise(0.0, 0.01);
            std::vector<double> tv, vv;
            for (int i = 0; i < 40; ++i) {
                const double tt = 10.0 * std::pow(100.0, i / 39.0);
                tv.push_back(tt);
                vv.push_back(std::pow(1.0 + tt, target) * std::exp(noise(rng)));
            }
            SeriesFit nf = fit_power(tv, vv, 0.0, 1e9);
            CHECK(std::abs(nf.slope - target) <= 0.02);
        }
    }
}

TEST_CASE("exponential fit recovers rates and flags degeneracy") {
    std::vector<double> t, v;
    for (int i = 0; i < 20; ++i) {
        t.push_back(0.1 * i);
        v.push_back(std::exp(-2.0 * t.back()));
    }
    SeriesFit f = fit_exponential(t, v, 0.0, 10.0);
    CHECK(f.rate == doctest::Approx(2.0).epsilon(1e-12));
    std::vector<double> c(t.size(), 0.3);
    CHECK(std::abs(fit_exponential(t, c, 0.0, 10.0).rate) <= 1e-13);

    SeriesFit bad = fit_power({1.0, 1.0}, {1.0, 1.0}, 0.0, 2.0);
    CHECK(bad.status == FitStatus::Degenerate);
    // non-positive values refuse to fit
    SeriesFit neg = fit_power({1.0, 2.0, 3.0, 4.0}, {1.0, -1.0, 1.0, 1.0}, 0.0, 5.0);
    CHECK(neg.status == FitStatus::Degenerate);
}

TEST_CASE("floor detection") {
    CHECK(series_at_floor({1e-15, -2e-16, 0.0}, 1e-13));
    CHECK_FALSE(series_at_floor({1e-15, 1e-12}, 1e-13));
}
