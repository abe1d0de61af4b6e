#include <doctest.h>

#include <cmath>
#include <random>

#include "flux.hpp"

using namespace compwave;

TEST_CASE("default flux is the degenerate cubic") {
    const Flux f = make_default_flux();
    CHECK(f.value(-2.0) == 0.0);
    CHECK(f.deriv(-2.0) == 0.0);
    CHECK(f.value(1.0) == doctest::Approx(1.0));
    CHECK(f.deriv(1.0) == doctest::Approx(3.0));
    CHECK(f.branch_inverse(3.0) == doctest::Approx(1.0));
    CHECK(f.value(0.0) == 0.0);
    CHECK(f.deriv(0.0) == 0.0);
}

TEST_CASE("quadratic flux variant") {
    const Flux f = make_flux("quadratic");
    CHECK(f.value(-1.0) == 0.0);
    CHECK(f.value(2.0) == doctest::Approx(2.0));
    CHECK(f.deriv(2.0) == doctest::Approx(2.0));
    CHECK(f.second(0.5) == doctest::Approx(1.0));
    CHECK(f.branch_inverse(0.7) == doctest::Approx(0.7));
    CHECK_THROWS_AS(make_flux("unknown"), std::invalid_argument);
}

TEST_CASE("flux validation accepts the built-ins") {
    for (const char* label : {"cubic", "quadratic"}) {
        const FluxValidation rep = validate_flux(make_flux(label), -2.0, 2.0, 1000);
        CHECK(rep.all_passed());
    }
}

TEST_CASE("flux validation flags a flux that misses the flat branch") {
    // u^2 on the whole line, so f(-1) = 1 instead of 0
    Flux f;
    f.value = [](double u) { return u * u; };
    f.deriv = [](double u) { return 2.0 * u; };
    f.second = [](double) { return 2.0; };
    f.branch_inverse = [](double s) { return 0.5 * s; };
    const FluxValidation rep = validate_flux(f, -2.0, 2.0, 1000);
    CHECK_FALSE(rep.all_passed());
    bool neg_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "vanishing on negative axis") neg_failed = !c.passed;
    CHECK(neg_failed);
}

TEST_CASE("inverse consistency on a coarse positive sample") {
    const Flux f = make_default_flux();
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double u = 1e-3 + i * (1.0 - 1e-3) / 4.0;
        worst = std::max(worst, std::abs(f.branch_inverse(f.deriv(u)) - u) / u);
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("curvature sign and inverse monotonicity") {
    const Flux f = make_default_flux();
    double prev = -1.0;
    for (int i = 0; i <= 400; ++i) {
        const double u = -2.0 + 4.0 * i / 400.0;
        CHECK(f.second(u) * u >= 0.0);
        const double s = f.deriv(std::max(u, 0.0));
        const double inv = f.branch_inverse(s);
        if (u > 0.0) CHECK(inv >= prev);
        prev = inv;
    }
}

TEST_CASE("diffusion lower bound on small matrices") {
    CHECK(diffusion_lower_bound(make_diffusion(2, {1, 0, 0, 1})) == doctest::Approx(1.0));
    CHECK(diffusion_lower_bound(make_diffusion(2, {1, 0.1, 0.1, 1})) == doctest::Approx(0.9));
    CHECK(diffusion_lower_bound(make_diffusion(2, {1, 0.4, 0.0, 1})) == doctest::Approx(0.8));
    CHECK_THROWS_AS(diffusion_lower_bound(make_diffusion(2, {1, 3, 3, 1})),
                    std::invalid_argument);
    CHECK_THROWS_AS(diffusion_lower_bound(make_diffusion(2, {-1, 0, 0, -1})),
                    std::invalid_argument);
}

TEST_CASE("lower bound ignores antisymmetric parts") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-0.2, 0.2);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> sym{1.0, uni(rng), 0.0, 1.0};
        sym[2] = sym[1];
        const double c = uni(rng);
        std::vector<double> skewed = sym;
        skewed[1] += c;
        skewed[2] -= c;
        const double b0 = diffusion_lower_bound(make_diffusion(2, sym));
        const double b1 = diffusion_lower_bound(make_diffusion(2, skewed));
        CHECK(b1 == doctest::Approx(b0).epsilon(1e-12));
    }
}

TEST_CASE("3x3 symmetric eigenvalue sanity") {
    // diag(3, 1, 2) in a rotated basis stays at 1
    const std::vector<double> m{2.0, 0.5, 0.0, 0.5, 2.0, 0.5, 0.0, 0.5, 2.0};
    const double lo = min_symmetric_eigenvalue(m, 3);
    CHECK(lo == doctest::Approx(2.0 - 0.5 * std::sqrt(2.0)));
}
