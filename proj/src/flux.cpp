#include "flux.hpp"

#include <algorithm>
#include <cmath>

namespace compwave {

Flux make_default_flux() {
    Flux f;
    f.label = "cubic";
    f.kind = FluxKind::Cubic;
    f.value = [](double u) { return u > 0.0 ? u * u * u : 0.0; };
    f.deriv = [](double u) { return u > 0.0 ? 3.0 * u * u : 0.0; };
    f.second = [](double u) { return u > 0.0 ? 6.0 * u : 0.0; };
    f.branch_inverse = [](double s) { return std::sqrt(std::max(s, 0.0) / 3.0); };
    return f;
}

Flux make_flux(const std::string& label) {
    if (label == "cubic") return make_default_flux();
    if (label == "quadratic") {
        Flux f;
        f.label = "quadratic";
        f.kind = FluxKind::Quadratic;
        f.value = [](double u) { return u > 0.0 ? 0.5 * u * u : 0.0; };
        f.deriv = [](double u) { return u > 0.0 ? u : 0.0; };
        f.second = [](double u) { return u > 0.0 ? 1.0 : 0.0; };
        f.branch_inverse = [](double s) { return std::max(s, 0.0); };
        return f;
    }
    if (label == "zero") {
        Flux f;
        f.label = "zero";
        f.kind = FluxKind::Zero;
        f.value = [](double) { return 0.0; };
        f.deriv = [](double) { return 0.0; };
        f.second = [](double) { return 0.0; };
        f.branch_inverse = [](double) { return 0.0; };
        return f;
    }
    throw std::invalid_argument("unknown flux label: " + label);
}

TransverseFluxSet make_transverse(int n, TransverseKind kind) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    TransverseFluxSet set;
    for (int i = 2; i <= n; ++i) {
        TransverseFlux tf;
        tf.kind = kind;
        if (kind == TransverseKind::HalfSquare) {
            tf.value = [](double u) { return 0.5 * u * u; };
            tf.deriv = [](double u) { return u; };
            tf.second = [](double) { return 1.0; };
        } else {
            tf.value = [](double) { return 0.0; };
            tf.deriv = [](double) { return 0.0; };
            tf.second = [](double) { return 0.0; };
        }
        set.f.push_back(std::move(tf));
    }
    return set;
}

bool FluxValidation::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const FluxCheck& c) { return c.passed; });
}

FluxValidation validate_flux(const Flux& flux, double u_lo, double u_hi, int samples) {
    if (samples < 2) throw std::invalid_argument("validate_flux: samples must be >= 2");
    FluxValidation report;

    FluxCheck neg{"vanishing on negative axis", true, 0.0, 0.0};
    FluxCheck origin{"f1(0)=0 and f1'(0)=0", true, 0.0, 0.0};
    FluxCheck convex{"f1'' > 0 on u > 0", true, 0.0, 0.0};
    FluxCheck inv{"branch inverse consistency", true, 0.0, 0.0};

    {
        double v = std::abs(flux.value(0.0)) + std::abs(flux.deriv(0.0));
        origin.passed = v == 0.0;
        origin.worst = v;
    }
    const double h = (u_hi - u_lo) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double u = u_lo + i * h;
        if (u < 0.0) {
            double v = std::abs(flux.value(u)) + std::abs(flux.deriv(u));
            if (v > neg.worst) { neg.worst = v; neg.worst_at = u; }
        } else if (u > 0.0) {
            double s = flux.second(u);
            if (s <= 0.0 && -s >= convex.worst) { convex.worst = std::max(-s, 1e-300); convex.worst_at = u; }
            double ui = flux.branch_inverse(flux.deriv(u));
            double rel = std::abs(ui - u) / std::max(std::abs(u), 1e-300);
            if (rel > inv.worst) { inv.worst = rel; inv.worst_at = u; }
        }
    }
    neg.passed = neg.worst == 0.0;
    convex.passed = convex.worst == 0.0;
    inv.passed = inv.worst <= 1e-10;

    report.checks = {neg, origin, convex, inv};
    return report;
}

double DiffusionMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += at(i, i);
    return t;
}

DiffusionMatrix make_diffusion(int n, const std::vector<double>& entries) {
    if (n < 1) throw std::invalid_argument("diffusion matrix: dimension must be >= 1");
    if (entries.size() != static_cast<size_t>(n) * n)
        throw std::invalid_argument("diffusion matrix: need n*n entries");
    DiffusionMatrix A;
    A.n = n;
    A.a = entries;
    return A;
}

double min_symmetric_eigenvalue(const std::vector<double>& sym, int n) {
    std::vector<double> m = sym;
    auto at = [&](int i, int j) -> double& { return m[static_cast<size_t>(i) * n + j]; };
    // Cyclic Jacobi sweeps; plenty for the n <= 3 matrices used here.
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (at(p, q) == 0.0) continue;
                const double theta = 0.5 * std::atan2(2.0 * at(p, q), at(q, q) - at(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    const double mkp = at(k, p), mkq = at(k, q);
                    at(k, p) = c * mkp - s * mkq;
                    at(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = at(p, k), mqk = at(q, k);
                    at(p, k) = c * mpk - s * mqk;
                    at(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    double lo = at(0, 0);
    for (int i = 1; i < n; ++i) lo = std::min(lo, at(i, i));
    return lo;
}

double diffusion_lower_bound(const DiffusionMatrix& A) {
    std::vector<double> sym(static_cast<size_t>(A.n) * A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j)
            sym[static_cast<size_t>(i) * A.n + j] = 0.5 * (A.at(i, j) + A.at(j, i));
    const double b = min_symmetric_eigenvalue(sym, A.n);
    if (b <= 0.0)
        throw std::invalid_argument("inadmissible viscosity matrix: symmetric part not positive definite");
    if (A.a11() <= 0.0)
        throw std::invalid_argument("inadmissible viscosity matrix: a11 must be positive");
    return b;
}

}  // namespace compwave
