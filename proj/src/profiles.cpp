#include "profiles.hpp"

#include <cmath>
#include <stdexcept>

namespace compwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Monotone tanh data for the auxiliary problem, with overflow-safe tails.
struct TanhData {
    double mid, half;
    TanhData(double wm, double wp) : mid(0.5 * (wp + wm)), half(0.5 * (wp - wm)) {}
    double value(double y) const { return mid + half * std::tanh(y); }
    double deriv(double y) const {
        const double s = std::exp(-2.0 * std::abs(y));
        const double sech2 = 4.0 * s / ((1.0 + s) * (1.0 + s));
        return half * sech2;
    }
};

double linreg_slope(const std::vector<double>& x, const std::vector<double>& y,
                    double* intercept = nullptr) {
    const size_t n = x.size();
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double b = sxy / sxx;
    if (intercept) *intercept = my - b * mx;
    return b;
}

}  // namespace

double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double tol) {
    // Trapezoid doubling with one Richardson level (Simpson equivalent);
    // every sample is reused, so the cost is bounded even on integrands
    // with absolute-value kinks.
    double trap = 0.5 * (b - a) * (f(a) + f(b));
    double simpson_prev = trap;
    long n = 1;
    for (int level = 1; level <= 17; ++level) {
        n *= 2;
        const double h = (b - a) / static_cast<double>(n);
        double add = 0.0;
        for (long i = 1; i < n; i += 2) add += f(a + i * h);
        const double trap_prev = trap;
        trap = 0.5 * trap + h * add;
        const double s = (4.0 * trap - trap_prev) / 3.0;
        if (level >= 6 &&
            std::abs(s - simpson_prev) <= tol * std::max(std::abs(s), 1e-300))
            return s + (s - simpson_prev) / 15.0;
        simpson_prev = s;
    }
    return simpson_prev;
}

double burgers_profile(double x1, double t, double w_minus, double w_plus) {
    if (t < 0.0) throw std::invalid_argument("burgers_profile: t must be >= 0");
    if (w_minus >= w_plus) throw std::invalid_argument("burgers_profile: need w_minus < w_plus");
    const TanhData w0(w_minus, w_plus);
    if (t == 0.0) return w0.value(x1);
    const double span = w_plus - w_minus;
    // Far-field shortcut: when the straight characteristic from either
    // state already sits deep in a saturated tail, the root is that state.
    if (x1 - w_plus * t >= 38.0) return w0.value(x1 - w_plus * t);
    if (x1 - w_minus * t <= -38.0) return w0.value(x1 - w_minus * t);
    // g(w) = w - w0(x1 - w t) is strictly increasing; safeguarded Newton
    // on [w-, w+], falling back to bisection whenever the step leaves the
    // bracket or fails to halve the previous one.
    double lo = w_minus, hi = w_plus;
    double w = 0.5 * (lo + hi);
    double dx = span, dxold = span;
    for (int iter = 0; iter < 200; ++iter) {
        const double y = x1 - w * t;
        const double g = w - w0.value(y);
        if (g == 0.0) break;
        if (g > 0.0) hi = w; else lo = w;
        const double gp = 1.0 + t * w0.deriv(y);
        const bool newton_bad = ((w - hi) * gp - g) * ((w - lo) * gp - g) > 0.0 ||
                                std::abs(2.0 * g) > std::abs(dxold * gp);
        dxold = dx;
        if (newton_bad) {
            dx = 0.5 * (hi - lo);
            w = lo + dx;
        } else {
            dx = g / gp;
            w -= dx;
        }
        if (std::abs(dx) <= 1e-15 * span || hi - lo <= 1e-15 * span) break;
    }
    return w;
}

double burgers_profile_dx(double x1, double t, double w_minus, double w_plus) {
    const double w = burgers_profile(x1, t, w_minus, w_plus);
    const TanhData w0(w_minus, w_plus);
    const double d = w0.deriv(x1 - w * t);
    return d / (1.0 + t * d);
}

ProfileValue contact_profile(double x1, double t, double v_minus, double v_plus, double a11) {
    if (a11 <= 0.0) throw std::invalid_argument("contact_profile: a11 must be positive");
    if (t < 0.0) throw std::invalid_argument("contact_profile: t must be >= 0");
    if (v_minus > v_plus) throw std::invalid_argument("contact_profile: need v_minus <= v_plus");
    ProfileValue out;
    if (v_minus == v_plus) {
        out.u = v_minus;
        return out;
    }
    const double den = std::sqrt(4.0 * a11 * (1.0 + t));
    const double xi = x1 / den;
    const double dv = v_plus - v_minus;
    out.u = v_minus + dv * 0.5 * (1.0 + std::erf(xi));
    out.du = dv * std::exp(-xi * xi) / (std::sqrt(kPi) * den);
    return out;
}

double contact_profile_dxx(double x1, double t, double v_minus, double v_plus, double a11) {
    if (v_minus == v_plus) return 0.0;
    const double den = std::sqrt(4.0 * a11 * (1.0 + t));
    const double xi = x1 / den;
    const ProfileValue pv = contact_profile(x1, t, v_minus, v_plus, a11);
    return pv.du * (-2.0 * xi / den);
}

ProfileSet::ProfileSet(WaveEndpoints ends, Flux flux, double a11)
    : ends_(ends), flux_(std::move(flux)), a11_(a11) {
    if (a11 <= 0.0) throw std::invalid_argument("profiles: a11 must be positive");
    if (ends.u_minus > 0.0 || ends.u_plus < 0.0)
        throw std::invalid_argument("profiles: need u_minus <= 0 <= u_plus");
    s_plus_ = flux_.deriv(ends.u_plus);
}

ProfileValue ProfileSet::rarefaction(double x1, double t) const {
    ProfileValue out;
    if (ends_.u_plus == 0.0) return out;  // fan switched off
    const double w = burgers_profile(x1, t, 0.0, s_plus_);
    out.u = flux_.branch_inverse(w);
    const double dw = burgers_profile_dx(x1, t, 0.0, s_plus_);
    const double fpp = flux_.second(out.u);
    out.du = fpp > 0.0 ? dw / fpp : 0.0;
    return out;
}

double ProfileSet::rarefaction_dxx(double x1, double t) const {
    if (ends_.u_plus == 0.0) return 0.0;
    const double h = std::min(1e-4 * (1.0 + t), 0.05);
    auto du = [&](double x) { return rarefaction(x, t).du; };
    const double d1 = (du(x1 + h) - du(x1 - h)) / (2.0 * h);
    const double d2 = (du(x1 + 0.5 * h) - du(x1 - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

ProfileValue ProfileSet::contact(double x1, double t) const {
    return contact_profile(x1, t, ends_.u_minus, 0.0, a11_);
}

double ProfileSet::contact_dxx(double x1, double t) const {
    return contact_profile_dxx(x1, t, ends_.u_minus, 0.0, a11_);
}

double ProfileSet::contact_dt(double x1, double t) const {
    // The profile solves the a11 heat equation in the shifted time.
    return a11_ * contact_dxx(x1, t);
}

double ProfileSet::composite(double x1, double t) const {
    return contact(x1, t).u + rarefaction(x1, t).u;
}

double ProfileSet::composite_dx(double x1, double t) const {
    return contact(x1, t).du + rarefaction(x1, t).du;
}

double ProfileSet::composite_dt(double x1, double t) const {
    const ProfileValue r = rarefaction(x1, t);
    return contact_dt(x1, t) - flux_.deriv(r.u) * r.du;
}

namespace {
// Characteristic parametrization of the fan: x(y) = y + t w0(y).  Every
// layer of the profile has O(1) width in y, so quadrature windows do not
// grow with t.
constexpr double kYCut = 45.0;

double scan_max(const std::function<double(double)>& f, double lo, double hi, int samples) {
    double best = 0.0, ybest = lo;
    for (int i = 0; i <= samples; ++i) {
        const double y = lo + (hi - lo) * i / samples;
        const double v = std::abs(f(y));
        if (v > best) { best = v; ybest = y; }
    }
    const double dy = (hi - lo) / samples;
    double a = ybest - dy, b = ybest + dy;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int i = 0; i < 60; ++i) {
        if (std::abs(f(c)) > std::abs(f(d))) { b = d; } else { a = c; }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return std::max(best, std::abs(f(0.5 * (a + b))));
}
}  // namespace

double ProfileSet::rarefaction_dx_lp(double t, double p) const {
    if (ends_.u_plus == 0.0) return 0.0;
    const TanhData w0(0.0, s_plus_);
    auto du_at = [&](double y) { return rarefaction(y + t * w0.value(y), t).du; };
    if (p == kInfNorm) return scan_max(du_at, -kYCut, kYCut, 4000);
    auto integrand = [&](double y) {
        return std::pow(std::abs(du_at(y)), p) * (1.0 + t * w0.deriv(y));
    };
    return std::pow(adaptive_quadrature(integrand, -kYCut, kYCut, 1e-10), 1.0 / p);
}

double ProfileSet::rarefaction_dxx_lp(double t, double p) const {
    if (ends_.u_plus == 0.0) return 0.0;
    const TanhData w0(0.0, s_plus_);
    auto dxx_at = [&](double y) { return rarefaction_dxx(y + t * w0.value(y), t); };
    if (p == kInfNorm) return scan_max(dxx_at, -kYCut, kYCut, 4000);
    // |dxx|^p has kinks at the sign changes; the fits only need a few
    // digits here, so the tolerance is kept modest.
    auto integrand = [&](double y) {
        return std::pow(std::abs(dxx_at(y)), p) * (1.0 + t * w0.deriv(y));
    };
    return std::pow(adaptive_quadrature(integrand, -kYCut, kYCut, 1e-6), 1.0 / p);
}

double ProfileSet::contact_dx_lp(double t, double p) const {
    if (ends_.u_minus == 0.0) return 0.0;
    const double den = std::sqrt(4.0 * a11_ * (1.0 + t));
    const double peak = -ends_.u_minus / (std::sqrt(kPi) * den);
    if (p == kInfNorm) return peak;
    auto integrand = [&](double xi) {
        return std::pow(peak * std::exp(-xi * xi), p) * den;
    };
    return std::pow(adaptive_quadrature(integrand, -8.5, 8.5, 1e-12), 1.0 / p);
}

double ProfileSet::tail_constant_right(double t, double delta) const {
    const double up = ends_.u_plus;
    const double scale = std::pow(1.0 + t, 1.0 - delta);
    auto ratio = [&](double m) {
        const double u = rarefaction(s_plus_ * t + m, t).u;
        return std::abs(u - up) * scale * std::exp(delta * m);
    };
    return scan_max(ratio, 0.0, 60.0, 1200);
}

double ProfileSet::tail_constant_left(double t, double delta) const {
    const double scale = std::pow(1.0 + t, 1.0 - delta);
    auto ratio = [&](double m) {
        const double u = rarefaction(-m, t).u;
        return std::abs(u) * scale * std::exp(delta * m);
    };
    return scan_max(ratio, 0.0, 60.0, 1200);
}

InterfaceCurve interface_curve(const std::vector<double>& t_samples, const ProfileSet& profiles) {
    InterfaceCurve curve;
    const double range = profiles.endpoints().u_plus - profiles.endpoints().u_minus;
    const double a11 = profiles.a11();
    for (double t : t_samples) {
        InterfacePoint pt;
        pt.t = t;
        pt.bound_lo = std::sqrt(4.0 * a11 * (1.0 + t));
        pt.bound_hi = profiles.lambda_plus() * (1.0 + t);
        double a = 0.0, b = pt.bound_hi + 10.0;
        double fa = profiles.composite(a, t), fb = profiles.composite(b, t);
        if (fa < 0.0 && fb > 0.0) {
            double x = 0.5 * (a + b);
            double dx = b - a, dxold = b - a;
            for (int iter = 0; iter < 300; ++iter) {
                const double fx = profiles.composite(x, t);
                if (std::abs(fx) <= 0.5e-10 * range) break;
                if (fx > 0.0) b = x; else a = x;
                const double dfx = profiles.composite_dx(x, t);
                const bool newton_bad = dfx <= 0.0 ||
                                        ((x - b) * dfx - fx) * ((x - a) * dfx - fx) > 0.0 ||
                                        std::abs(2.0 * fx) > std::abs(dxold * dfx);
                dxold = dx;
                if (newton_bad) {
                    dx = 0.5 * (b - a);
                    x = a + dx;
                } else {
                    dx = fx / dfx;
                    x -= dx;
                }
            }
            pt.found = true;
            pt.x = x;
            pt.residual = std::abs(profiles.composite(x, t));
            pt.bounds_ok = pt.bound_lo <= x && x <= pt.bound_hi;
            const double zeta = x / pt.bound_lo;
            const double gauss_tail = -profiles.endpoints().u_minus * 0.5 * std::erfc(zeta);
            pt.match_residual =
                std::abs(profiles.flux().branch_inverse(x / (1.0 + t)) - gauss_tail);
        }
        curve.samples.push_back(pt);
    }
    for (size_t i = 0; i < curve.samples.size(); ++i) {
        bool from_here = true;
        for (size_t j = i; j < curve.samples.size(); ++j)
            if (!curve.samples[j].found || !curve.samples[j].bounds_ok) { from_here = false; break; }
        if (from_here) { curve.t0 = curve.samples[i].t; break; }
    }
    std::vector<double> ts, rs, lts, zs;
    for (const auto& pt : curve.samples) {
        if (!pt.found) continue;
        ts.push_back(pt.t);
        rs.push_back(pt.match_residual);
        lts.push_back(std::log1p(pt.t));
        zs.push_back(pt.x * pt.x / (4.0 * a11 * (1.0 + pt.t)));
    }
    curve.match_residual_fit = fit_power(ts, rs, 100.0, 1000.0);
    if (zs.size() >= 3) {
        curve.zeta_sq_growth.status = FitStatus::Ok;
        curve.zeta_sq_growth.npoints = static_cast<int>(zs.size());
        curve.zeta_sq_growth.slope = linreg_slope(lts, zs, &curve.zeta_sq_growth.intercept);
    }
    return curve;
}

ProfileRatesReport check_profile_rates(const ProfileSet& profiles,
                                       const std::vector<double>& p_list,
                                       const std::vector<double>& t_grid) {
    ProfileRatesReport rep;
    rep.t_grid = t_grid;
    const double lo = t_grid.front(), hi = t_grid.back();
    for (double p : p_list) {
        RateSeries rdx{p, {}, {}}, rdxx{p, {}, {}}, cdx{p, {}, {}};
        for (double t : t_grid) {
            rdx.value.push_back(profiles.rarefaction_dx_lp(t, p));
            rdxx.value.push_back(profiles.rarefaction_dxx_lp(t, p));
            cdx.value.push_back(profiles.contact_dx_lp(t, p));
        }
        rdx.fit = fit_power(t_grid, rdx.value, lo, hi);
        rdxx.fit = fit_power(t_grid, rdxx.value, lo, hi);
        cdx.fit = fit_power(t_grid, cdx.value, lo, hi);
        rep.rarefaction_dx.push_back(std::move(rdx));
        rep.rarefaction_dxx.push_back(std::move(rdxx));
        rep.contact_dx.push_back(std::move(cdx));
    }
    for (double t : t_grid) {
        rep.tail_right.push_back(profiles.tail_constant_right(t, 0.5));
        rep.tail_left.push_back(profiles.tail_constant_left(t, 0.5));
    }
    rep.tail_right_trend = fit_power(t_grid, rep.tail_right, lo, hi);
    rep.tail_left_trend = fit_power(t_grid, rep.tail_left, lo, hi);
    return rep;
}

}  // namespace compwave
