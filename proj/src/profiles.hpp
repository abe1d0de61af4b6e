#pragma once

#include <optional>
#include <vector>

#include "analysis.hpp"
#include "flux.hpp"

namespace compwave {

// Solution w(x1, t) of the auxiliary convex problem with monotone tanh data
// connecting w_minus to w_plus, evaluated through the characteristic
// equation w = w0(x1 - w t).  Uniqueness holds because the data increase
// and t >= 0; the root is found by safeguarded bisection with Newton polish
// to relative tolerance 1e-12.
double burgers_profile(double x1, double t, double w_minus, double w_plus);
// Implicit differentiation: w0'(y) / (1 + t w0'(y)) at y = x1 - w t.
double burgers_profile_dx(double x1, double t, double w_minus, double w_plus);

struct ProfileValue {
    double u = 0.0;
    double du = 0.0;  // d/dx1
};

// Error-function diffusion wave connecting v_minus to v_plus, self-similar
// in x1 / sqrt(4 a11 (1+t)).  Equal endpoints give the constant profile.
ProfileValue contact_profile(double x1, double t, double v_minus, double v_plus, double a11);
double contact_profile_dxx(double x1, double t, double v_minus, double v_plus, double a11);

struct WaveEndpoints {
    double u_minus = -1.0;  // < 0
    double u_plus = 1.0;    // > 0
};

// Evaluators for the two planar waves and their superposition.  The
// rarefaction runs from 0 to u_plus, the diffusion wave from u_minus to 0;
// either can be switched off by a zero endpoint (diagnostics only).
class ProfileSet {
public:
    ProfileSet(WaveEndpoints ends, Flux flux, double a11);

    const WaveEndpoints& endpoints() const { return ends_; }
    const Flux& flux() const { return flux_; }
    double a11() const { return a11_; }
    double lambda_plus() const { return s_plus_; }
    double s_plus() const { return s_plus_; }

    ProfileValue rarefaction(double x1, double t) const;
    // Richardson-extrapolated differencing of the analytic first
    // derivative; the step scales with 1+t but is capped so the O(1)-width
    // edge layers stay resolved at late times.
    double rarefaction_dxx(double x1, double t) const;
    ProfileValue contact(double x1, double t) const;
    double contact_dxx(double x1, double t) const;
    double contact_dt(double x1, double t) const;

    double composite(double x1, double t) const;
    double composite_dx(double x1, double t) const;
    double composite_dt(double x1, double t) const;

    // L^p(R) norms in x1 (p = kInfNorm for the sup).  Rarefaction norms
    // integrate in the characteristic parameter where all features have
    // O(1) width; contact norms use the self-similar window.
    double rarefaction_dx_lp(double t, double p) const;
    double rarefaction_dxx_lp(double t, double p) const;
    double contact_dx_lp(double t, double p) const;

    // sup over x of |u^r - u_plus| / ((1+t)^{delta-1} e^{-delta|x - lambda_+ t|})
    // on x >= lambda_+ t, and the mirrored left-state check on x <= 0.
    double tail_constant_right(double t, double delta) const;
    double tail_constant_left(double t, double delta) const;

private:
    WaveEndpoints ends_;
    Flux flux_;
    double a11_;
    double s_plus_ = 0.0;  // flux.deriv(u_plus)
};

struct InterfacePoint {
    double t = 0.0;
    bool found = false;       // bracket [0, lambda_+ (1+t) + 10] contained a root
    double x = 0.0;
    double residual = 0.0;    // |u_hat(X(t), t)|
    double bound_lo = 0.0;    // sqrt(4 a11 (1+t))
    double bound_hi = 0.0;    // lambda_+ (1+t)
    bool bounds_ok = false;
    double match_residual = 0.0;  // |inv(f')(X/(1+t)) - |u_-| (1 - Phi(X / sqrt(4 a11 (1+t))))|
};

struct InterfaceCurve {
    std::vector<InterfacePoint> samples;
    // First sample time from which the two-sided bounds hold for every
    // later sample; empty when they never settle.
    std::optional<double> t0;
    SeriesFit match_residual_fit;  // power fit over [100, 1000]
    SeriesFit zeta_sq_growth;      // X^2/(4 a11 (1+t)) regressed on log(1+t)
};

InterfaceCurve interface_curve(const std::vector<double>& t_samples, const ProfileSet& profiles);

struct RateSeries {
    double p = 0.0;
    std::vector<double> value;
    SeriesFit fit;
};

struct ProfileRatesReport {
    std::vector<double> t_grid;
    std::vector<RateSeries> rarefaction_dx;   // target exponent -1 + 1/p
    std::vector<RateSeries> rarefaction_dxx;  // target exponent -1
    std::vector<RateSeries> contact_dx;       // target exponent -(1/2)(1 - 1/p)
    std::vector<double> tail_right;           // empirical constants at delta = 1/2
    std::vector<double> tail_left;
    SeriesFit tail_right_trend;               // slope ~ 0 when the bound is honored
    SeriesFit tail_left_trend;
};

ProfileRatesReport check_profile_rates(const ProfileSet& profiles,
                                       const std::vector<double>& p_list,
                                       const std::vector<double>& t_grid);

// Adaptive Simpson quadrature (shared by the rate checks).
double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double tol);

}  // namespace compwave
