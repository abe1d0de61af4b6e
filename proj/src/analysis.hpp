#pragma once

#include <limits>
#include <string>
#include <vector>

#include "field.hpp"

namespace compwave {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

// Transverse average per x1 line.  Transverse quadrature weights are the
// exact uniform ones (they sum to 1).
std::vector<double> zero_mode(const Field& f);

// f minus its transverse average; the transverse mean of the result
// vanishes line by line.
Field nonzero_mode(const Field& f);

// L^p norm over the channel domain: x1 weights supplied by the caller
// (trapezoid on the channel, uniform on a torus), transverse weights 1/N.
// p = kInfNorm returns max |f|.
double lp_norm(const Field& f, double p, const std::vector<double>& x1_weights);

// 1-d norm over an x1 profile with the given weights.
double lp_norm_line(const std::vector<double>& line, double p,
                    const std::vector<double>& x1_weights);

// Energy split by the sign regions of the background and the perturbed
// state, each weighted by the slope of the composite wave (positive), so
// every part is nonnegative.
struct RegionEnergy {
    double region1 = 0.0;  // ubar+phi > 0, ubar > 0 : |phi|^2
    double region2 = 0.0;  // ubar+phi > 0, ubar <= 0: (ubar+phi)^2
    double region3 = 0.0;  // ubar+phi <= 0, ubar > 0: ubar^2
    double total() const { return region1 + region2 + region3; }
};

RegionEnergy weighted_region_energy(const Field& phi, const Field& ubar,
                                    const std::vector<double>& duhat_line,
                                    const std::vector<double>& x1_weights);

enum class FitStatus { Ok, ConvergedFloor, Degenerate };

struct SeriesFit {
    FitStatus status = FitStatus::Degenerate;
    double slope = 0.0;       // power: exponent of (1+t); exponential: d log v / dt
    double rate = 0.0;        // exponential fits: -slope (positive when decaying)
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double r2 = 0.0;
    int npoints = 0;
    double window_lo = 0.0, window_hi = 0.0;
};

// Least squares of log(value) against log(1+t) over the window.
SeriesFit fit_power(const std::vector<double>& t, const std::vector<double>& value,
                    double window_lo, double window_hi);

// Least squares of log(value) against t over the window.
SeriesFit fit_exponential(const std::vector<double>& t, const std::vector<double>& value,
                          double window_lo, double window_hi);

// True when every window value sits below the floor; such series are
// reported as already converged instead of being fitted.
bool series_at_floor(const std::vector<double>& value, double floor);

}  // namespace compwave
