#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace compwave {

// Scalar flux in the x1 direction.  The model class is degenerate: the flux
// vanishes identically on the negative half-line and is strictly convex on
// the positive one, so the profile attached to the flat part is a diffusion
// wave and the convex part carries a rarefaction fan.
enum class FluxKind {
    Quadratic,  // u^2/2 on u >= 0, 0 otherwise
    Cubic,      // u^3 on u >= 0, 0 otherwise
    Zero,       // identically 0 (solver verification only)
};

struct Flux {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::function<double(double)> second;
    // Inverse of deriv restricted to u >= 0.
    std::function<double(double)> branch_inverse;
    std::string label;
    FluxKind kind = FluxKind::Quadratic;
};

// Transverse fluxes f_i, i = 2..n.  Only smoothness is assumed.
enum class TransverseKind {
    HalfSquare,  // u^2/2
    Zero,
};

struct TransverseFlux {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::function<double(double)> second;
    TransverseKind kind = TransverseKind::HalfSquare;
};

struct TransverseFluxSet {
    std::vector<TransverseFlux> f;  // size n-1
};

// u^3-type flux: curvature vanishes at the origin (C^2 across it).
Flux make_default_flux();
// Flux by label: "quadratic" (one-sided curvature bounded below; the sharp
// fan decay rates require this) or "cubic" (make_default_flux), or "zero".
Flux make_flux(const std::string& label);

TransverseFluxSet make_transverse(int n, TransverseKind kind = TransverseKind::HalfSquare);

struct FluxCheck {
    std::string name;
    bool passed = false;
    double worst = 0.0;      // worst violation magnitude
    double worst_at = 0.0;   // sample u where it occurred
};

struct FluxValidation {
    std::vector<FluxCheck> checks;
    bool all_passed() const;
};

// Sampling-based validation of the structural assumptions; reports rather
// than aborts so user-supplied fluxes can be inspected.
FluxValidation validate_flux(const Flux& flux, double u_lo, double u_hi, int samples);

// Constant viscosity matrix.  Admissibility means the symmetric part is
// positive definite; the stored lower bound b is its minimal eigenvalue.
struct DiffusionMatrix {
    int n = 0;
    std::vector<double> a;  // row-major n x n

    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double a11() const { return at(0, 0); }
    double trace() const;
};

DiffusionMatrix make_diffusion(int n, const std::vector<double>& entries);

// Minimal eigenvalue of (A + A^T)/2; throws std::invalid_argument when the
// symmetric part is not positive definite or a11 <= 0.
double diffusion_lower_bound(const DiffusionMatrix& A);

// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi; n is small).
double min_symmetric_eigenvalue(const std::vector<double>& sym, int n);

}  // namespace compwave
