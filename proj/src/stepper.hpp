#pragma once

#include <array>
#include <functional>

#include "field.hpp"
#include "flux.hpp"

namespace compwave {

enum class X1Boundary { Periodic, Dirichlet };

// Fills ghost values at x1 = -L - h (side 0) or x1 = +L + h (side 1) for
// every transverse index, at the requested stage time.
using GhostFill = std::function<void(double time, int side, double* out, size_t count)>;

// Returns a pointer to an interior-shaped source field at the stage time.
using SourceEval = std::function<const double*(double time)>;

struct StepperOptions {
    X1Boundary x1_boundary = X1Boundary::Periodic;
    double cfl_advective = 0.9;
    double cfl_diffusive = 0.9;
    double dt_override = 0.0;  // > 0 forces the step size (stress tests)
};

struct StepInfo {
    double dt = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
};

// Conservative explicit two-stage integrator for
//   u_t + sum_i d/dx_i f_i(u) = sum_ij a_ij u_{x_i x_j} (+ source)
// with second-order central flux differencing in divergence form and
// centered second differences including the cross terms.  Transverse
// directions are periodic; x1 is periodic or Dirichlet via ghost trace.
class Stepper {
public:
    Stepper(int n, std::array<int, 3> shape, std::array<double, 3> spacing,
            FluxKind flux, TransverseKind transverse, const DiffusionMatrix& A,
            StepperOptions opt);

    void set_state(const Field& u);
    void get_state(Field& u) const;

    double min_u() const { return min_u_; }
    double max_u() const { return max_u_; }

    // Step restriction: 0.9 min(h1/max|f1'(u)|, h_min^2 / (2 tr A)).
    double suggest_dt() const;

    StepInfo advance(double t, double dt, const GhostFill& ghost = nullptr,
                     const SourceEval& source = nullptr);

private:
    void fill_ghosts(std::vector<double>& buf, double time, const GhostFill& ghost);
    void track_extrema();

    int n_;
    std::array<int, 3> shape_;
    std::array<double, 3> h_;
    FluxKind flux_;
    TransverseKind trans_;
    StepperOptions opt_;
    double a_[3][3] = {{0.0}};
    double trace_a_ = 0.0;
    double hmin_ = 0.0;
    size_t stride_i_ = 0, stride_j_ = 0;
    std::vector<double> u_, utmp_;
    double min_u_ = 0.0, max_u_ = 0.0;
};

}  // namespace compwave
