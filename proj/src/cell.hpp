#pragma once

#include <map>
#include <optional>
#include <vector>

#include "analysis.hpp"
#include "field.hpp"
#include "flux.hpp"
#include "grid.hpp"
#include "stepper.hpp"

namespace compwave {

// Smoothness-weighted coefficient norm sqrt(sum (1+|kappa|^2)^order |c_k|^2)
// with physical wave numbers kappa_d = 2 pi k_d / P_d.  The mean uses the
// measure-1 convention so values are comparable across x1 periods.
double surrogate_norm(const Field& f, const TorusGrid& grid, int order = 2);

struct ModeKey {
    int k[3] = {0, 0, 0};
    bool operator<(const ModeKey& o) const {
        for (int d = 0; d < 3; ++d)
            if (k[d] != o.k[d]) return k[d] < o.k[d];
        return false;
    }
};
using ModeMap = std::map<ModeKey, double>;

struct PeriodicPerturbation {
    TorusGrid grid;
    Field v0;
    double epsilon = 0.0;         // surrogate norm after scaling
    double sup = 0.0;             // max |v0|
};

// Cosine-mode sum with the given relative amplitudes, rescaled so the
// surrogate norm equals epsilon.  The zero wave-vector is rejected, so the
// mean vanishes by construction.
PeriodicPerturbation make_perturbation(const TorusGrid& grid, const ModeMap& modes,
                                       double epsilon);

struct CellSolution {
    TorusGrid grid;
    double background = 0.0;      // the constant state the solution relaxes to
    std::vector<double> times;
    std::vector<Field> tilde;     // solution minus background, one per snapshot
    std::vector<double> sup_norm;
    std::vector<double> grad_sup_norm;
    std::vector<double> mean_abs;  // |discrete mean| per snapshot
    long steps = 0;

    int snapshot_at_or_before(double t) const;
};

struct CellRunOptions {
    double t_end = 1.0;
    // Snapshot schedule: t_{k+1} = max(t_k * growth, t_k + dt_min), capped
    // by dt_max; dense early while the fast modes are alive.
    double snapshot_dt_min = 0.002;
    double snapshot_growth = 1.06;
    double snapshot_dt_max = 2.0;
    double dt_override = 0.0;
};

std::vector<double> snapshot_schedule(const CellRunOptions& opt);

// Periodic evolution of background + v0 under the full equation.  The
// discrete mean of tilde is conserved up to round-off because every term is
// differenced in divergence form.
CellSolution solve_cell(double background, const PeriodicPerturbation& pert,
                        FluxKind flux, TransverseKind transverse, const DiffusionMatrix& A,
                        const CellRunOptions& opt);

// Decay rate of a cell solution: rate > 0 with the fit diagnostics, or the
// already-converged marker when the perturbation is at round-off.
struct CellDecay {
    SeriesFit sup_fit;
    SeriesFit grad_fit;
    double max_mean_abs = 0.0;
};

CellDecay cell_decay_rate(const CellSolution& sol, double window_lo, double window_hi);

// Linearized single-mode decay rate sum_ij a_ij kappa_i kappa_j.
double dispersion_rate(const DiffusionMatrix& A, const ModeKey& k,
                       const std::array<double, 3>& periods);

// Time-blended view of the pair of cell solutions, with centered periodic
// spatial derivatives on the cell grid.  Past the last snapshot the fields
// are treated as identically zero (the solutions have relaxed by then).
struct CellSlice {
    bool zero = true;
    TorusGrid grid;
    Field value;
    std::array<Field, 3> deriv;
};

CellSlice blend_cell(const CellSolution& sol, double t);

// Periodic point evaluation on a channel x1 line: cubic Lagrange
// interpolation in x1 (exact at nodes), exact index mapping transversely
// (sizes must match).
struct PeriodicInterp {
    int idx[4];
    double w[4];
};
PeriodicInterp periodic_interp(const TorusGrid& grid, double x1);
double sample_periodic(const Field& f, const TorusGrid& grid, double x1, int j, int k);

Field central_derivative(const Field& f, const TorusGrid& grid, int axis);

}  // namespace compwave
