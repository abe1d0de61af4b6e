#pragma once

#include <map>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "ansatz.hpp"
#include "grid.hpp"
#include "stepper.hpp"

namespace compwave {

inline LineGrid channel_line(const ChannelGrid& g) {
    return LineGrid{-g.half_length, g.h1(), g.points[0]};
}

// u(., 0) = ubar(., 0), so the perturbation u - ubar starts identically zero.
Field ansatz_initial(const AnsatzInputs& in, const ChannelGrid& grid);

struct MaxPrincipleCheck {
    bool pass = true;
    double min_u = 0.0, max_u = 0.0;
    double lo_bound = 0.0, hi_bound = 0.0;
};

MaxPrincipleCheck max_principle_monitor(double min_u, double max_u,
                                        const WaveEndpoints& ends, double tol);

struct ChannelRunOptions {
    double t_end = 1.0;
    double record_dt_min = 0.002;
    double record_growth = 1.05;
    std::vector<double> snapshot_times;  // stored fields + region energies
    bool inject_source = false;          // force with J so u tracks ubar exactly
    double dt_override = 0.0;
    double epsilon = 0.0;                // perturbation budget, for the monitor tolerance
    SourceOptions source_options;
};

struct RegionSample {
    double t = 0.0;
    RegionEnergy q2;
};

struct SimulationTrace {
    std::vector<double> record_times;
    std::map<std::string, std::vector<double>> series;

    std::vector<double> snapshot_times;
    std::vector<Field> snapshots;
    std::vector<RegionSample> region_energy;

    long steps = 0;
    bool max_principle_ok = true;
    double max_principle_worst = 0.0;   // worst excursion outside the bounds
    double boundary_dx1_max = 0.0;      // containment monitor over the run
    double last_dt = 0.0;
};

std::vector<double> record_schedule(double t_end, double dt_min, double growth);

// Full evolution on the truncated channel with far-field trace boundaries.
// Records the norm series of phi = u - ubar, the mode split, the distance
// to the composite wave, and the structural monitors.
SimulationTrace simulate_channel(const ChannelGrid& grid, const AnsatzInputs& in,
                                 FluxKind flux, TransverseKind transverse,
                                 const TransverseFluxSet& tset, const DiffusionMatrix& A,
                                 const ChannelRunOptions& opt);

}  // namespace compwave
