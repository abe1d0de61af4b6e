#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "field.hpp"

namespace compwave {

// Periodic box for the cell problem.  Transverse directions have unit
// period (the transverse measure is normalized to 1); the x1 period is free.
struct TorusGrid {
    int n = 2;
    std::array<int, 3> points{0, 1, 1};
    std::array<double, 3> periods{1.0, 1.0, 1.0};

    double spacing(int d) const { return periods[d] / points[d]; }
    double node(int d, int j) const { return j * spacing(d); }
    // Equal weights on a uniform periodic grid; they sum to the period.
    double cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < n; ++d) v *= spacing(d);
        return v;
    }
    size_t total() const {
        return static_cast<size_t>(points[0]) * points[1] * points[2];
    }
};

TorusGrid make_torus_grid(int n, const std::vector<int>& points,
                          const std::vector<double>& periods);

// Truncated channel [-L, L] x T^{n-1}.  x1 nodes include both endpoints,
// transverse nodes match the torus layout so periodic fields map by index.
struct ChannelGrid {
    int n = 2;
    double half_length = 0.0;
    std::array<int, 3> points{0, 1, 1};

    double h1() const { return 2.0 * half_length / (points[0] - 1); }
    double x1(int i) const { return -half_length + i * h1(); }
    double transverse_spacing(int d) const { return 1.0 / points[d]; }
    double node(int d, int j) const { return d == 0 ? x1(j) : j * transverse_spacing(d); }
    size_t total() const {
        return static_cast<size_t>(points[0]) * points[1] * points[2];
    }
    // Trapezoid weights along x1.
    std::vector<double> x1_weights() const {
        std::vector<double> w(points[0], h1());
        w.front() = 0.5 * h1();
        w.back() = 0.5 * h1();
        return w;
    }
};

ChannelGrid make_channel_grid(int n, double half_length, const std::vector<int>& points);

}  // namespace compwave
