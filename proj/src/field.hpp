#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace compwave {

// Dense scalar field on a structured grid.  Axis 0 is x1; n = 2 stores the
// transverse axis in shape[1] with shape[2] == 1, so 2-d and 3-d share code.
struct Field {
    int n = 2;
    std::array<int, 3> shape{0, 1, 1};
    std::vector<double> v;

    Field() = default;
    Field(int dim, std::array<int, 3> s) : n(dim), shape(s) {
        if (dim < 2 || dim > 3) throw std::invalid_argument("field dimension must be 2 or 3");
        v.assign(static_cast<size_t>(shape[0]) * shape[1] * shape[2], 0.0);
    }

    size_t size() const { return v.size(); }
    size_t idx(int i, int j, int k = 0) const {
        return (static_cast<size_t>(i) * shape[1] + j) * shape[2] + k;
    }
    double operator()(int i, int j, int k = 0) const { return v[idx(i, j, k)]; }
    double& operator()(int i, int j, int k = 0) { return v[idx(i, j, k)]; }
};

// Stable sum (pairwise); used wherever drift at round-off level matters.
double stable_sum(const double* x, size_t n);
inline double stable_sum(const std::vector<double>& x) { return stable_sum(x.data(), x.size()); }

}  // namespace compwave
