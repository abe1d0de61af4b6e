#include "grid.hpp"

namespace compwave {

namespace {
std::array<int, 3> to_shape(int n, const std::vector<int>& points) {
    if (n < 2 || n > 3) throw std::invalid_argument("grid dimension must be 2 or 3");
    if (points.size() != static_cast<size_t>(n))
        throw std::invalid_argument("grid: need one point count per direction");
    std::array<int, 3> s{points[0], points[1], n == 3 ? points[2] : 1};
    for (int d = 0; d < n; ++d)
        if (s[d] < (d == 0 ? 3 : 2)) throw std::invalid_argument("grid: too few points");
    return s;
}
}  // namespace

TorusGrid make_torus_grid(int n, const std::vector<int>& points,
                          const std::vector<double>& periods) {
    TorusGrid g;
    g.n = n;
    g.points = to_shape(n, points);
    if (periods.size() != static_cast<size_t>(n))
        throw std::invalid_argument("torus grid: need one period per direction");
    g.periods = {periods[0], periods[1], n == 3 ? periods[2] : 1.0};
    if (g.periods[0] <= 0.0) throw std::invalid_argument("torus grid: x1 period must be positive");
    for (int d = 1; d < n; ++d)
        if (g.periods[d] != 1.0)
            throw std::invalid_argument("torus grid: transverse periods are normalized to 1");
    return g;
}

ChannelGrid make_channel_grid(int n, double half_length, const std::vector<int>& points) {
    ChannelGrid g;
    g.n = n;
    g.points = to_shape(n, points);
    if (half_length <= 0.0) throw std::invalid_argument("channel grid: L must be positive");
    g.half_length = half_length;
    return g;
}

double stable_sum(const double* x, size_t n) {
    // Pairwise reduction keeps the error O(log n) in ulps.
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const size_t half = n / 2;
    return stable_sum(x, half) + stable_sum(x + half, n - half);
}

}  // namespace compwave
