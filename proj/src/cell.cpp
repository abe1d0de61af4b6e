#include "cell.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace compwave {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

// Separable DFT along one axis of a complex buffer (naive per line; axes
// are short, this is not a stepping-path cost).
void dft_axis(std::vector<std::complex<double>>& data, const std::array<int, 3>& shape,
              int axis) {
    const int n = shape[axis];
    std::vector<std::complex<double>> twiddle(static_cast<size_t>(n) * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            twiddle[static_cast<size_t>(k) * n + j] =
                std::polar(1.0, -kTwoPi * k * j / n);
    std::array<size_t, 3> stride{static_cast<size_t>(shape[1]) * shape[2],
                                 static_cast<size_t>(shape[2]), 1};
    std::vector<std::complex<double>> line(n), out(n);
    for (int a = 0; a < (axis == 0 ? 1 : shape[0]); ++a)
        for (int b = 0; b < (axis == 1 ? 1 : shape[1]); ++b)
            for (int c = 0; c < (axis == 2 ? 1 : shape[2]); ++c) {
                size_t base = a * stride[0] + b * stride[1] + c * stride[2];
                if (axis == 0) base = b * stride[1] + c * stride[2];
                for (int j = 0; j < n; ++j) line[j] = data[base + j * stride[axis]];
                for (int k = 0; k < n; ++k) {
                    std::complex<double> s{0.0, 0.0};
                    const std::complex<double>* tw = twiddle.data() + static_cast<size_t>(k) * n;
                    for (int j = 0; j < n; ++j) s += tw[j] * line[j];
                    out[k] = s;
                }
                for (int k = 0; k < n; ++k) data[base + k * stride[axis]] = out[k];
            }
}
}  // namespace

double surrogate_norm(const Field& f, const TorusGrid& grid, int order) {
    std::vector<std::complex<double>> c(f.v.begin(), f.v.end());
    for (int axis = 0; axis < grid.n; ++axis) dft_axis(c, f.shape, axis);
    const double scale = 1.0 / static_cast<double>(f.size());
    double acc = 0.0;
    for (int i = 0; i < f.shape[0]; ++i)
        for (int j = 0; j < f.shape[1]; ++j)
            for (int k = 0; k < f.shape[2]; ++k) {
                const int kk[3] = {i, j, k};
                double k2 = 0.0;
                for (int d = 0; d < grid.n; ++d) {
                    int sk = kk[d] <= f.shape[d] / 2 ? kk[d] : kk[d] - f.shape[d];
                    const double kappa = kTwoPi * sk / grid.periods[d];
                    k2 += kappa * kappa;
                }
                const double w = std::pow(1.0 + k2, order);
                const double mag = std::abs(c[f.idx(i, j, k)]) * scale;
                acc += w * mag * mag;
            }
    return std::sqrt(acc);
}

PeriodicPerturbation make_perturbation(const TorusGrid& grid, const ModeMap& modes,
                                       double epsilon) {
    PeriodicPerturbation p;
    p.grid = grid;
    p.v0 = Field(grid.n, grid.points);
    if (modes.empty() || epsilon == 0.0) {
        p.epsilon = 0.0;
        return p;
    }
    if (epsilon < 0.0) throw std::invalid_argument("perturbation: epsilon must be >= 0");
    for (const auto& [key, amp] : modes) {
        if (key.k[0] == 0 && key.k[1] == 0 && key.k[2] == 0)
            throw std::invalid_argument("perturbation: constant (zero wave-vector) component rejected");
        (void)amp;
    }
    for (int i = 0; i < grid.points[0]; ++i)
        for (int j = 0; j < grid.points[1]; ++j)
            for (int k = 0; k < grid.points[2]; ++k) {
                double acc = 0.0;
                for (const auto& [key, amp] : modes) {
                    double phase = key.k[0] * grid.node(0, i) / grid.periods[0] +
                                   key.k[1] * grid.node(1, j) / grid.periods[1];
                    if (grid.n == 3) phase += key.k[2] * grid.node(2, k) / grid.periods[2];
                    acc += amp * std::cos(kTwoPi * phase);
                }
                p.v0(i, j, k) = acc;
            }
    const double norm = surrogate_norm(p.v0, grid);
    if (norm <= 0.0) throw std::invalid_argument("perturbation: mode sum vanishes");
    const double scale = epsilon / norm;
    for (double& v : p.v0.v) v *= scale;
    p.epsilon = epsilon;
    for (double v : p.v0.v) p.sup = std::max(p.sup, std::abs(v));
    return p;
}

std::vector<double> snapshot_schedule(const CellRunOptions& opt) {
    std::vector<double> s{0.0};
    double t = opt.snapshot_dt_min;
    while (t < opt.t_end) {
        s.push_back(t);
        double next = std::max(t * opt.snapshot_growth, t + opt.snapshot_dt_min);
        next = std::min(next, t + opt.snapshot_dt_max);
        t = next;
    }
    s.push_back(opt.t_end);
    return s;
}

Field central_derivative(const Field& f, const TorusGrid& grid, int axis) {
    Field d(f.n, f.shape);
    const int n = f.shape[axis];
    const double inv2h = 1.0 / (2.0 * grid.spacing(axis));
    for (int i = 0; i < f.shape[0]; ++i)
        for (int j = 0; j < f.shape[1]; ++j)
            for (int k = 0; k < f.shape[2]; ++k) {
                int ip[3] = {i, j, k}, im[3] = {i, j, k};
                ip[axis] = (ip[axis] + 1) % n;
                im[axis] = (im[axis] + n - 1) % n;
                d(i, j, k) = (f(ip[0], ip[1], ip[2]) - f(im[0], im[1], im[2])) * inv2h;
            }
    return d;
}

namespace {
double field_sup(const Field& f) {
    double m = 0.0;
    for (double v : f.v) m = std::max(m, std::abs(v));
    return m;
}

double grad_sup(const Field& f, const TorusGrid& grid) {
    double m = 0.0;
    for (int d = 0; d < grid.n; ++d) m = std::max(m, field_sup(central_derivative(f, grid, d)));
    return m;
}
}  // namespace

int CellSolution::snapshot_at_or_before(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0;
    return static_cast<int>(it - times.begin()) - 1;
}

CellSolution solve_cell(double background, const PeriodicPerturbation& pert,
                        FluxKind flux, TransverseKind transverse, const DiffusionMatrix& A,
                        const CellRunOptions& opt) {
    const TorusGrid& grid = pert.grid;
    CellSolution sol;
    sol.grid = grid;
    sol.background = background;

    std::array<double, 3> h{grid.spacing(0), grid.spacing(1),
                            grid.n == 3 ? grid.spacing(2) : 1.0};
    StepperOptions sopt;
    sopt.x1_boundary = X1Boundary::Periodic;
    sopt.dt_override = opt.dt_override;
    Stepper stepper(grid.n, grid.points, h, flux, transverse, A, sopt);

    Field u(grid.n, grid.points);
    for (size_t s = 0; s < u.size(); ++s) u.v[s] = background + pert.v0.v[s];
    stepper.set_state(u);

    const double guard = 10.0 * std::max(pert.sup, 1e-12);
    const std::vector<double> schedule = snapshot_schedule(opt);
    size_t next = 0;
    double t = 0.0;

    auto record = [&](double tnow) {
        Field cur;
        stepper.get_state(cur);
        Field tilde(grid.n, grid.points);
        for (size_t s = 0; s < cur.size(); ++s) tilde.v[s] = cur.v[s] - background;
        sol.times.push_back(tnow);
        sol.sup_norm.push_back(field_sup(tilde));
        sol.grad_sup_norm.push_back(grad_sup(tilde, grid));
        sol.mean_abs.push_back(std::abs(stable_sum(tilde.v) / static_cast<double>(tilde.size())));
        sol.tilde.push_back(std::move(tilde));
    };

    record(0.0);
    ++next;
    while (t < opt.t_end) {
        double dt = stepper.suggest_dt();
        dt = std::min(dt, opt.t_end - t);
        stepper.advance(t, dt);
        t += dt;
        ++sol.steps;
        const double dev = std::max(std::abs(stepper.max_u() - background),
                                    std::abs(stepper.min_u() - background));
        if (dev > guard)
            throw std::runtime_error("cell solver unstable at step " + std::to_string(sol.steps) +
                                     ", t=" + std::to_string(t));
        while (next < schedule.size() && t >= schedule[next] - 1e-12) {
            record(t);
            ++next;
        }
    }
    return sol;
}

CellDecay cell_decay_rate(const CellSolution& sol, double window_lo, double window_hi) {
    CellDecay d;
    for (double m : sol.mean_abs) d.max_mean_abs = std::max(d.max_mean_abs, m);
    const double floor = 1e-14 * std::max(1.0, std::abs(sol.background));
    if (series_at_floor(sol.sup_norm, floor)) {
        d.sup_fit.status = FitStatus::ConvergedFloor;
        d.grad_fit.status = FitStatus::ConvergedFloor;
        return d;
    }
    d.sup_fit = fit_exponential(sol.times, sol.sup_norm, window_lo, window_hi);
    d.grad_fit = fit_exponential(sol.times, sol.grad_sup_norm, window_lo, window_hi);
    return d;
}

double dispersion_rate(const DiffusionMatrix& A, const ModeKey& k,
                       const std::array<double, 3>& periods) {
    double rate = 0.0;
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) {
            const double ki = kTwoPi * k.k[i] / periods[i];
            const double kj = kTwoPi * k.k[j] / periods[j];
            rate += A.at(i, j) * ki * kj;
        }
    return rate;
}

CellSlice blend_cell(const CellSolution& sol, double t) {
    CellSlice slice;
    slice.grid = sol.grid;
    if (sol.times.empty() || t > sol.times.back() + 1e-12) return slice;  // relaxed: zero
    slice.zero = false;
    const int lo = sol.snapshot_at_or_before(t);
    const int hi = std::min<int>(lo + 1, static_cast<int>(sol.times.size()) - 1);
    double alpha = 0.0;
    if (hi > lo) alpha = (t - sol.times[lo]) / (sol.times[hi] - sol.times[lo]);
    alpha = std::clamp(alpha, 0.0, 1.0);
    slice.value = Field(sol.grid.n, sol.grid.points);
    for (size_t s = 0; s < slice.value.size(); ++s)
        slice.value.v[s] = (1.0 - alpha) * sol.tilde[lo].v[s] + alpha * sol.tilde[hi].v[s];
    for (int d = 0; d < sol.grid.n; ++d)
        slice.deriv[d] = central_derivative(slice.value, sol.grid, d);
    return slice;
}

PeriodicInterp periodic_interp(const TorusGrid& grid, double x1) {
    const double p = grid.periods[0];
    double s = std::fmod(x1, p);
    if (s < 0.0) s += p;
    const double pos = s / grid.spacing(0);
    int i0 = static_cast<int>(std::floor(pos));
    double u = pos - i0;
    const int n = grid.points[0];
    if (i0 >= n) { i0 = 0; u = 0.0; }
    PeriodicInterp pi;
    pi.idx[0] = (i0 + n - 1) % n;
    pi.idx[1] = i0;
    pi.idx[2] = (i0 + 1) % n;
    pi.idx[3] = (i0 + 2) % n;
    pi.w[0] = -u * (u - 1.0) * (u - 2.0) / 6.0;
    pi.w[1] = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    pi.w[2] = -(u + 1.0) * u * (u - 2.0) / 2.0;
    pi.w[3] = (u + 1.0) * u * (u - 1.0) / 6.0;
    return pi;
}

double sample_periodic(const Field& f, const TorusGrid& grid, double x1, int j, int k) {
    const PeriodicInterp pi = periodic_interp(grid, x1);
    return pi.w[0] * f(pi.idx[0], j, k) + pi.w[1] * f(pi.idx[1], j, k) +
           pi.w[2] * f(pi.idx[2], j, k) + pi.w[3] * f(pi.idx[3], j, k);
}

}  // namespace compwave
