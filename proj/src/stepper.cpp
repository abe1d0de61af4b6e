#include "stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace compwave {

namespace {

template <FluxKind FK>
inline double f1_eval(double u) {
    if constexpr (FK == FluxKind::Quadratic) {
        const double m = u > 0.0 ? u : 0.0;
        return 0.5 * m * m;
    } else if constexpr (FK == FluxKind::Cubic) {
        const double m = u > 0.0 ? u : 0.0;
        return m * m * m;
    } else {
        return 0.0;
    }
}

template <TransverseKind TK>
inline double ft_eval(double u) {
    if constexpr (TK == TransverseKind::HalfSquare) return 0.5 * u * u;
    else return 0.0;
}

struct SweepCtx {
    std::array<int, 3> n;
    size_t si, sj;
    double c1, c2, c3;          // 1/(2 h_i)
    double d11, d22, d33;       // a_ii / h_i^2
    double x12, x13, x23;       // (a_ij + a_ji) / (4 h_i h_j)
    double dt;
    const double* src = nullptr;
};

// Fused stage sweep.  STAGE 0: out = u + dt L(u).
// STAGE 1 (second Heun stage): out = 0.5 (orig + u + dt L(u)).
template <int NDIM, FluxKind FK, TransverseKind TK, int STAGE, bool HAS_SRC>
void sweep(const SweepCtx& c, const double* u, const double* orig, double* out) {
    const int n1 = c.n[0], n2 = c.n[1], n3 = c.n[2];
    const bool par = static_cast<size_t>(n1) * n2 * n3 >= 32768;
#pragma omp parallel for schedule(static) if (par)
    for (int i = 1; i <= n1; ++i) {
        if constexpr (NDIM == 2) {
            const double* um = u + (i - 1) * c.si;
            const double* uc = u + i * c.si;
            const double* up = u + (i + 1) * c.si;
            const double* uo = orig + i * c.si;
            double* w = out + i * c.si;
            const double* sr = HAS_SRC ? c.src + static_cast<size_t>(i - 1) * n2 - 1 : nullptr;
#pragma omp simd
            for (int j = 1; j <= n2; ++j) {
                const double conv = c.c1 * (f1_eval<FK>(up[j]) - f1_eval<FK>(um[j])) +
                                    c.c2 * (ft_eval<TK>(uc[j + 1]) - ft_eval<TK>(uc[j - 1]));
                double rhs = c.d11 * (up[j] - 2.0 * uc[j] + um[j]) +
                             c.d22 * (uc[j + 1] - 2.0 * uc[j] + uc[j - 1]) +
                             c.x12 * (up[j + 1] - up[j - 1] - um[j + 1] + um[j - 1]) - conv;
                if constexpr (HAS_SRC) rhs += sr[j];
                if constexpr (STAGE == 0) w[j] = uc[j] + c.dt * rhs;
                else w[j] = 0.5 * (uo[j] + uc[j] + c.dt * rhs);
            }
        } else {
            for (int j = 1; j <= n2; ++j) {
                const size_t base = i * c.si + j * c.sj;
                const double* uc = u + base;
                const double* uo = orig + base;
                double* w = out + base;
                const double* sr = HAS_SRC
                    ? c.src + (static_cast<size_t>(i - 1) * n2 + (j - 1)) * n3 - 1
                    : nullptr;
                const long pi = static_cast<long>(c.si), pj = static_cast<long>(c.sj);
#pragma omp simd
                for (int k = 1; k <= n3; ++k) {
                    const double conv =
                        c.c1 * (f1_eval<FK>(uc[k + pi]) - f1_eval<FK>(uc[k - pi])) +
                        c.c2 * (ft_eval<TK>(uc[k + pj]) - ft_eval<TK>(uc[k - pj])) +
                        c.c3 * (ft_eval<TK>(uc[k + 1]) - ft_eval<TK>(uc[k - 1]));
                    double rhs =
                        c.d11 * (uc[k + pi] - 2.0 * uc[k] + uc[k - pi]) +
                        c.d22 * (uc[k + pj] - 2.0 * uc[k] + uc[k - pj]) +
                        c.d33 * (uc[k + 1] - 2.0 * uc[k] + uc[k - 1]) +
                        c.x12 * (uc[k + pi + pj] - uc[k + pi - pj] - uc[k - pi + pj] + uc[k - pi - pj]) +
                        c.x13 * (uc[k + pi + 1] - uc[k + pi - 1] - uc[k - pi + 1] + uc[k - pi - 1]) +
                        c.x23 * (uc[k + pj + 1] - uc[k + pj - 1] - uc[k - pj + 1] + uc[k - pj - 1]) -
                        conv;
                    if constexpr (HAS_SRC) rhs += sr[k];
                    if constexpr (STAGE == 0) w[k] = uc[k] + c.dt * rhs;
                    else w[k] = 0.5 * (uo[k] + uc[k] + c.dt * rhs);
                }
            }
        }
    }
}

template <int NDIM, FluxKind FK, TransverseKind TK>
void dispatch_stage(const SweepCtx& c, const double* u, const double* orig, double* out,
                    int stage) {
    if (stage == 0) {
        if (c.src) sweep<NDIM, FK, TK, 0, true>(c, u, orig, out);
        else sweep<NDIM, FK, TK, 0, false>(c, u, orig, out);
    } else {
        if (c.src) sweep<NDIM, FK, TK, 1, true>(c, u, orig, out);
        else sweep<NDIM, FK, TK, 1, false>(c, u, orig, out);
    }
}

template <int NDIM>
void dispatch_kind(const SweepCtx& c, FluxKind fk, TransverseKind tk, const double* u,
                   const double* orig, double* out, int stage) {
    switch (fk) {
        case FluxKind::Quadratic:
            if (tk == TransverseKind::HalfSquare)
                dispatch_stage<NDIM, FluxKind::Quadratic, TransverseKind::HalfSquare>(c, u, orig, out, stage);
            else
                dispatch_stage<NDIM, FluxKind::Quadratic, TransverseKind::Zero>(c, u, orig, out, stage);
            break;
        case FluxKind::Cubic:
            if (tk == TransverseKind::HalfSquare)
                dispatch_stage<NDIM, FluxKind::Cubic, TransverseKind::HalfSquare>(c, u, orig, out, stage);
            else
                dispatch_stage<NDIM, FluxKind::Cubic, TransverseKind::Zero>(c, u, orig, out, stage);
            break;
        case FluxKind::Zero:
            if (tk == TransverseKind::HalfSquare)
                dispatch_stage<NDIM, FluxKind::Zero, TransverseKind::HalfSquare>(c, u, orig, out, stage);
            else
                dispatch_stage<NDIM, FluxKind::Zero, TransverseKind::Zero>(c, u, orig, out, stage);
            break;
    }
}

}  // namespace

Stepper::Stepper(int n, std::array<int, 3> shape, std::array<double, 3> spacing,
                 FluxKind flux, TransverseKind transverse, const DiffusionMatrix& A,
                 StepperOptions opt)
    : n_(n), shape_(shape), h_(spacing), flux_(flux), trans_(transverse), opt_(opt) {
    if (n != 2 && n != 3) throw std::invalid_argument("stepper: dimension must be 2 or 3");
    if (A.n != n) throw std::invalid_argument("stepper: diffusion matrix dimension mismatch");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a_[i][j] = A.at(i, j);
    trace_a_ = A.trace();
    hmin_ = h_[0];
    for (int d = 1; d < n; ++d) hmin_ = std::min(hmin_, h_[d]);
    if (n == 2) {
        stride_j_ = 1;
        stride_i_ = static_cast<size_t>(shape_[1]) + 2;
        u_.assign((static_cast<size_t>(shape_[0]) + 2) * stride_i_, 0.0);
    } else {
        stride_j_ = static_cast<size_t>(shape_[2]) + 2;
        stride_i_ = (static_cast<size_t>(shape_[1]) + 2) * stride_j_;
        u_.assign((static_cast<size_t>(shape_[0]) + 2) * stride_i_, 0.0);
    }
    utmp_ = u_;
}

void Stepper::set_state(const Field& u) {
    if (u.shape != shape_) throw std::invalid_argument("stepper: state shape mismatch");
    for (int i = 0; i < shape_[0]; ++i)
        for (int j = 0; j < shape_[1]; ++j)
            for (int k = 0; k < shape_[2]; ++k)
                u_[(i + 1) * stride_i_ + (j + 1) * stride_j_ + (n_ == 3 ? k + 1 : 0)] = u(i, j, k);
    track_extrema();
}

void Stepper::get_state(Field& u) const {
    u = Field(n_, shape_);
    for (int i = 0; i < shape_[0]; ++i)
        for (int j = 0; j < shape_[1]; ++j)
            for (int k = 0; k < shape_[2]; ++k)
                u(i, j, k) = u_[(i + 1) * stride_i_ + (j + 1) * stride_j_ + (n_ == 3 ? k + 1 : 0)];
}

void Stepper::track_extrema() {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const int n1 = shape_[0], n2 = shape_[1], n3 = shape_[2];
    const bool par = static_cast<size_t>(n1) * n2 * n3 >= 32768;
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi) if (par)
    for (int i = 1; i <= n1; ++i) {
        for (int j = 1; j <= n2; ++j) {
            const double* row = u_.data() + i * stride_i_ + j * stride_j_;
            if (n_ == 2) {
                lo = std::min(lo, row[0]);
                hi = std::max(hi, row[0]);
            } else {
                for (int k = 1; k <= n3; ++k) {
                    lo = std::min(lo, row[k]);
                    hi = std::max(hi, row[k]);
                }
            }
        }
    }
    min_u_ = lo;
    max_u_ = hi;
}

double Stepper::suggest_dt() const {
    if (opt_.dt_override > 0.0) return opt_.dt_override;
    double df_max = 0.0;
    const double um = std::max(0.0, max_u_);
    switch (flux_) {
        case FluxKind::Quadratic: df_max = um; break;
        case FluxKind::Cubic: df_max = 3.0 * um * um; break;
        case FluxKind::Zero: df_max = 0.0; break;
    }
    const double dt_adv = df_max > 0.0 ? opt_.cfl_advective * h_[0] / df_max
                                       : std::numeric_limits<double>::infinity();
    const double dt_diff = trace_a_ > 0.0
                               ? opt_.cfl_diffusive * hmin_ * hmin_ / (2.0 * trace_a_)
                               : std::numeric_limits<double>::infinity();
    return std::min(dt_adv, dt_diff);
}

void Stepper::fill_ghosts(std::vector<double>& buf, double time, const GhostFill& ghost) {
    const int n1 = shape_[0], n2 = shape_[1], n3 = shape_[2];
    // x1 ghosts first, then transverse wraps so corners pick up ghost rows.
    if (opt_.x1_boundary == X1Boundary::Periodic) {
        for (int j = 1; j <= n2; ++j)
            for (int k = 1; k <= (n_ == 3 ? n3 : 1); ++k) {
                const size_t kk = n_ == 3 ? static_cast<size_t>(k) : 0;
                buf[0 * stride_i_ + j * stride_j_ + kk] = buf[n1 * stride_i_ + j * stride_j_ + kk];
                buf[(n1 + 1) * stride_i_ + j * stride_j_ + kk] = buf[1 * stride_i_ + j * stride_j_ + kk];
            }
    } else {
        if (!ghost) throw std::invalid_argument("stepper: Dirichlet boundary needs a ghost fill");
        const size_t count = static_cast<size_t>(n2) * n3;
        std::vector<double> tmp(count);
        for (int side = 0; side < 2; ++side) {
            ghost(time, side, tmp.data(), count);
            const size_t row = (side == 0 ? 0 : static_cast<size_t>(n1) + 1) * stride_i_;
            size_t s = 0;
            for (int j = 1; j <= n2; ++j)
                for (int k = 1; k <= (n_ == 3 ? n3 : 1); ++k)
                    buf[row + j * stride_j_ + (n_ == 3 ? k : 0)] = tmp[s++];
        }
    }
    for (int i = 0; i <= n1 + 1; ++i) {
        if (n_ == 2) {
            buf[i * stride_i_ + 0] = buf[i * stride_i_ + n2];
            buf[i * stride_i_ + n2 + 1] = buf[i * stride_i_ + 1];
        } else {
            for (int k = 1; k <= n3; ++k) {
                buf[i * stride_i_ + 0 * stride_j_ + k] = buf[i * stride_i_ + n2 * stride_j_ + k];
                buf[i * stride_i_ + (n2 + 1) * stride_j_ + k] = buf[i * stride_i_ + 1 * stride_j_ + k];
            }
            for (int j = 0; j <= n2 + 1; ++j) {
                buf[i * stride_i_ + j * stride_j_ + 0] = buf[i * stride_i_ + j * stride_j_ + n3];
                buf[i * stride_i_ + j * stride_j_ + n3 + 1] = buf[i * stride_i_ + j * stride_j_ + 1];
            }
        }
    }
}

StepInfo Stepper::advance(double t, double dt, const GhostFill& ghost, const SourceEval& source) {
    SweepCtx c;
    c.n = shape_;
    c.si = stride_i_;
    c.sj = stride_j_;
    c.c1 = 1.0 / (2.0 * h_[0]);
    c.c2 = 1.0 / (2.0 * h_[1]);
    c.c3 = n_ == 3 ? 1.0 / (2.0 * h_[2]) : 0.0;
    c.d11 = a_[0][0] / (h_[0] * h_[0]);
    c.d22 = a_[1][1] / (h_[1] * h_[1]);
    c.d33 = n_ == 3 ? a_[2][2] / (h_[2] * h_[2]) : 0.0;
    c.x12 = (a_[0][1] + a_[1][0]) / (4.0 * h_[0] * h_[1]);
    c.x13 = n_ == 3 ? (a_[0][2] + a_[2][0]) / (4.0 * h_[0] * h_[2]) : 0.0;
    c.x23 = n_ == 3 ? (a_[1][2] + a_[2][1]) / (4.0 * h_[1] * h_[2]) : 0.0;
    c.dt = dt;

    fill_ghosts(u_, t, ghost);
    c.src = source ? source(t) : nullptr;
    if (n_ == 2) dispatch_kind<2>(c, flux_, trans_, u_.data(), u_.data(), utmp_.data(), 0);
    else dispatch_kind<3>(c, flux_, trans_, u_.data(), u_.data(), utmp_.data(), 0);

    fill_ghosts(utmp_, t + dt, ghost);
    c.src = source ? source(t + dt) : nullptr;
    if (n_ == 2) dispatch_kind<2>(c, flux_, trans_, utmp_.data(), u_.data(), u_.data(), 1);
    else dispatch_kind<3>(c, flux_, trans_, utmp_.data(), u_.data(), u_.data(), 1);

    track_extrema();
    return {dt, min_u_, max_u_};
}

}  // namespace compwave
