#include "ansatz.hpp"

#include <cmath>
#include <stdexcept>

namespace compwave {

double eta_weight(double x1, double t, const ProfileSet& profiles) {
    const double um = profiles.endpoints().u_minus;
    if (um == 0.0) return 1.0;
    return (profiles.contact(x1, t).u - um) / std::abs(um);
}

EtaDerivs eta_derivs(double x1, double t, const ProfileSet& profiles) {
    EtaDerivs e;
    const double um = profiles.endpoints().u_minus;
    if (um == 0.0) return e;
    const double inv = 1.0 / std::abs(um);
    const ProfileValue c = profiles.contact(x1, t);
    const double cdxx = profiles.contact_dxx(x1, t);
    e.value = (c.u - um) * inv;
    e.dx = c.du * inv;
    e.dxx = cdxx * inv;
    e.dt = profiles.a11() * cdxx * inv;
    return e;
}

namespace {

// Sample a cell-grid field onto the line x transverse target grid.
Field sample_to_grid(const Field& src, const TorusGrid& grid, const LineGrid& line,
                     const std::array<int, 3>& shape, int n) {
    Field out(n, shape);
    for (int i = 0; i < shape[0]; ++i) {
        const PeriodicInterp w = periodic_interp(grid, line.x(i));
        for (int j = 0; j < shape[1]; ++j)
            for (int k = 0; k < shape[2]; ++k)
                out(i, j, k) = w.w[0] * src(w.idx[0], j, k) + w.w[1] * src(w.idx[1], j, k) +
                               w.w[2] * src(w.idx[2], j, k) + w.w[3] * src(w.idx[3], j, k);
    }
    return out;
}

}  // namespace

AnsatzState build_ansatz(const AnsatzInputs& in, double t, const LineGrid& line,
                         const std::array<int, 3>& transverse_shape) {
    if (!in.profiles) throw std::invalid_argument("build_ansatz: missing profiles");
    const ProfileSet& pr = *in.profiles;
    AnsatzState st;
    st.t = t;
    st.line = line;
    st.shape = transverse_shape;
    st.shape[0] = line.n1;
    st.n = transverse_shape[2] > 1 ? 3 : 2;
    st.profiles = in.profiles;

    const double fan = pr.lambda_plus() * (1.0 + t);
    const double cw = std::sqrt(4.0 * pr.a11() * (1.0 + t));
    if (line.hi() < fan + 10.0 || line.lo > -10.0 * cw)
        throw std::invalid_argument("build_ansatz: grid does not cover the wave fans");

    st.eta.resize(line.n1);
    st.deta.resize(line.n1);
    st.d2eta.resize(line.n1);
    st.dteta.resize(line.n1);
    st.uhat.resize(line.n1);
    st.duhat.resize(line.n1);
    for (int i = 0; i < line.n1; ++i) {
        const double x = line.x(i);
        const EtaDerivs e = eta_derivs(x, t, pr);
        st.eta[i] = e.value;
        st.deta[i] = e.dx;
        st.d2eta[i] = e.dxx;
        st.dteta[i] = e.dt;
        st.uhat[i] = pr.composite(x, t);
        st.duhat[i] = pr.composite_dx(x, t);
    }

    CellSlice sm, sp;
    if (in.cell_minus) sm = blend_cell(*in.cell_minus, t);
    if (in.cell_plus) sp = blend_cell(*in.cell_plus, t);
    st.cells_zero = sm.zero && sp.zero;

    const int nd = st.n;
    if (!st.cells_zero) {
        if (sm.grid.points[1] != st.shape[1] || sm.grid.points[2] != st.shape[2])
            throw std::invalid_argument("build_ansatz: transverse sizes must match the cell grid");
        st.tminus = sample_to_grid(sm.value, sm.grid, line, st.shape, nd);
        st.tplus = sample_to_grid(sp.value, sp.grid, line, st.shape, nd);
        for (int d = 0; d < nd; ++d) {
            st.dminus[d] = sample_to_grid(sm.deriv[d], sm.grid, line, st.shape, nd);
            st.dplus[d] = sample_to_grid(sp.deriv[d], sp.grid, line, st.shape, nd);
        }
    } else {
        st.tminus = Field(nd, st.shape);
        st.tplus = Field(nd, st.shape);
        for (int d = 0; d < nd; ++d) {
            st.dminus[d] = Field(nd, st.shape);
            st.dplus[d] = Field(nd, st.shape);
        }
    }

    st.ubar = Field(nd, st.shape);
    for (int d = 0; d < nd; ++d) st.dubar[d] = Field(nd, st.shape);
    for (int i = 0; i < st.shape[0]; ++i) {
        const double et = st.eta[i];
        for (int j = 0; j < st.shape[1]; ++j)
            for (int k = 0; k < st.shape[2]; ++k) {
                const size_t s = st.ubar.idx(i, j, k);
                const double tm = st.tminus.v[s], tp = st.tplus.v[s];
                st.ubar.v[s] = (1.0 - et) * tm + et * tp + st.uhat[i];
                st.dubar[0].v[s] = (1.0 - et) * st.dminus[0].v[s] + et * st.dplus[0].v[s] +
                                   st.deta[i] * (tp - tm) + st.duhat[i];
                for (int d = 1; d < nd; ++d)
                    st.dubar[d].v[s] = (1.0 - et) * st.dminus[d].v[s] + et * st.dplus[d].v[s];
            }
    }
    return st;
}

double interaction_N(double x1, double t, const ProfileSet& profiles) {
    const ProfileValue r = profiles.rarefaction(x1, t);
    const ProfileValue c = profiles.contact(x1, t);
    const Flux& f = profiles.flux();
    const double fu_hat = f.deriv(c.u + r.u);
    const double rdxx = profiles.rarefaction_dxx(x1, t);
    return profiles.a11() * rdxx - (fu_hat - f.deriv(r.u)) * r.du - fu_hat * c.du;
}

double interaction_term(double x1, double t, const ProfileSet& profiles) {
    return -interaction_N(x1, t, profiles);
}

SourceField compute_source(const AnsatzState& state, const TransverseFluxSet& transverse,
                           const DiffusionMatrix& A, SourceOptions opt) {
    const ProfileSet& pr = *state.profiles;
    const Flux& f1 = pr.flux();
    const int nd = state.n;
    if (static_cast<int>(transverse.f.size()) < nd - 1)
        throw std::invalid_argument("compute_source: transverse flux set too small");
    if (A.n != nd) throw std::invalid_argument("compute_source: diffusion dimension mismatch");

    SourceField out;
    out.t = state.t;
    out.line = state.line;
    out.shape = state.shape;
    out.merge_cross_corner = opt.merge_cross_corner;
    out.j1 = Field(nd, state.shape);
    out.j2_line.resize(state.shape[0]);

    const double um = pr.endpoints().u_minus;
    const double up = pr.endpoints().u_plus;

    for (int i = 0; i < state.shape[0]; ++i)
        out.j2_line[i] = interaction_term(state.line.x(i), state.t, pr);

    if (!state.cells_zero) {
        for (int i = 0; i < state.shape[0]; ++i) {
            const double et = state.eta[i];
            const double det = state.deta[i];
            for (int j = 0; j < state.shape[1]; ++j)
                for (int k = 0; k < state.shape[2]; ++k) {
                    const size_t s = out.j1.idx(i, j, k);
                    const double tm = state.tminus.v[s], tp = state.tplus.v[s];
                    const double ub = state.ubar.v[s];
                    const double ubm = um + tm, ubp = up + tp;

                    // flux-difference divergences, by the chain rule
                    double acc = f1.deriv(ub) * state.dubar[0].v[s] -
                                 f1.deriv(state.uhat[i]) * state.duhat[i] -
                                 (1.0 - et) * f1.deriv(ubm) * state.dminus[0].v[s] -
                                 et * f1.deriv(ubp) * state.dplus[0].v[s];
                    for (int d = 1; d < nd; ++d) {
                        const auto& ft = transverse.f[d - 1];
                        acc += ft.deriv(ub) * state.dubar[d].v[s] -
                               (1.0 - et) * ft.deriv(ubm) * state.dminus[d].v[s] -
                               et * ft.deriv(ubp) * state.dplus[d].v[s];
                    }
                    // viscous couplings with the weight derivatives
                    for (int d = 0; d < nd; ++d) {
                        const double ddelta = state.dplus[d].v[s] - state.dminus[d].v[s];
                        acc -= A.at(d, 0) * det * ddelta;  // a_{i1} sum
                        acc -= A.at(0, d) * det * ddelta;  // a_{1j} sum
                    }
                    if (opt.merge_cross_corner)
                        acc += A.at(0, 0) * det * (state.dplus[0].v[s] - state.dminus[0].v[s]);
                    acc -= A.at(0, 0) * state.d2eta[i] * (tp - tm);
                    acc += state.dteta[i] * (tp - tm);
                    out.j1.v[s] = acc;
                }
        }
    }

    // norms of j = j1 + j2 over the grid
    const std::vector<double> w = state.line.weights();
    const size_t stride = static_cast<size_t>(state.shape[1]) * state.shape[2];
    const double tw = 1.0 / static_cast<double>(stride);
    std::vector<double> acc1(state.shape[0]), acc2(state.shape[0]);
    for (int i = 0; i < state.shape[0]; ++i) {
        double s1 = 0.0, s2 = 0.0;
        const double* row = out.j1.v.data() + i * stride;
        for (size_t s = 0; s < stride; ++s) {
            const double v = row[s] + out.j2_line[i];
            s1 += std::abs(v);
            s2 += v * v;
            out.linf = std::max(out.linf, std::abs(v));
        }
        acc1[i] = w[i] * tw * s1;
        acc2[i] = w[i] * tw * s2;
    }
    out.l1 = stable_sum(acc1);
    out.l2 = std::sqrt(stable_sum(acc2));
    return out;
}

Field source_whole_route(const AnsatzInputs& in, const AnsatzState& state,
                         const TransverseFluxSet& transverse, const DiffusionMatrix& A) {
    const ProfileSet& pr = *state.profiles;
    const Flux& f1 = pr.flux();
    const int nd = state.n;
    Field out(nd, state.shape);

    // second derivatives of the periodic fields on their own grid
    std::array<std::array<Field, 3>, 2> dd_m, dd_p;
    CellSlice sm, sp;
    const bool have_cells = !state.cells_zero && in.cell_minus && in.cell_plus;
    std::array<Field, 6> sm2, sp2;  // (00,01,02,11,12,22) sampled
    auto pack = [](int a, int b) { return a == 0 ? b : (b == 1 ? 3 : (a == 1 ? 4 : 5)); };
    if (have_cells) {
        sm = blend_cell(*in.cell_minus, state.t);
        sp = blend_cell(*in.cell_plus, state.t);
        for (int a = 0; a < nd; ++a)
            for (int b = a; b < nd; ++b) {
                Field m2 = central_derivative(sm.deriv[a], sm.grid, b);
                Field p2 = central_derivative(sp.deriv[a], sp.grid, b);
                // sample with the same interpolation as the state fields
                LineGrid line = state.line;
                sm2[pack(a, b)] = Field(nd, state.shape);
                sp2[pack(a, b)] = Field(nd, state.shape);
                for (int i = 0; i < state.shape[0]; ++i)
                    for (int j = 0; j < state.shape[1]; ++j)
                        for (int k = 0; k < state.shape[2]; ++k) {
                            sm2[pack(a, b)](i, j, k) = sample_periodic(m2, sm.grid, line.x(i), j, k);
                            sp2[pack(a, b)](i, j, k) = sample_periodic(p2, sp.grid, line.x(i), j, k);
                        }
            }
    } else {
        for (int s = 0; s < 6; ++s) {
            sm2[s] = Field(nd, state.shape);
            sp2[s] = Field(nd, state.shape);
        }
    }
    (void)dd_m;
    (void)dd_p;

    const double um = pr.endpoints().u_minus;
    const double up = pr.endpoints().u_plus;
    for (int i = 0; i < state.shape[0]; ++i) {
        const double x = state.line.x(i);
        const double et = state.eta[i];
        const double cdxx = pr.contact_dxx(x, state.t);
        const double rdxx = pr.rarefaction_dxx(x, state.t);
        const double dt_uhat = pr.composite_dt(x, state.t);
        for (int j = 0; j < state.shape[1]; ++j)
            for (int k = 0; k < state.shape[2]; ++k) {
                const size_t s = out.idx(i, j, k);
                const double tm = state.tminus.v[s], tp = state.tplus.v[s];
                // periodic-evolution right-hand sides
                double rm = 0.0, rp = 0.0;
                rm -= f1.deriv(um + tm) * state.dminus[0].v[s];
                rp -= f1.deriv(up + tp) * state.dplus[0].v[s];
                for (int d = 1; d < nd; ++d) {
                    rm -= transverse.f[d - 1].deriv(um + tm) * state.dminus[d].v[s];
                    rp -= transverse.f[d - 1].deriv(up + tp) * state.dplus[d].v[s];
                }
                for (int a = 0; a < nd; ++a)
                    for (int b = 0; b < nd; ++b) {
                        rm += A.at(a, b) * sm2[pack(std::min(a, b), std::max(a, b))].v[s];
                        rp += A.at(a, b) * sp2[pack(std::min(a, b), std::max(a, b))].v[s];
                    }
                const double dt_ubar = state.dteta[i] * (tp - tm) + (1.0 - et) * rm + et * rp + dt_uhat;

                double divf = f1.deriv(state.ubar.v[s]) * state.dubar[0].v[s];
                for (int d = 1; d < nd; ++d)
                    divf += transverse.f[d - 1].deriv(state.ubar.v[s]) * state.dubar[d].v[s];

                double visc = 0.0;
                for (int a = 0; a < nd; ++a)
                    for (int b = 0; b < nd; ++b) {
                        double dd = (1.0 - et) * sm2[pack(std::min(a, b), std::max(a, b))].v[s] +
                                    et * sp2[pack(std::min(a, b), std::max(a, b))].v[s];
                        if (a == 0)
                            dd += state.deta[i] * (state.dplus[b].v[s] - state.dminus[b].v[s]);
                        if (b == 0)
                            dd += state.deta[i] * (state.dplus[a].v[s] - state.dminus[a].v[s]);
                        if (a == 0 && b == 0)
                            dd += state.d2eta[i] * (tp - tm) + cdxx + rdxx;
                        visc += A.at(a, b) * dd;
                    }
                out.v[s] = dt_ubar + divf - visc;
            }
    }
    return out;
}

ResidualNorms ansatz_residual(const AnsatzInputs& in, double t, double dt_fd,
                              const LineGrid& line, const std::array<int, 3>& transverse_shape,
                              const TransverseFluxSet& transverse, const DiffusionMatrix& A,
                              SourceOptions opt) {
    // extend by one node per side so the centered stencils stay interior
    LineGrid ext{line.lo - line.h, line.h, line.n1 + 2};
    AnsatzState sm = build_ansatz(in, t - dt_fd, ext, transverse_shape);
    AnsatzState s0 = build_ansatz(in, t, ext, transverse_shape);
    AnsatzState sp = build_ansatz(in, t + dt_fd, ext, transverse_shape);
    SourceField src = compute_source(s0, transverse, A, opt);

    const int nd = s0.n;
    const Flux& f1 = s0.profiles->flux();
    const std::array<int, 3>& sh = s0.shape;
    const int n2 = sh[1], n3 = sh[2];
    const double h1 = line.h;
    const double h2 = 1.0 / n2, h3 = n3 > 1 ? 1.0 / n3 : 1.0;
    const double hs[3] = {h1, h2, h3};

    Field fx(nd, sh);  // f1(ubar) for x1 differencing
    for (size_t s = 0; s < fx.size(); ++s) fx.v[s] = f1.value(s0.ubar.v[s]);

    ResidualNorms rn;
    rn.h1 = h1;
    std::vector<double> w(line.n1, h1);
    w.front() = 0.5 * h1;
    w.back() = 0.5 * h1;
    const double tw = 1.0 / (static_cast<double>(n2) * n3);
    double acc1 = 0.0, acc2 = 0.0;

    auto wrap = [](int idx, int n) { return (idx % n + n) % n; };
    for (int i = 1; i + 1 < sh[0]; ++i) {
        for (int j = 0; j < n2; ++j)
            for (int k = 0; k < n3; ++k) {
                const double dtu = (sp.ubar(i, j, k) - sm.ubar(i, j, k)) / (2.0 * dt_fd);

                double divf = (fx(i + 1, j, k) - fx(i - 1, j, k)) / (2.0 * h1);
                for (int d = 1; d < nd; ++d) {
                    const auto& ft = transverse.f[d - 1];
                    int jp = j, jm = j, kp = k, km = k;
                    if (d == 1) { jp = wrap(j + 1, n2); jm = wrap(j - 1, n2); }
                    else { kp = wrap(k + 1, n3); km = wrap(k - 1, n3); }
                    divf += (ft.value(s0.ubar(i, jp, kp)) - ft.value(s0.ubar(i, jm, km))) /
                            (2.0 * hs[d]);
                }

                double visc = 0.0;
                for (int a = 0; a < nd; ++a)
                    for (int b = 0; b < nd; ++b) {
                        auto at = [&](int da, int db) {
                            int ii = i, jj = j, kk = k;
                            auto shift = [&](int axis, int by) {
                                if (axis == 0) ii += by;
                                else if (axis == 1) jj = wrap(jj + by, n2);
                                else kk = wrap(kk + by, n3);
                            };
                            shift(a, da);
                            shift(b, db);
                            return s0.ubar(ii, jj, kk);
                        };
                        double d2;
                        if (a == b)
                            d2 = (at(1, 0) - 2.0 * s0.ubar(i, j, k) + at(-1, 0)) / (hs[a] * hs[a]);
                        else
                            d2 = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) /
                                 (4.0 * hs[a] * hs[b]);
                        visc += A.at(a, b) * d2;
                    }

                const double r = dtu + divf - visc - src.j(i, j, k);
                acc1 += w[i - 1] * tw * std::abs(r);
                acc2 += w[i - 1] * tw * r * r;
                rn.linf = std::max(rn.linf, std::abs(r));
            }
    }
    rn.l1 = acc1;
    rn.l2 = std::sqrt(acc2);
    return rn;
}

}  // namespace compwave
