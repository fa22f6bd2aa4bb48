#include "gmcf/flow_torus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "gmcf/parallel.hpp"
#include "gmcf/smallvec.hpp"

namespace gmcf {

namespace {

struct Partial {
    double min_om = std::numeric_limits<double>::infinity();
    double max_om = 0, max_det = 0, max_en = 0, max_a2 = 0, max_h2 = 0;
    double vol = 0, max_vel = 0;
    long blow_p = -1;
};

// Flat neighbor indices (periodic) and wrap signs for one grid point.
struct Neighbors {
    long ip[kMaxDim], im[kMaxDim];
    int wp[kMaxDim], wm[kMaxDim];
};

inline void neighbors_of(const GridIndexer& ix, const int* idx, long p, int n,
                         Neighbors& nb) {
    for (int a = 0; a < n; ++a) {
        const long s = ix.strides[a];
        const int na = ix.shape[a];
        if (idx[a] + 1 == na) {
            nb.ip[a] = p - s * (na - 1);
            nb.wp[a] = 1;
        } else {
            nb.ip[a] = p + s;
            nb.wp[a] = 0;
        }
        if (idx[a] == 0) {
            nb.im[a] = p + s * (na - 1);
            nb.wm[a] = -1;
        } else {
            nb.im[a] = p - s;
            nb.wm[a] = 0;
        }
    }
}

inline void advance_odometer(int* idx, const int* shape, int n) {
    for (int a = n - 1; a >= 1; --a) {
        if (++idx[a] < shape[a]) return;
        idx[a] = 0;
    }
}

}  // namespace

double cfl_dt(const GridMap& map, double sigma) {
    const double dx = map.min_dx();
    return sigma * dx * dx / (2.0 * map.spec.n);
}

void compute_fields(const GridMap& map, double t, FieldSet& f) {
    const int n = map.spec.n, m = map.spec.m;
    const long npts = map.points();
    const double w_cell = map.cell_volume();

    f.omega.resize(npts);
    f.a2.resize(npts);
    f.sqrt_det.resize(npts);
    f.rhs.resize(npts * m);
    f.drift.resize(npts * n);
    f.kcoef.resize(npts * n * n);

    GridIndexer ix(map.shape);
    const long slab = ix.strides[0];
    const int rows = map.shape[0];
    std::vector<Partial> parts(rows);

    const double* v = map.values.data();
    const int* lw = map.winding.data();
    double dx[kMaxDim], inv2dx[kMaxDim], invdx2[kMaxDim];
    for (int a = 0; a < n; ++a) {
        dx[a] = map.dx(a);
        inv2dx[a] = 0.5 / dx[a];
        invdx2[a] = 1.0 / (dx[a] * dx[a]);
    }

    parallel_slabs(rows, [&](long r) {
        Partial& pp = parts[r];
        int idx[kMaxDim] = {0};
        idx[0] = static_cast<int>(r);
        Neighbors nb;

        for (long p = r * slab; p < (r + 1) * slab; ++p) {
            neighbors_of(ix, idx, p, n, nb);

            double vc[kMaxDim];
            bool finite = true;
            for (int c = 0; c < m; ++c) {
                vc[c] = v[p * m + c];
                finite = finite && std::isfinite(vc[c]);
            }

            // First and diagonal second derivatives of the lift.
            double D[kMaxDim][kMaxDim];     // D[alpha][a]
            double Sd[kMaxDim][kMaxDim];    // Sd[a][alpha]
            for (int a = 0; a < n; ++a) {
                for (int c = 0; c < m; ++c) {
                    const double fp = v[nb.ip[a] * m + c] + nb.wp[a] * lw[c * n + a];
                    const double fm = v[nb.im[a] * m + c] + nb.wm[a] * lw[c * n + a];
                    D[c][a] = (fp - fm) * inv2dx[a];
                    Sd[a][c] = (fp + fm - 2.0 * vc[c]) * invdx2[a];
                }
            }
            // Mixed second derivatives, four-point cross stencil.
            double Sm[6][kMaxDim];
            int pair_id[kMaxDim][kMaxDim];
            {
                int q = 0;
                for (int a = 0; a < n; ++a)
                    for (int b = a + 1; b < n; ++b) {
                        pair_id[a][b] = q;
                        const long qpp = nb.ip[a] + nb.ip[b] - p;
                        const long qpm = nb.ip[a] + nb.im[b] - p;
                        const long qmp = nb.im[a] + nb.ip[b] - p;
                        const long qmm = nb.im[a] + nb.im[b] - p;
                        const double scale = inv2dx[a] * inv2dx[b];
                        for (int c = 0; c < m; ++c) {
                            const double wa = lw[c * n + a], wb = lw[c * n + b];
                            const double fpp = v[qpp * m + c] + nb.wp[a] * wa + nb.wp[b] * wb;
                            const double fpm = v[qpm * m + c] + nb.wp[a] * wa + nb.wm[b] * wb;
                            const double fmp = v[qmp * m + c] + nb.wm[a] * wa + nb.wp[b] * wb;
                            const double fmm = v[qmm * m + c] + nb.wm[a] * wa + nb.wm[b] * wb;
                            Sm[q][c] = (fpp - fpm - fmp + fmm) * scale;
                        }
                        ++q;
                    }
            }
            auto svec = [&](int i, int j) -> const double* {
                return i == j ? Sd[i] : Sm[pair_id[std::min(i, j)][std::max(i, j)]];
            };

            // Induced metric Lambda = I + D^T D.
            double lam[16], linv[16], det;
            double energy = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    double s = (i == j) ? 1.0 : 0.0;
                    for (int c = 0; c < m; ++c) s += D[c][i] * D[c][j];
                    lam[i * n + j] = s;
                    lam[j * n + i] = s;
                }
            for (int c = 0; c < m; ++c)
                for (int i = 0; i < n; ++i) energy += D[c][i] * D[c][i];
            invert_spd_small(n, lam, linv, det);
            const double sqdet = std::sqrt(det);
            const double om = 1.0 / sqdet;

            // Velocity rhs^alpha = Lambda^{ij} S_ij^alpha.
            double rhs[kMaxDim];
            double vel2 = 0.0;
            for (int c = 0; c < m; ++c) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) {
                    s += linv[i * n + i] * Sd[i][c];
                    for (int j = i + 1; j < n; ++j)
                        s += 2.0 * linv[i * n + j] * Sm[pair_id[i][j]][c];
                }
                rhs[c] = s;
                vel2 += s * s;
            }
            finite = finite && std::isfinite(vel2) && std::isfinite(om);
            if (!finite) {
                if (pp.blow_p < 0) pp.blow_p = p;
                for (int c = 0; c < m; ++c) f.rhs[p * m + c] = rhs[c];
                advance_odometer(idx, ix.shape.data(), n);
                continue;
            }

            // Second fundamental form via the normal projector:
            // B_ij = (0, S_ij) - dF_k Lambda^{kl} <dF_l, (0, S_ij)>.
            const int npair = n * (n + 1) / 2;
            double bb[10][kMaxDim];  // base components, pairs of (i<=j)
            double bt[10][kMaxDim];  // target components
            int pcount = 0;
            int pidx[kMaxDim][kMaxDim];
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    const double* s_ij = svec(i, j);
                    double cvec[kMaxDim], coef[kMaxDim];
                    for (int l = 0; l < n; ++l) {
                        double s = 0.0;
                        for (int c = 0; c < m; ++c) s += D[c][l] * s_ij[c];
                        cvec[l] = s;
                    }
                    for (int k = 0; k < n; ++k) {
                        double s = 0.0;
                        for (int l = 0; l < n; ++l) s += linv[k * n + l] * cvec[l];
                        coef[k] = s;
                    }
                    for (int k = 0; k < n; ++k) bb[pcount][k] = -coef[k];
                    for (int c = 0; c < m; ++c) {
                        double s = s_ij[c];
                        for (int k = 0; k < n; ++k) s -= D[c][k] * coef[k];
                        bt[pcount][c] = s;
                    }
                    pidx[i][j] = pcount;
                    pidx[j][i] = pcount;
                    ++pcount;
                }
            (void)npair;

            // Pairwise inner products <B_ij, B_kl>.
            double bip[10][10];
            for (int a = 0; a < pcount; ++a)
                for (int b = a; b < pcount; ++b) {
                    double s = 0.0;
                    for (int k = 0; k < n; ++k) s += bb[a][k] * bb[b][k];
                    for (int c = 0; c < m; ++c) s += bt[a][c] * bt[b][c];
                    bip[a][b] = s;
                    bip[b][a] = s;
                }
            double a2 = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            a2 += linv[i * n + k] * linv[j * n + l] *
                                  bip[pidx[i][j]][pidx[k][l]];
            double hb[kMaxDim] = {0}, ht[kMaxDim] = {0};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double coeff = linv[i * n + j];
                    const int q = pidx[i][j];
                    for (int k = 0; k < n; ++k) hb[k] += coeff * bb[q][k];
                    for (int c = 0; c < m; ++c) ht[c] += coeff * bt[q][c];
                }
            double h2 = 0.0;
            for (int k = 0; k < n; ++k) h2 += hb[k] * hb[k];
            for (int c = 0; c < m; ++c) h2 += ht[c] * ht[c];

            // Normal-gauge chart drift: xdot^i = -Lambda^{ij} <f_t, d_j f>.
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) {
                    double ct = 0.0;
                    for (int c = 0; c < m; ++c) ct += D[c][j] * rhs[c];
                    s += linv[i * n + j] * ct;
                }
                f.drift[p * n + i] = -s;
            }

            f.omega[p] = om;
            f.a2[p] = a2;
            f.sqrt_det[p] = sqdet;
            for (int c = 0; c < m; ++c) f.rhs[p * m + c] = rhs[c];
            for (int i = 0; i < n * n; ++i) f.kcoef[p * n * n + i] = sqdet * linv[i];

            pp.min_om = std::min(pp.min_om, om);
            pp.max_om = std::max(pp.max_om, om);
            pp.max_det = std::max(pp.max_det, det);
            pp.max_en = std::max(pp.max_en, energy);
            pp.max_a2 = std::max(pp.max_a2, a2);
            pp.max_h2 = std::max(pp.max_h2, h2);
            pp.vol += sqdet;
            pp.max_vel = std::max(pp.max_vel, std::sqrt(vel2));

            advance_odometer(idx, ix.shape.data(), n);
        }
    });

    // Serial combine in slab order: results are independent of threading.
    DiagnosticsRecord rec;
    rec.t = t;
    rec.min_star_omega = std::numeric_limits<double>::infinity();
    long blow_p = -1;
    for (const Partial& pp : parts) {
        if (pp.blow_p >= 0 && blow_p < 0) blow_p = pp.blow_p;
        rec.min_star_omega = std::min(rec.min_star_omega, pp.min_om);
        rec.max_star_omega = std::max(rec.max_star_omega, pp.max_om);
        rec.max_det = std::max(rec.max_det, pp.max_det);
        rec.max_energy_density = std::max(rec.max_energy_density, pp.max_en);
        rec.max_a2 = std::max(rec.max_a2, pp.max_a2);
        rec.max_h2 = std::max(rec.max_h2, pp.max_h2);
        rec.total_volume += pp.vol;
        rec.max_velocity = std::max(rec.max_velocity, pp.max_vel);
    }
    rec.total_volume *= w_cell;
    if (blow_p >= 0) {
        std::vector<int> bidx(n);
        ix.unflatten(blow_p, bidx);
        throw BlowupError(t, bidx, "non-finite value in flow update at t=" + std::to_string(t));
    }
    f.record = rec;
}

void laplace_beltrami(const GridMap& map, const FieldSet& f,
                      const std::vector<double>& u, std::vector<double>& out) {
    const int n = map.spec.n;
    const long npts = map.points();
    out.resize(npts);
    GridIndexer ix(map.shape);
    const long slab = ix.strides[0];
    const int rows = map.shape[0];
    const int nn = n * n;

    double invdx[kMaxDim], inv2dx[kMaxDim];
    for (int a = 0; a < n; ++a) {
        invdx[a] = map.shape[a];
        inv2dx[a] = 0.5 * map.shape[a];
    }
    const double* kc = f.kcoef.data();

    parallel_slabs(rows, [&](long r) {
        int idx[kMaxDim] = {0};
        idx[0] = static_cast<int>(r);
        Neighbors nb;
        for (long p = r * slab; p < (r + 1) * slab; ++p) {
            neighbors_of(ix, idx, p, n, nb);
            // Offsets are additive across axes; scalars are plainly periodic.
            long off_p[kMaxDim], off_m[kMaxDim];
            for (int a = 0; a < n; ++a) {
                off_p[a] = nb.ip[a] - p;
                off_m[a] = nb.im[a] - p;
            }
            auto central = [&](long q, int j) {
                return (u[q + off_p[j]] - u[q + off_m[j]]) * inv2dx[j];
            };
            double div = 0.0;
            for (int a = 0; a < n; ++a) {
                const long qp = nb.ip[a], qm = nb.im[a];
                double flux_p = 0.0, flux_m = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double k_p = 0.5 * (kc[p * nn + a * n + j] + kc[qp * nn + a * n + j]);
                    const double k_m = 0.5 * (kc[p * nn + a * n + j] + kc[qm * nn + a * n + j]);
                    double du_p, du_m;
                    if (j == a) {
                        du_p = (u[qp] - u[p]) * invdx[a];
                        du_m = (u[p] - u[qm]) * invdx[a];
                    } else {
                        du_p = 0.5 * (central(p, j) + central(qp, j));
                        du_m = 0.5 * (central(p, j) + central(qm, j));
                    }
                    flux_p += k_p * du_p;
                    flux_m += k_m * du_m;
                }
                div += (flux_p - flux_m) * invdx[a];
            }
            out[p] = div / f.sqrt_det[p];
            advance_odometer(idx, ix.shape.data(), n);
        }
    });
}

void drift_advect(const GridMap& map, const FieldSet& f,
                  const std::vector<double>& u, std::vector<double>& out) {
    const int n = map.spec.n;
    const long npts = map.points();
    out.resize(npts);
    GridIndexer ix(map.shape);
    const long slab = ix.strides[0];
    const int rows = map.shape[0];

    double inv2dx[kMaxDim];
    for (int a = 0; a < n; ++a) inv2dx[a] = 0.5 * map.shape[a];

    parallel_slabs(rows, [&](long r) {
        int idx[kMaxDim] = {0};
        idx[0] = static_cast<int>(r);
        Neighbors nb;
        for (long p = r * slab; p < (r + 1) * slab; ++p) {
            neighbors_of(ix, idx, p, n, nb);
            double s = 0.0;
            for (int a = 0; a < n; ++a)
                s += f.drift[p * n + a] * (u[nb.ip[a]] - u[nb.im[a]]) * inv2dx[a];
            out[p] = s;
            advance_odometer(idx, ix.shape.data(), n);
        }
    });
}

double pair_inequality_margin(const GridMap& map, const FieldSet& f_t,
                              const std::vector<double>& omega_next, double dt,
                              double delta) {
    std::vector<double> lap, adv;
    laplace_beltrami(map, f_t, f_t.omega, lap);
    drift_advect(map, f_t, f_t.omega, adv);
    double margin = std::numeric_limits<double>::infinity();
    const long npts = map.points();
    for (long p = 0; p < npts; ++p) {
        const double ddt = (omega_next[p] - f_t.omega[p]) / dt + adv[p];
        margin = std::min(margin, ddt - lap[p] - delta * f_t.a2[p]);
    }
    return margin;
}

FlowState step(const FlowState& state, double dt) {
    if (dt > cfl_dt(state.map, 1.0) * (1.0 + 1e-12))
        throw std::invalid_argument("step: dt exceeds the CFL bound");
    const int m = state.map.spec.m;
    FieldSet f;
    compute_fields(state.map, state.t, f);

    FlowState next = state;
    const long npts = state.map.points();
    for (long p = 0; p < npts * m; ++p) next.map.values[p] += dt * f.rhs[p];
    next.t = state.t + dt;
    next.dt_last = dt;

    FieldSet f2;
    compute_fields(next.map, next.t, f2);
    next.diagnostics = f2.record;
    next.diagnostics.dt = dt;
    return next;
}

RunResult run(const FlowState& initial, const RunOptions& opt) {
    RunResult res;
    res.final_state = initial;
    FlowState& st = res.final_state;

    const int m = st.map.spec.m;
    const long npts = st.map.points();
    const double dt_cfl = cfl_dt(st.map, opt.sigma);
    const double dx = st.map.min_dx();

    FieldSet fs_a, fs_b;
    FieldSet* cur = &fs_a;
    FieldSet* nxt = &fs_b;
    std::vector<double> scratch(npts * m), lap, adv;

    compute_fields(st.map, st.t, *cur);
    st.diagnostics = cur->record;
    res.series.push_back(cur->record);
    res.max_det_over_run = cur->record.max_det;

    double delta = opt.delta;
    if (delta < 0.0) delta = 2.0 - cur->record.max_det;
    res.delta_used = delta;
    const bool track = opt.track_margin && delta > 0.0;
    res.min_inequality_margin = std::numeric_limits<double>::infinity();
    res.max_volume_step_increase = -std::numeric_limits<double>::infinity();
    res.worst_min_omega_drop_rate = -std::numeric_limits<double>::infinity();
    (void)dx;

    double next_output = opt.output_every > 0 ? st.t + opt.output_every : 0.0;
    double next_snapshot = opt.snapshot_every > 0 ? st.t + opt.snapshot_every : 0.0;
    if (opt.snapshot_cb && opt.snapshot_every > 0) opt.snapshot_cb(st);

    while (st.t < opt.t_end - 1e-14) {
        const double dt = std::min(dt_cfl, opt.t_end - st.t);
        for (long p = 0; p < npts * m; ++p)
            scratch[p] = st.map.values[p] + dt * cur->rhs[p];
        st.map.values.swap(scratch);

        try {
            compute_fields(st.map, st.t + dt, *nxt);
        } catch (const BlowupError& e) {
            st.map.values.swap(scratch);  // restore the last finite state
            res.status = RunStatus::blew_up;
            res.blowup_t = e.t;
            res.blowup_index = e.index;
            res.blowup_what = e.what();
            return res;
        }

        if (track) {
            laplace_beltrami(st.map, *cur, cur->omega, lap);
            drift_advect(st.map, *cur, cur->omega, adv);
            double margin = std::numeric_limits<double>::infinity();
            for (long p = 0; p < npts; ++p) {
                const double ddt = (nxt->omega[p] - cur->omega[p]) / dt + adv[p];
                margin = std::min(margin, ddt - lap[p] - delta * cur->a2[p]);
            }
            res.min_inequality_margin = std::min(res.min_inequality_margin, margin);
        }
        res.max_volume_step_increase = std::max(
            res.max_volume_step_increase,
            nxt->record.total_volume - cur->record.total_volume);
        res.worst_min_omega_drop_rate = std::max(
            res.worst_min_omega_drop_rate,
            (cur->record.min_star_omega - nxt->record.min_star_omega) / dt);
        res.max_det_over_run = std::max(res.max_det_over_run, nxt->record.max_det);

        st.t += dt;
        st.dt_last = dt;
        std::swap(cur, nxt);
        st.diagnostics = cur->record;
        st.diagnostics.dt = dt;

        const bool final_step = st.t >= opt.t_end - 1e-14;
        if ((opt.output_every > 0 && st.t >= next_output - 1e-12) || final_step) {
            res.series.push_back(st.diagnostics);
            while (opt.output_every > 0 && next_output <= st.t + 1e-12)
                next_output += opt.output_every;
        }
        if (opt.snapshot_cb && opt.snapshot_every > 0 &&
            (st.t >= next_snapshot - 1e-12 || final_step)) {
            opt.snapshot_cb(st);
            while (next_snapshot <= st.t + 1e-12) next_snapshot += opt.snapshot_every;
        }
    }
    return res;
}

}  // namespace gmcf
