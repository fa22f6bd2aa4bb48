#include "gmcf/flow_sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gmcf/geometry.hpp"
#include "gmcf/parallel.hpp"
#include "gmcf/sphere_chart.hpp"

namespace gmcf {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(BoundaryKind b) {
    return b == BoundaryKind::null_homotopic ? "null_homotopic" : "degree_one";
}

double ProfileState::dtheta() const { return kPi / num_nodes; }

double ProfileState::boundary_value() const {
    return boundary == BoundaryKind::degree_one ? kPi : 0.0;
}

double ProfileState::psi_at(int k) const {
    if (k < 0) return -psi[0];
    if (k >= num_nodes) return 2.0 * boundary_value() - psi[num_nodes - 1];
    return psi[k];
}

ProfileState init_profile(int n, int num_nodes, BoundaryKind boundary,
                          const std::function<double(double)>& psi0) {
    if (n < 2) throw ConfigError("init_profile: sphere dimension must be >= 2");
    if (num_nodes < 8) throw ConfigError("init_profile: need at least 8 nodes");
    ProfileState st;
    st.n = n;
    st.num_nodes = num_nodes;
    st.boundary = boundary;
    st.psi.resize(num_nodes);
    for (int k = 0; k < num_nodes; ++k) {
        st.psi[k] = psi0(st.theta(k));
        if (!std::isfinite(st.psi[k]))
            throw ConfigError("init_profile: non-finite initial profile");
    }
    const double b0 = psi0(0.0), b1 = psi0(kPi);
    if (std::fabs(b0) > 1e-10 || std::fabs(b1 - st.boundary_value()) > 1e-10)
        throw ConfigError("init_profile: profile does not match boundary_kind");
    return st;
}

std::vector<double> reduced_rhs(const ProfileState& state) {
    const int N = state.num_nodes;
    const double dth = state.dtheta();
    const double inv2 = 0.5 / dth, invsq = 1.0 / (dth * dth);
    std::vector<double> rhs(N);
    for (int k = 0; k < N; ++k) {
        const double pm = state.psi_at(k - 1), p0 = state.psi[k], pp = state.psi_at(k + 1);
        const double dpsi = (pp - pm) * inv2;
        const double ddpsi = (pp + pm - 2.0 * p0) * invsq;
        const double th = state.theta(k);
        const double st = std::sin(th), ct = std::cos(th);
        const double sp = std::sin(p0), cp = std::cos(p0);
        const double r = ddpsi / (1.0 + dpsi * dpsi) +
                         (state.n - 1) * (st * ct * dpsi - sp * cp) / (st * st + sp * sp);
        if (!std::isfinite(r))
            throw BlowupError(state.t, {k},
                              "non-finite profile velocity at node " + std::to_string(k));
        rhs[k] = r;
    }
    return rhs;
}

namespace {

// |A|^2 and |H|^2 of the graph point through the ambient embedding of
// S^n x S^n in R^{2(n+1)}, with the same projector route as the torus
// kernel. The equivariant orbit is evaluated at the generic chart point
// (theta, pi/2, ..., pi/2). Raw stack arrays: this runs per node per step.
void ambient_a2_h2(int n, double th, double psi, double dpsi, double ddpsi,
                   double& a2, double& h2) {
    constexpr int kNa = 2 * (kMaxDim + 1);
    const int na = 2 * (n + 1);

    double xb[kMaxDim], xt[kMaxDim];
    xb[0] = th;
    xt[0] = psi;
    for (int i = 1; i < n; ++i) xb[i] = xt[i] = 0.5 * kPi;

    const Vec pb = sphere_chart::embed(xb, n);
    const Vec pt = sphere_chart::embed(xt, n);
    thread_local std::vector<Vec> db, dt;
    thread_local std::vector<std::vector<Vec>> hb, ht;
    sphere_chart::embed_jacobian(xb, n, db);
    sphere_chart::embed_jacobian(xt, n, dt);
    sphere_chart::embed_hessian(xb, n, hb);
    sphere_chart::embed_hessian(xt, n, ht);

    // Graph derivatives F = (Phi_b(x), Phi_t(psi(x1), x2..)) by chain rule.
    double F[kMaxDim][kNa];
    double S[kMaxDim][kMaxDim][kNa];
    const int half = n + 1;
    for (int c = 0; c < half; ++c) {
        F[0][c] = db[0][c];
        F[0][half + c] = dpsi * dt[0][c];
        S[0][0][c] = hb[0][0][c];
        S[0][0][half + c] = ddpsi * dt[0][c] + dpsi * dpsi * ht[0][0][c];
    }
    for (int a = 1; a < n; ++a) {
        for (int c = 0; c < half; ++c) {
            F[a][c] = db[a][c];
            F[a][half + c] = dt[a][c];
            S[0][a][c] = hb[0][a][c];
            S[0][a][half + c] = dpsi * ht[0][a][c];
            S[a][0][c] = S[0][a][c];
            S[a][0][half + c] = S[0][a][half + c];
        }
        for (int b = a; b < n; ++b)
            for (int c = 0; c < half; ++c) {
                S[a][b][c] = hb[a][b][c];
                S[a][b][half + c] = ht[a][b][c];
                S[b][a][c] = S[a][b][c];
                S[b][a][half + c] = S[a][b][half + c];
            }
    }

    // Project the second derivatives onto T(S^n x S^n): remove the
    // components along the factor normals (p, 0) and (0, q).
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double d1 = 0.0, d2 = 0.0;
            for (int c = 0; c < half; ++c) {
                d1 += S[i][j][c] * pb[c];
                d2 += S[i][j][half + c] * pt[c];
            }
            for (int c = 0; c < half; ++c) {
                S[i][j][c] -= d1 * pb[c];
                S[i][j][half + c] -= d2 * pt[c];
                S[j][i][c] = S[i][j][c];
                S[j][i][half + c] = S[i][j][half + c];
            }
        }

    double lam[16], linv[16], det;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int c = 0; c < na; ++c) s += F[i][c] * F[j][c];
            lam[i * n + j] = s;
            lam[j * n + i] = s;
        }
    invert_spd_small(n, lam, linv, det);

    // B_ij = S_ij - F_k Lambda^{kl} <F_l, S_ij>, pairs i <= j.
    double B[10][kNa];
    int pidx[kMaxDim][kMaxDim];
    int pc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double cvec[kMaxDim], coef[kMaxDim];
            for (int l = 0; l < n; ++l) {
                double s = 0.0;
                for (int c = 0; c < na; ++c) s += F[l][c] * S[i][j][c];
                cvec[l] = s;
            }
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += linv[k * n + l] * cvec[l];
                coef[k] = s;
            }
            for (int c = 0; c < na; ++c) {
                double s = S[i][j][c];
                for (int k = 0; k < n; ++k) s -= coef[k] * F[k][c];
                B[pc][c] = s;
            }
            pidx[i][j] = pc;
            pidx[j][i] = pc;
            ++pc;
        }

    double bip[10][10];
    for (int p = 0; p < pc; ++p)
        for (int q = p; q < pc; ++q) {
            double s = 0.0;
            for (int c = 0; c < na; ++c) s += B[p][c] * B[q][c];
            bip[p][q] = s;
            bip[q][p] = s;
        }
    a2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    a2 += linv[i * n + k] * linv[j * n + l] * bip[pidx[i][j]][pidx[k][l]];
    double hvec[kNa] = {0};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double coeff = linv[i * n + j];
            const double* b = B[pidx[i][j]];
            for (int c = 0; c < na; ++c) hvec[c] += coeff * b[c];
        }
    h2 = 0.0;
    for (int c = 0; c < na; ++c) h2 += hvec[c] * hvec[c];
}

}  // namespace

void compute_profile_fields(const ProfileState& state, ProfileFields& f) {
    const int N = state.num_nodes, n = state.n;
    const double dth = state.dtheta();
    const double inv2 = 0.5 / dth, invsq = 1.0 / (dth * dth);

    f.rhs.resize(N);
    f.omega.resize(N);
    f.a2.resize(N);
    f.lambda1.resize(N);
    f.lambda2.resize(N);
    f.h2.resize(N);
    f.kcoef.resize(N);
    f.weight.resize(N);
    f.drift.resize(N);

    long blow = -1;
    parallel_slabs(N, [&](long k) {
        const double pm = state.psi_at(static_cast<int>(k) - 1);
        const double p0 = state.psi[k];
        const double pp = state.psi_at(static_cast<int>(k) + 1);
        const double dpsi = (pp - pm) * inv2;
        const double ddpsi = (pp + pm - 2.0 * p0) * invsq;
        const double th = state.theta(static_cast<int>(k));
        const double st = std::sin(th), ct = std::cos(th);
        const double sp = std::sin(p0), cp = std::cos(p0);

        const double rhs = ddpsi / (1.0 + dpsi * dpsi) +
                           (n - 1) * (st * ct * dpsi - sp * cp) / (st * st + sp * sp);
        f.rhs[k] = rhs;
        if (!std::isfinite(rhs)) return;

        const double l1 = std::fabs(dpsi);
        const double l2 = std::fabs(sp / st);
        f.lambda1[k] = l1;
        f.lambda2[k] = l2;
        const double q1 = 1.0 + l1 * l1, q2 = 1.0 + l2 * l2;
        const double det = q1 * std::pow(q2, n - 1);
        f.omega[k] = 1.0 / std::sqrt(det);
        // W = sqrt(det Lambda_chart) reduced over the orbit directions.
        const double w = std::sqrt(q1) * std::pow(st * st + sp * sp, 0.5 * (n - 1));
        f.weight[k] = w;
        f.kcoef[k] = w / q1;
        f.drift[k] = -rhs * dpsi / q1;

        double a2v, h2v;
        ambient_a2_h2(n, th, p0, dpsi, ddpsi, a2v, h2v);
        f.a2[k] = a2v;
        f.h2[k] = h2v;
    });

    ProfileDiagnostics rec;
    rec.base.t = state.t;
    rec.base.min_star_omega = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) {
        if (!std::isfinite(f.rhs[k])) {
            blow = k;
            break;
        }
        const double l1 = f.lambda1[k], l2 = f.lambda2[k];
        const double det = (1.0 + l1 * l1) * std::pow(1.0 + l2 * l2, n - 1);
        rec.base.min_star_omega = std::min(rec.base.min_star_omega, f.omega[k]);
        rec.base.max_star_omega = std::max(rec.base.max_star_omega, f.omega[k]);
        rec.base.max_det = std::max(rec.base.max_det, det);
        rec.base.max_energy_density =
            std::max(rec.base.max_energy_density, l1 * l1 + (n - 1) * l2 * l2);
        rec.base.max_a2 = std::max(rec.base.max_a2, f.a2[k]);
        rec.base.max_h2 = std::max(rec.base.max_h2, f.h2[k]);
        rec.base.total_volume += f.weight[k];
        rec.base.max_velocity = std::max(rec.base.max_velocity, std::fabs(f.rhs[k]));
        rec.max_abs_psi = std::max(rec.max_abs_psi, std::fabs(state.psi[k]));
        rec.max_lambda = std::max(rec.max_lambda, std::max(l1, l2));
    }
    rec.base.total_volume *= state.dtheta() * sphere_chart::unit_sphere_area(n - 1);
    if (blow >= 0)
        throw BlowupError(state.t, {static_cast<int>(blow)},
                          "non-finite profile velocity at node " + std::to_string(blow));
    f.record = rec;
}

void profile_laplace(const ProfileState& state, const ProfileFields& f,
                     const std::vector<double>& u, std::vector<double>& out) {
    const int N = state.num_nodes;
    const double dth = state.dtheta();
    out.resize(N);
    // Even reflection for scalars and coefficients at both poles.
    auto uat = [&](int k) { return u[k < 0 ? 0 : (k >= N ? N - 1 : k)]; };
    auto kat = [&](int k) { return f.kcoef[k < 0 ? 0 : (k >= N ? N - 1 : k)]; };
    for (int k = 0; k < N; ++k) {
        const double kp = 0.5 * (kat(k) + kat(k + 1));
        const double km = 0.5 * (kat(k) + kat(k - 1));
        const double flux = kp * (uat(k + 1) - u[k]) - km * (u[k] - uat(k - 1));
        out[k] = flux / (dth * dth) / f.weight[k];
    }
}

ProfileRunResult run_profile(const ProfileState& initial, const ProfileRunOptions& opt) {
    ProfileRunResult res;
    res.final_state = initial;
    ProfileState& st = res.final_state;
    const int N = st.num_nodes;
    const double dth = st.dtheta();
    // Heat CFL with a 1/n safety factor: the orbit term contributes a
    // reaction of size (n-1)/sin^2(theta) ~ 4(n-1)/dtheta^2 at the first
    // node, on top of the 1-D diffusion stencil.
    const double dt_cfl = opt.sigma * dth * dth / (2.0 * st.n);

    ProfileFields fs_a, fs_b;
    ProfileFields* cur = &fs_a;
    ProfileFields* nxt = &fs_b;
    std::vector<double> scratch(N), lap(N);

    compute_profile_fields(st, *cur);
    res.series.push_back(cur->record);
    res.max_det_over_run = cur->record.base.max_det;

    double delta = opt.delta;
    if (delta < 0.0) delta = 2.0 - cur->record.base.max_det;
    res.delta_used = delta;
    const bool track = opt.track_margin && delta > 0.0;
    res.min_inequality_margin = std::numeric_limits<double>::infinity();
    res.max_volume_step_increase = -std::numeric_limits<double>::infinity();
    res.worst_min_omega_drop_rate = -std::numeric_limits<double>::infinity();

    double next_output = opt.output_every > 0 ? st.t + opt.output_every : 0.0;
    double next_snapshot = opt.snapshot_every > 0 ? st.t + opt.snapshot_every : 0.0;
    if (opt.snapshot_cb && opt.snapshot_every > 0) opt.snapshot_cb(st);

    while (st.t < opt.t_end - 1e-14) {
        const double dt = std::min(dt_cfl, opt.t_end - st.t);
        for (int k = 0; k < N; ++k) scratch[k] = st.psi[k] + dt * cur->rhs[k];
        st.psi.swap(scratch);

        try {
            st.t += dt;
            compute_profile_fields(st, *nxt);
        } catch (const BlowupError& e) {
            st.t -= dt;
            st.psi.swap(scratch);
            res.status = RunStatus::blew_up;
            res.blowup_t = e.t;
            res.blowup_index = e.index.empty() ? -1 : e.index[0];
            res.blowup_what = e.what();
            return res;
        }

        if (track) {
            profile_laplace(st, *cur, cur->omega, lap);
            double margin = std::numeric_limits<double>::infinity();
            auto om = [&](int k) {
                return cur->omega[k < 0 ? 0 : (k >= N ? N - 1 : k)];
            };
            for (int k = 0; k < N; ++k) {
                const double adv =
                    cur->drift[k] * (om(k + 1) - om(k - 1)) * 0.5 / dth;
                const double ddt = (nxt->omega[k] - cur->omega[k]) / dt + adv;
                margin = std::min(margin, ddt - lap[k] - delta * cur->a2[k]);
            }
            res.min_inequality_margin = std::min(res.min_inequality_margin, margin);
        }
        res.max_volume_step_increase =
            std::max(res.max_volume_step_increase,
                     nxt->record.base.total_volume - cur->record.base.total_volume);
        res.worst_min_omega_drop_rate = std::max(
            res.worst_min_omega_drop_rate,
            (cur->record.base.min_star_omega - nxt->record.base.min_star_omega) / dt);
        res.max_det_over_run =
            std::max(res.max_det_over_run, nxt->record.base.max_det);

        st.dt_last = dt;
        std::swap(cur, nxt);

        const bool final_step = st.t >= opt.t_end - 1e-14;
        if ((opt.output_every > 0 && st.t >= next_output - 1e-12) || final_step) {
            ProfileDiagnostics rec = cur->record;
            rec.base.dt = dt;
            res.series.push_back(rec);
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
