#include "gmcf/reference.hpp"

#include <cmath>
#include <limits>

namespace gmcf::ref {

namespace {

// Value of the lift at idx shifted by (da, db) on axes (a, b), with winding
// corrections when the shift wraps around the torus.
double lifted_value(const GridMap& map, std::vector<int> idx, int comp, int a,
                    int da, int b, int db) {
    double corr = 0.0;
    auto shift = [&](int axis, int d) {
        idx[axis] += d;
        if (idx[axis] < 0) {
            idx[axis] += map.shape[axis];
            corr -= map.l(comp, axis);
        } else if (idx[axis] >= map.shape[axis]) {
            idx[axis] -= map.shape[axis];
            corr += map.l(comp, axis);
        }
    };
    if (da != 0) shift(a, da);
    if (db != 0) shift(b, db);
    GridIndexer ix(map.shape);
    return map.values[ix.flat(idx) * map.spec.m + comp] + corr;
}

}  // namespace

PointStencil point_stencil(const GridMap& map, const std::vector<int>& idx) {
    const int n = map.spec.n, m = map.spec.m;
    PointStencil st;
    st.d = Mat(m, n);
    st.d2.assign(n, std::vector<Vec>(n, Vec(m)));
    for (int a = 0; a < n; ++a) {
        const double dxa = map.dx(a);
        for (int c = 0; c < m; ++c) {
            const double fp = lifted_value(map, idx, c, a, +1, 0, 0);
            const double fm = lifted_value(map, idx, c, a, -1, 0, 0);
            const double f0 = lifted_value(map, idx, c, 0, 0, 0, 0);
            st.d(c, a) = (fp - fm) / (2.0 * dxa);
            st.d2[a][a][c] = (fp + fm - 2.0 * f0) / (dxa * dxa);
        }
        for (int b = a + 1; b < n; ++b) {
            const double dxb = map.dx(b);
            for (int c = 0; c < m; ++c) {
                const double fpp = lifted_value(map, idx, c, a, +1, b, +1);
                const double fpm = lifted_value(map, idx, c, a, +1, b, -1);
                const double fmp = lifted_value(map, idx, c, a, -1, b, +1);
                const double fmm = lifted_value(map, idx, c, a, -1, b, -1);
                const double v = (fpp - fpm - fmp + fmm) / (4.0 * dxa * dxb);
                st.d2[a][b][c] = v;
                st.d2[b][a][c] = v;
            }
        }
    }
    return st;
}

PointData point_data(const GridMap& map, const std::vector<int>& idx) {
    const int n = map.spec.n, m = map.spec.m;
    const PointStencil st = point_stencil(map, idx);

    PointData pd;
    pd.lambda = Mat::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < m; ++c) pd.lambda(i, j) += st.d(c, i) * st.d(c, j);
    pd.lambda_inv = inverse_spd(pd.lambda);
    pd.det = det_spd(pd.lambda);
    pd.omega = 1.0 / std::sqrt(pd.det);
    for (int c = 0; c < m; ++c)
        for (int i = 0; i < n; ++i) pd.energy += st.d(c, i) * st.d(c, i);

    pd.rhs = Vec(m);
    for (int c = 0; c < m; ++c) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += pd.lambda_inv(i, j) * st.d2[i][j][c];
        pd.rhs[c] = s;
    }

    // Ambient derivatives on the flat chart: dF_i = (e_i, d_i f),
    // d2F_ij = (0, d_ij f).
    std::vector<Vec> first(n, Vec(n + m));
    std::vector<std::vector<Vec>> second(n, std::vector<Vec>(n, Vec(n + m)));
    for (int i = 0; i < n; ++i) {
        first[i][i] = 1.0;
        for (int c = 0; c < m; ++c) first[i][n + c] = st.d(c, i);
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < m; ++c) second[i][j][n + c] = st.d2[i][j][c];
    }
    const SffData sff = second_fundamental_form(first, second, pd.lambda_inv);
    pd.a2 = sff.a2;
    pd.h2 = sff.h2;

    pd.drift = Vec(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            double ct = 0.0;
            for (int c = 0; c < m; ++c) ct += st.d(c, j) * pd.rhs[c];
            s += pd.lambda_inv(i, j) * ct;
        }
        pd.drift[i] = -s;
    }
    return pd;
}

void compute_fields(const GridMap& map, double t, FieldSet& f) {
    const int n = map.spec.n, m = map.spec.m;
    const long npts = map.points();
    f.omega.resize(npts);
    f.a2.resize(npts);
    f.sqrt_det.resize(npts);
    f.rhs.resize(npts * m);
    f.drift.resize(npts * n);
    f.kcoef.resize(npts * n * n);

    DiagnosticsRecord rec;
    rec.t = t;
    rec.min_star_omega = std::numeric_limits<double>::infinity();

    GridIndexer ix(map.shape);
    std::vector<int> idx(n, 0);
    for (long p = 0; p < npts; ++p) {
        ix.unflatten(p, idx);
        const PointData pd = point_data(map, idx);
        f.omega[p] = pd.omega;
        f.a2[p] = pd.a2;
        f.sqrt_det[p] = std::sqrt(pd.det);
        for (int c = 0; c < m; ++c) f.rhs[p * m + c] = pd.rhs[c];
        for (int i = 0; i < n; ++i) f.drift[p * n + i] = pd.drift[i];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                f.kcoef[p * n * n + i * n + j] = f.sqrt_det[p] * pd.lambda_inv(i, j);

        rec.min_star_omega = std::min(rec.min_star_omega, pd.omega);
        rec.max_star_omega = std::max(rec.max_star_omega, pd.omega);
        rec.max_det = std::max(rec.max_det, pd.det);
        rec.max_energy_density = std::max(rec.max_energy_density, pd.energy);
        rec.max_a2 = std::max(rec.max_a2, pd.a2);
        rec.max_h2 = std::max(rec.max_h2, pd.h2);
        rec.total_volume += f.sqrt_det[p];
        rec.max_velocity = std::max(rec.max_velocity, norm(pd.rhs));
    }
    rec.total_volume *= map.cell_volume();
    f.record = rec;
}

void apply_step(GridMap& map, const FieldSet& f, double dt) {
    for (std::size_t p = 0; p < map.values.size(); ++p) map.values[p] += dt * f.rhs[p];
}

}  // namespace gmcf::ref
