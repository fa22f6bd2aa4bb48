#include "gmcf/verify.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

#include "gmcf/config.hpp"
#include "gmcf/geometry.hpp"
#include "gmcf/reference.hpp"
#include "gmcf/svd.hpp"

namespace gmcf {

namespace {

// Per-point data the identity checks need: SVD, adapted frames and the
// frame components of the second fundamental form.
struct FullPoint {
    SingularValueData svd;
    GraphFrames frames;
    std::vector<std::vector<std::vector<double>>> h;
};

FullPoint full_point(const GridMap& map, const std::vector<int>& idx) {
    const int n = map.spec.n, m = map.spec.m;
    const ref::PointStencil st = ref::point_stencil(map, idx);

    Mat lambda = Mat::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < m; ++c) lambda(i, j) += st.d(c, i) * st.d(c, j);
    const Mat lambda_inv = inverse_spd(lambda);

    std::vector<Vec> first(n, Vec(n + m));
    std::vector<std::vector<Vec>> second(n, std::vector<Vec>(n, Vec(n + m)));
    for (int i = 0; i < n; ++i) {
        first[i][i] = 1.0;
        for (int c = 0; c < m; ++c) first[i][n + c] = st.d(c, i);
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < m; ++c) second[i][j][n + c] = st.d2[i][j][c];
    }
    const SffData sff = second_fundamental_form(first, second, lambda_inv);

    FullPoint fp;
    fp.svd = singular_decompose(st.d);
    fp.frames = build_frames(fp.svd);
    fp.h = sff_frame_components(sff, fp.svd, fp.frames);
    return fp;
}

}  // namespace

double gradient_identity_residual(const FlowState& state) {
    const GridMap& map = state.map;
    const int n = map.spec.n;
    FieldSet f;
    compute_fields(map, state.t, f);

    GridIndexer ix(map.shape);
    std::vector<int> idx(n);
    double worst = 0.0;
    for (long p = 0; p < map.points(); ++p) {
        ix.unflatten(p, idx);
        const FullPoint fp = full_point(map, idx);

        // Chart gradient of the *Omega field.
        double grad[kMaxDim];
        for (int a = 0; a < n; ++a) {
            std::vector<int> jp = idx, jm = idx;
            jp[a] = (idx[a] + 1) % map.shape[a];
            jm[a] = (idx[a] - 1 + map.shape[a]) % map.shape[a];
            grad[a] = (f.omega[ix.flat(jp)] - f.omega[ix.flat(jm)]) * 0.5 * map.shape[a];
        }
        for (int k = 0; k < n; ++k) {
            double lhs = 0.0;
            for (int a = 0; a < n; ++a) lhs += fp.svd.base_frame[k][a] * grad[a];
            lhs *= fp.frames.pi1_tangent_norms[k];
            double rhs = 0.0;
            const int r = std::min(n, map.spec.m);
            for (int q = 0; q < r; ++q) rhs += fp.svd.lambda(q) * fp.h[q][q][k];
            rhs *= -f.omega[p];
            worst = std::max(worst, std::fabs(lhs - rhs));
        }
    }
    return worst;
}

double evolution_identity_residual(const FlowState& at_t, const FlowState& at_t_dt) {
    const GridMap& map = at_t.map;
    const double dt = at_t_dt.t - at_t.t;
    if (dt <= 0.0)
        throw std::invalid_argument("evolution_identity_residual: states not ordered");

    FieldSet fa, fb;
    compute_fields(map, at_t.t, fa);
    compute_fields(at_t_dt.map, at_t_dt.t, fb);
    std::vector<double> lap, adv;
    laplace_beltrami(map, fa, fa.omega, lap);
    drift_advect(map, fa, fa.omega, adv);

    GridIndexer ix(map.shape);
    std::vector<int> idx(map.spec.n);
    double worst = 0.0;
    for (long p = 0; p < map.points(); ++p) {
        ix.unflatten(p, idx);
        const FullPoint fp = full_point(map, idx);
        const double quad = quadratic_term(fp.svd, fp.h);
        const double curv = curvature_term(fp.svd.lambdas, map.spec);
        const double ddt = (fb.omega[p] - fa.omega[p]) / dt + adv[p];
        const double res = ddt - lap[p] - fa.omega[p] * (quad + curv);
        worst = std::max(worst, std::fabs(res));
    }
    return worst;
}

double gradient_inequality_check(const FlowState& state, double eps2) {
    const GridMap& map = state.map;
    const int n = map.spec.n;
    FieldSet f;
    compute_fields(map, state.t, f);
    if (eps2 < f.record.max_energy_density * (1.0 - 1e-12))
        throw std::invalid_argument(
            "gradient_inequality_check: eps2 understates max energy density");

    GridIndexer ix(map.shape);
    std::vector<int> idx(n);
    double worst = std::numeric_limits<double>::infinity();
    for (long p = 0; p < map.points(); ++p) {
        ix.unflatten(p, idx);
        const FullPoint fp = full_point(map, idx);
        const double eta = f.omega[p];
        double a2f = 0.0;
        for (const auto& ha : fp.h)
            for (const auto& hi : ha)
                for (double v : hi) a2f += v * v;
        double grad2 = 0.0;
        const int r = std::min(n, map.spec.m);
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int q = 0; q < r; ++q) s += fp.svd.lambda(q) * fp.h[q][q][k];
            grad2 += s * s;
        }
        grad2 *= eta * eta;
        worst = std::min(worst, n * eps2 * eta * eta * a2f - grad2);
    }
    return worst;
}

double differential_inequality_check(const FlowState& at_t, const FlowState& at_t_dt,
                                     double delta) {
    const double dt = at_t_dt.t - at_t.t;
    if (dt <= 0.0)
        throw std::invalid_argument("differential_inequality_check: states not ordered");
    FieldSet fa, fb;
    compute_fields(at_t.map, at_t.t, fa);
    compute_fields(at_t_dt.map, at_t_dt.t, fb);
    if (fa.record.max_det > 2.0 - delta + 1e-12)
        throw std::invalid_argument(
            "differential_inequality_check: initial max_det exceeds 2 - delta");
    return pair_inequality_margin(at_t.map, fa, fb.omega, dt, delta);
}

// ---- property suites -------------------------------------------------------

SvdSuiteResult svd_roundtrip_suite(int samples_per_shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    SvdSuiteResult res;

    for (int n = 1; n <= 3; ++n) {
        for (int m = 1; m <= 3; ++m) {
            for (int s = 0; s < samples_per_shape; ++s) {
                Mat d(m, n);
                for (int i = 0; i < m * n; ++i) d.a[i] = uni(rng);
                const SingularValueData svd = singular_decompose(d);

                const Mat rec = svd_reconstruct(svd);
                double e = 0.0;
                for (int i = 0; i < m * n; ++i)
                    e = std::max(e, std::fabs(rec.a[i] - d.a[i]));
                res.max_reconstruction = std::max(res.max_reconstruction, e);

                double ediag = 0.0;
                for (int i = 0; i < n; ++i) {
                    const Vec di = matvec(d, svd.base_frame[i]);
                    for (int a = 0; a < m; ++a) {
                        const double want = (a == i) ? svd.lambda(i) : 0.0;
                        ediag = std::max(
                            ediag, std::fabs(dot(di, svd.target_frame[a]) - want));
                    }
                }
                res.max_diagonality = std::max(res.max_diagonality, ediag);

                const GraphFrames fr = build_frames(svd);
                double ef = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        ef = std::max(ef, std::fabs(dot(fr.tangent[i], fr.tangent[j]) -
                                                    (i == j ? 1.0 : 0.0)));
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        ef = std::max(ef, std::fabs(dot(fr.normal[a], fr.normal[b]) -
                                                    (a == b ? 1.0 : 0.0)));
                for (int i = 0; i < n; ++i)
                    for (int a = 0; a < m; ++a)
                        ef = std::max(ef, std::fabs(dot(fr.tangent[i], fr.normal[a])));
                // |pi_1(e_i)| and the pi1 relations in the adapted bases.
                for (int i = 0; i < n; ++i) {
                    double p1 = 0.0;
                    for (int k = 0; k < n; ++k)
                        p1 += fr.tangent[i][k] * fr.tangent[i][k];
                    const double l = svd.lambda(i);
                    ef = std::max(ef, std::fabs(std::sqrt(p1) -
                                                1.0 / std::sqrt(1.0 + l * l)));
                }
                for (int a = 0; a < m; ++a) {
                    const double l = a < n ? svd.lambda(a) : 0.0;
                    for (int k = 0; k < n; ++k) {
                        const double tan_k = a < n ? fr.tangent[a][k] : 0.0;
                        ef = std::max(ef, std::fabs(fr.normal[a][k] + l * tan_k));
                    }
                }
                res.max_frame_error = std::max(res.max_frame_error, ef);

                double energy_svd = 0.0, energy_d = 0.0;
                for (int i = 0; i < std::min(n, m); ++i)
                    energy_svd += svd.lambda(i) * svd.lambda(i);
                for (int i = 0; i < m * n; ++i) energy_d += d.a[i] * d.a[i];
                res.max_energy_error =
                    std::max(res.max_energy_error, std::fabs(energy_svd - energy_d));
            }
        }
    }
    return res;
}

namespace {

// Scale factors u_i so that prod(1 + (c u_i)^2) = target, by bisection.
double scale_for_det(const std::vector<double>& u, double target) {
    double lo = 0.0, hi = 256.0;
    for (int it = 0; it < 200; ++it) {
        const double c = 0.5 * (lo + hi);
        double det = 1.0;
        for (double v : u) det *= 1.0 + c * c * v * v;
        (det < target ? lo : hi) = c;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double quadratic_bound_suite(int samples_per_shape, std::uint64_t seed,
                             const std::vector<double>& deltas) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uh(-1.0, 1.0);
    std::uniform_real_distribution<double> ul(0.1, 1.0);
    double worst = std::numeric_limits<double>::infinity();

    for (int n = 1; n <= 3; ++n) {
        for (int m = 1; m <= 3; ++m) {
            const int r = std::min(n, m);
            for (double delta : deltas) {
                for (int s = 0; s < samples_per_shape; ++s) {
                    std::vector<double> u(r);
                    for (double& v : u) v = ul(rng);
                    const double c = scale_for_det(u, 2.0 - delta);

                    SingularValueData svd;
                    svd.lambdas.resize(r);
                    for (int i = 0; i < r; ++i) svd.lambdas[i] = c * u[i];
                    std::sort(svd.lambdas.rbegin(), svd.lambdas.rend());
                    svd.base_frame.assign(n, Vec(n));
                    svd.target_frame.assign(m, Vec(m));

                    std::vector<std::vector<std::vector<double>>> h(
                        m, std::vector<std::vector<double>>(
                               n, std::vector<double>(n, 0.0)));
                    double a2 = 0.0;
                    for (int a = 0; a < m; ++a)
                        for (int i = 0; i < n; ++i)
                            for (int j = i; j < n; ++j) {
                                const double v = uh(rng);
                                h[a][i][j] = v;
                                h[a][j][i] = v;
                            }
                    for (int a = 0; a < m; ++a)
                        for (int i = 0; i < n; ++i)
                            for (int j = 0; j < n; ++j) a2 += h[a][i][j] * h[a][i][j];

                    const double q = quadratic_term(svd, h);
                    worst = std::min(worst, q - delta * a2);
                }
            }
        }
    }
    return worst;
}

CurvatureSuiteResult curvature_sign_suite(int samples, std::uint64_t seed,
                                          double mutation_sign) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const std::vector<std::pair<double, double>> kpairs = {
        {1.0, 1.0}, {1.0, 0.0}, {1.0, -1.0}, {0.0, 0.0}};

    CurvatureSuiteResult res;
    res.min_value = std::numeric_limits<double>::infinity();
    res.min_strict_value = std::numeric_limits<double>::infinity();

    for (int n = 1; n <= 3; ++n) {
        for (auto [k1, k2] : kpairs) {
            ManifoldSpec spec{n, n, k1, k2,
                              k1 > 0 ? ChartKind::round_sphere : ChartKind::flat_torus};
            for (int s = 0; s < samples; ++s) {
                std::vector<double> lam(n);
                double lmax = 0.0;
                for (double& l : lam) {
                    l = std::sqrt(uni(rng));  // lambda^2 uniform in (0, 1)
                    lmax = std::max(lmax, l);
                }
                const double v = mutation_sign * curvature_term(lam, spec);
                res.min_value = std::min(res.min_value, v);
                // Sectional curvature needs n >= 2; the n = 1 bracket is
                // identically zero, so strictness is a multi-dimensional claim.
                if (k1 + k2 > 0 && n >= 2 && lmax > 1e-3)
                    res.min_strict_value = std::min(res.min_strict_value, v);
            }
        }
    }
    return res;
}

double qform_margin_suite(int samples, std::uint64_t seed, double eps) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();

    for (int n = 1; n <= 3; ++n) {
        for (int m = 1; m <= 3; ++m) {
            for (int s = 0; s < samples; ++s) {
                Mat lam(n, m), x(n, m);
                double nl = 0.0, nx = 0.0;
                for (int i = 0; i < n * m; ++i) {
                    lam.a[i] = gauss(rng);
                    x.a[i] = gauss(rng);
                    nl += lam.a[i] * lam.a[i];
                    nx += x.a[i] * x.a[i];
                }
                const double target = eps * uni(rng);
                const double cl = nl > 0 ? std::sqrt(target / nl) : 0.0;
                const double cx = nx > 0 ? 1.0 / std::sqrt(nx) : 0.0;
                for (int i = 0; i < n * m; ++i) {
                    lam.a[i] *= cl;
                    x.a[i] *= cx;
                }
                worst = std::min(worst, quadratic_form_Q(lam, x) - 0.5);
            }
        }
    }
    return worst;
}

// ---- report ----------------------------------------------------------------

VerifyCheck make_check(const std::string& name, const std::string& level,
                       double value, const std::string& cmp, double threshold) {
    VerifyCheck c{name, level, value, threshold, cmp, false};
    c.pass = (cmp == "<=") ? (value <= threshold) : (value >= threshold);
    return c;
}

void write_report(const std::string& path, const std::vector<std::string>& header,
                  const std::vector<VerifyCheck>& checks) {
    std::ofstream out(path);
    for (const std::string& h : header) out << "# " << h << "\n";
    char buf[256];
    for (const VerifyCheck& c : checks) {
        std::snprintf(buf, sizeof buf,
                      "check=%s level=%s value=%.6e cmp=%s threshold=%.6e status=%s",
                      c.name.c_str(), c.level.c_str(), c.value, c.cmp.c_str(),
                      c.threshold, c.pass ? "PASS" : "FAIL");
        out << buf << "\n";
    }
}

ResidualStudy residual_refinement_study(const std::vector<int>& levels) {
    ResidualStudy study;
    study.levels = levels;
    for (int N : levels) {
        std::vector<int> winding;
        auto fn = torus_preset("small_sine", 2, 2, 0.05, 0.0, {}, winding);
        GridMap g = init_from_function(ManifoldSpec::torus(2, 2), {N, N}, fn, winding);
        FlowState st{g, 0.0, 0.0, {}};

        RunOptions opt;
        opt.t_end = 0.002;
        opt.sigma = 0.9;
        opt.track_margin = false;
        RunResult rr = run(st, opt);
        const FlowState& a = rr.final_state;
        const FlowState b = step(a, cfl_dt(a.map, 0.9));

        study.evolution_residual.push_back(evolution_identity_residual(a, b));
        study.gradient_residual.push_back(gradient_identity_residual(a));
    }
    return study;
}

}  // namespace gmcf
