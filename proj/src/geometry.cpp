#include "gmcf/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace gmcf {

GraphFrames build_frames(const SingularValueData& svd) {
    const int n = svd.n(), m = svd.m();
    const int dim = n + m;
    GraphFrames f;
    f.tangent.resize(n, Vec(dim));
    f.normal.resize(m, Vec(dim));
    f.pi1_tangent_norms.resize(n);

    // e_i = (a_i + lambda_i a_{n+i}) / sqrt(1 + lambda_i^2)
    for (int i = 0; i < n; ++i) {
        const double l = svd.lambda(i);
        const double w = 1.0 / std::sqrt(1.0 + l * l);
        Vec e(dim);
        for (int k = 0; k < n; ++k) e[k] = svd.base_frame[i][k] * w;
        if (i < m)
            for (int k = 0; k < m; ++k) e[n + k] = l * svd.target_frame[i][k] * w;
        f.tangent[i] = e;
        f.pi1_tangent_norms[i] = w;
    }

    // e_alpha = (a_alpha - lambda_alpha a_alpha') / sqrt(1 + lambda_alpha^2),
    // pairing the alpha-th target vector with the alpha-th base vector.
    for (int a = 0; a < m; ++a) {
        const double l = a < n ? svd.lambda(a) : 0.0;
        const double w = 1.0 / std::sqrt(1.0 + l * l);
        Vec e(dim);
        if (a < n)
            for (int k = 0; k < n; ++k) e[k] = -l * svd.base_frame[a][k] * w;
        for (int k = 0; k < m; ++k) e[n + k] = svd.target_frame[a][k] * w;
        f.normal[a] = e;
    }
    return f;
}

double star_omega(const std::vector<double>& lambdas) {
    double det = 1.0;
    for (double l : lambdas) det *= 1.0 + l * l;
    return 1.0 / std::sqrt(det);
}

GraphCondition graph_condition(const std::vector<double>& lambdas) {
    double det = 1.0;
    for (double l : lambdas) det *= 1.0 + l * l;
    return {det, 2.0 - det};
}

SffData second_fundamental_form(const std::vector<Vec>& first_derivs,
                                const std::vector<std::vector<Vec>>& second_derivs,
                                const Mat& inverse_metric) {
    SffData out;
    second_fundamental_form(first_derivs, second_derivs, inverse_metric, out);
    return out;
}

void second_fundamental_form(const std::vector<Vec>& first_derivs,
                             const std::vector<std::vector<Vec>>& second_derivs,
                             const Mat& inverse_metric, SffData& out) {
    const int n = static_cast<int>(first_derivs.size());
    const int dim = first_derivs[0].n;

    if (static_cast<int>(out.b.size()) != n) out.b.resize(n);
    for (int i = 0; i < n; ++i)
        if (static_cast<int>(out.b[i].size()) != n) out.b[i].resize(n);

    // B_ij = (Id - dF Lambda^{-1} dF^T) d2F_ij: remove the tangential part.
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const Vec& v = second_derivs[i][j];
            Vec c(n);
            for (int l = 0; l < n; ++l) c[l] = dot(first_derivs[l], v);
            Vec b = v;
            for (int k = 0; k < n; ++k) {
                double coeff = 0.0;
                for (int l = 0; l < n; ++l) coeff += inverse_metric(k, l) * c[l];
                b -= coeff * first_derivs[k];
            }
            out.b[i][j] = b;
            out.b[j][i] = b;
        }
    }

    out.a2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    out.a2 += inverse_metric(i, k) * inverse_metric(j, l) *
                              dot(out.b[i][j], out.b[k][l]);

    Vec h(dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h += inverse_metric(i, j) * out.b[i][j];
    out.h2 = dot(h, h);
}

std::vector<std::vector<std::vector<double>>> sff_frame_components(
    const SffData& sff, const SingularValueData& svd, const GraphFrames& frames) {
    const int n = svd.n(), m = svd.m();

    // B on coordinate directions -> B on the adapted tangent frame. The
    // frame vector e_i projects to a_i/sqrt(1+lambda_i^2) on the base, so
    // h_{alpha i j} = sum_{p,q} a_i^p a_j^q <B_pq, e_alpha> w_i w_j.
    std::vector<std::vector<std::vector<double>>> h(
        m, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));

    for (int a = 0; a < m; ++a) {
        // <B_pq, e_alpha>: B lives in the product space R^{n+m}.
        Mat bn(n, n);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) bn(p, q) = dot(sff.b[p][q], frames.normal[a]);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        s += svd.base_frame[i][p] * svd.base_frame[j][q] * bn(p, q);
                s *= frames.pi1_tangent_norms[i] * frames.pi1_tangent_norms[j];
                h[a][i][j] = s;
                h[a][j][i] = s;
            }
        }
    }
    return h;
}

double curvature_term(const std::vector<double>& lambdas, const ManifoldSpec& spec) {
    const int n = spec.n;
    auto lam = [&](int i) {
        return i < static_cast<int>(lambdas.size()) ? lambdas[i] : 0.0;
    };
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double li2 = lam(i) * lam(i);
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            s += 1.0 / (1.0 + lam(j) * lam(j));
        }
        total += li2 / (1.0 + li2) * (spec.k1 * s + spec.k2 * (1.0 - n + s));
    }
    return total;
}

double quadratic_term(const SingularValueData& svd,
                      const std::vector<std::vector<std::vector<double>>>& h) {
    const int n = svd.n(), m = svd.m();
    if (static_cast<int>(h.size()) != m ||
        (m > 0 && static_cast<int>(h[0].size()) != n))
        throw std::invalid_argument("quadratic_term: h dimensions do not match svd");

    double sum_sq = 0.0;
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) sum_sq += h[a][i][k] * h[a][i][k];

    // h_{n+i, jk} is zero when i > m (the paper's padding convention).
    auto hp = [&](int i, int j, int k) { return i < m ? h[i][j][k] : 0.0; };

    double cross = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double ll = svd.lambda(i) * svd.lambda(j);
            if (ll == 0.0) continue;
            for (int k = 0; k < n; ++k) {
                cross += ll * (-hp(i, i, k) * hp(j, j, k) + hp(j, i, k) * hp(i, j, k));
            }
        }
    }
    return sum_sq + 2.0 * cross;
}

double quadratic_form_Q(const Mat& lambda_matrix, const Mat& x) {
    const int n = x.rows, m = x.cols;
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) q += x(i, a) * x(i, a);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    q -= 2.0 *
                         (lambda_matrix(i, a) * lambda_matrix(j, b) -
                          lambda_matrix(j, a) * lambda_matrix(i, b)) *
                         x(i, a) * x(j, b);
    return q;
}

}  // namespace gmcf
