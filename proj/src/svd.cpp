#include "gmcf/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmcf {

namespace {

constexpr double kTieTol = 1e-12;

// Index of the largest-magnitude component (first one on ties).
int argmax_abs(const Vec& v) {
    int best = 0;
    for (int i = 1; i < v.n; ++i)
        if (std::fabs(v[i]) > std::fabs(v[best])) best = i;
    return best;
}

void fix_sign(Vec& v) {
    if (v[argmax_abs(v)] < 0.0) v *= -1.0;
}

// Cyclic Jacobi eigen-decomposition of a symmetric PSD matrix. Rotations
// are applied in a fixed (p, q) order so the result is reproducible; pairs
// rotate until every off-diagonal entry is negligible relative to its
// diagonal pair, which keeps small singular values fully accurate.
void jacobi_eigen(Mat s, Mat& vecs, Vec& vals) {
    const int n = s.rows;
    vecs = Mat::identity(n);

    for (int sweep = 0; sweep < 64; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                const double thresh =
                    1e-17 * std::sqrt(std::max(s(p, p), 0.0) * std::max(s(q, q), 0.0));
                if (std::fabs(apq) <= 1e-300 || std::fabs(apq) <= thresh) continue;
                rotated = true;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vecs(k, p), vkq = vecs(k, q);
                    vecs(k, p) = c * vkp - sn * vkq;
                    vecs(k, q) = sn * vkp + c * vkq;
                }
            }
        }
        if (!rotated) break;
    }
    vals = Vec(n);
    for (int i = 0; i < n; ++i) vals[i] = s(i, i);
}

// Gram-Schmidt completion of an orthonormal set to a full basis of R^dim.
// Candidates are the standard basis vectors; each slot takes the candidate
// with the largest residual (smallest index on ties).
void complete_basis(std::vector<Vec>& basis, int dim) {
    while (static_cast<int>(basis.size()) < dim) {
        Vec best(dim);
        double best_norm = -1.0;
        for (int j = 0; j < dim; ++j) {
            Vec w(dim);
            w[j] = 1.0;
            for (const Vec& b : basis) w -= dot(w, b) * b;
            const double nw = norm(w);
            if (nw > best_norm + 1e-14) {
                best_norm = nw;
                best = w;
            }
        }
        best *= 1.0 / best_norm;
        // One re-orthogonalization pass for accuracy.
        for (const Vec& b : basis) best -= dot(best, b) * b;
        best *= 1.0 / norm(best);
        fix_sign(best);
        basis.push_back(best);
    }
}

}  // namespace

SingularValueData singular_decompose(const Mat& d) {
    const int m = d.rows, n = d.cols;
    const int r = std::min(n, m);

    Mat vecs;
    Vec vals;
    jacobi_eigen(gram(d), vecs, vals);

    // Singular values as image norms |D a_i|: absolutely accurate even when
    // lambda_i is tiny (the squared Jacobi diagonal only carries them to
    // eps * |D|^2). The eigenvectors supply the directions.
    std::vector<Vec> cols(n);
    Vec lam(n);
    for (int i = 0; i < n; ++i) {
        cols[i] = vecs.col(i);
        fix_sign(cols[i]);
        lam[i] = norm(matvec(d, cols[i]));
    }

    // Sort by descending singular value; break ties by the base vector's
    // largest-magnitude component index, then lexicographically.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (std::fabs(lam[i] - lam[j]) > kTieTol) return lam[i] > lam[j];
        const int ai = argmax_abs(cols[i]), aj = argmax_abs(cols[j]);
        if (ai != aj) return ai < aj;
        for (int k = 0; k < n; ++k)
            if (cols[i][k] != cols[j][k]) return cols[i][k] > cols[j][k];
        return false;
    });

    SingularValueData out;
    out.base_frame.resize(n);
    for (int i = 0; i < n; ++i) out.base_frame[i] = cols[order[i]];
    out.lambdas.resize(r);
    for (int i = 0; i < r; ++i) out.lambdas[i] = lam[order[i]];

    // Target frame: images of the base vectors where lambda is significant,
    // completed deterministically in the (near-)null directions. Singular
    // values below the cutoff are snapped to exact zero; their image
    // directions are numerically meaningless and the contribution to the
    // reconstruction is below the 1e-12 contract.
    const double lmax = out.lambdas.empty() ? 0.0 : out.lambdas[0];
    const double rank_tol = 1e-13 * std::max(1.0, lmax);
    std::vector<Vec> tgt;
    for (int i = 0; i < r; ++i) {
        if (out.lambdas[i] <= rank_tol) {
            out.lambdas[i] = 0.0;
            continue;
        }
        Vec u = matvec(d, out.base_frame[i]);
        for (const Vec& b : tgt) u -= dot(u, b) * b;
        u *= 1.0 / norm(u);
        tgt.push_back(u);
    }
    complete_basis(tgt, m);
    out.target_frame = std::move(tgt);
    return out;
}

Mat svd_reconstruct(const SingularValueData& svd) {
    const int n = svd.n(), m = svd.m();
    Mat d(m, n);
    const int r = std::min(n, m);
    for (int i = 0; i < r; ++i) {
        const double l = svd.lambdas[i];
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < n; ++b)
                d(a, b) += l * svd.target_frame[i][a] * svd.base_frame[i][b];
    }
    return d;
}

}  // namespace gmcf
