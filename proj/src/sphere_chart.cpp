#include "gmcf/sphere_chart.hpp"

#include <cmath>
#include <numbers>

namespace gmcf::sphere_chart {

namespace {

// Per-point sin/cos table: every embedding component is a product of
// sin/cos factors in distinct angles, so derivatives just swap factors.
struct Trig {
    double s[kMaxDim], c[kMaxDim];
    Trig(const double* x, int n) {
        for (int j = 0; j < n; ++j) {
            s[j] = std::sin(x[j]);
            c[j] = std::cos(x[j]);
        }
    }
};

double comp_deriv(const Trig& t, int n, int c, int d1, int d2) {
    const int last = (c < n) ? c : n - 1;
    if (d1 >= 0 && d1 > last) return 0.0;
    if (d2 >= 0 && d2 > last) return 0.0;
    double prod = 1.0;
    for (int j = 0; j <= last; ++j) {
        int o = 0;
        if (d1 == j) ++o;
        if (d2 == j) ++o;
        const bool is_sin = (j < c);
        double f;
        if (is_sin)
            f = (o == 0) ? t.s[j] : (o == 1) ? t.c[j] : -t.s[j];
        else
            f = (o == 0) ? t.c[j] : (o == 1) ? -t.s[j] : -t.c[j];
        prod *= f;
    }
    return prod;
}

}  // namespace

double metric_diag(const double* x, int n, int k) {
    (void)n;
    double g = 1.0;
    for (int j = 0; j < k; ++j) {
        const double s = std::sin(x[j]);
        g *= s * s;
    }
    return g;
}

double christoffel(const double* x, int n, int k, int i, int j) {
    if (i == j) {
        if (i == k) return 0.0;  // g_kk does not depend on x_k
        // Gamma^k_ii = -cot(x_k) g_ii / g_kk when k < i
        if (k < i) {
            const double ratio = metric_diag(x, n, i) / metric_diag(x, n, k);
            return -(std::cos(x[k]) / std::sin(x[k])) * ratio;
        }
        return 0.0;
    }
    // i != j: only Gamma^k_{ik} = cot(x_i) with i < k survives.
    if (j == k && i < k) return std::cos(x[i]) / std::sin(x[i]);
    if (i == k && j < k) return std::cos(x[j]) / std::sin(x[j]);
    return 0.0;
}

Vec embed(const double* x, int n) {
    const Trig t(x, n);
    Vec y(n + 1);
    for (int c = 0; c <= n; ++c) y[c] = comp_deriv(t, n, c, -1, -1);
    return y;
}

void embed_jacobian(const double* x, int n, std::vector<Vec>& dy) {
    // Shape-stable fill: reuse the caller's storage in hot loops.
    const Trig t(x, n);
    if (static_cast<int>(dy.size()) != n) dy.resize(n);
    for (int i = 0; i < n; ++i) {
        dy[i] = Vec(n + 1);
        for (int c = 0; c <= n; ++c) dy[i][c] = comp_deriv(t, n, c, i, -1);
    }
}

void embed_hessian(const double* x, int n, std::vector<std::vector<Vec>>& d2y) {
    const Trig t(x, n);
    if (static_cast<int>(d2y.size()) != n) d2y.resize(n);
    for (int i = 0; i < n; ++i)
        if (static_cast<int>(d2y[i].size()) != n) d2y[i].resize(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Vec v(n + 1);
            for (int c = 0; c <= n; ++c) v[c] = comp_deriv(t, n, c, i, j);
            d2y[i][j] = v;
            d2y[j][i] = v;
        }
}

double unit_sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) /
           std::tgamma(0.5 * (n + 1));
}

}  // namespace gmcf::sphere_chart
