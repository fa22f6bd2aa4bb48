#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace gmcf {

// Dimension caps. Base and target manifolds go up to 4 dimensions,
// ambient vectors up to 2*(4+1) = 10 (product of two spheres in R^{n+1}).
inline constexpr int kMaxDim = 4;
inline constexpr int kMaxAmbient = 10;

/// Fixed-capacity vector with runtime length. Value semantics, no heap.
struct Vec {
    int n = 0;
    std::array<double, kMaxAmbient> a{};

    Vec() = default;
    explicit Vec(int len) : n(len) { assert(len >= 0 && len <= kMaxAmbient); }

    double& operator[](int i) { return a[i]; }
    double operator[](int i) const { return a[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[i] += o.a[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[i] -= o.a[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < n; ++i) a[i] *= s;
        return *this;
    }
};

inline Vec operator+(Vec x, const Vec& y) { return x += y; }
inline Vec operator-(Vec x, const Vec& y) { return x -= y; }
inline Vec operator*(double s, Vec x) { return x *= s; }

inline double dot(const Vec& x, const Vec& y) {
    double s = 0;
    for (int i = 0; i < x.n; ++i) s += x.a[i] * y.a[i];
    return s;
}

inline double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

/// Fixed-capacity dense matrix, row-major, runtime shape.
struct Mat {
    int rows = 0, cols = 0;
    std::array<double, kMaxAmbient * kMaxAmbient> a{};

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c) {
        assert(r >= 0 && r <= kMaxAmbient && c >= 0 && c <= kMaxAmbient);
    }

    double& operator()(int i, int j) { return a[i * cols + j]; }
    double operator()(int i, int j) const { return a[i * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Vec col(int j) const {
        Vec v(rows);
        for (int i = 0; i < rows; ++i) v[i] = (*this)(i, j);
        return v;
    }
    Vec row(int i) const {
        Vec v(cols);
        for (int j = 0; j < cols; ++j) v[j] = (*this)(i, j);
        return v;
    }
};

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec y(m.rows);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

/// A^T A for an r x c matrix (result c x c, symmetric).
inline Mat gram(const Mat& m) {
    Mat g(m.cols, m.cols);
    for (int i = 0; i < m.cols; ++i)
        for (int j = i; j < m.cols; ++j) {
            double s = 0;
            for (int k = 0; k < m.rows; ++k) s += m(k, i) * m(k, j);
            g(i, j) = s;
            g(j, i) = s;
        }
    return g;
}

/// Cholesky factorization of an SPD matrix; returns false if a pivot
/// degenerates. Induced graph metrics satisfy Lambda >= I, so failure
/// here means corrupted input.
inline bool cholesky(const Mat& s, Mat& lower) {
    const int n = s.rows;
    lower = Mat(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = s(i, j);
            for (int k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (sum <= 0.0) return false;
                lower(i, i) = std::sqrt(sum);
            } else {
                lower(i, j) = sum / lower(j, j);
            }
        }
    }
    return true;
}

inline double det_spd(const Mat& s) {
    Mat l;
    if (!cholesky(s, l)) throw std::runtime_error("det_spd: matrix not SPD");
    double d = 1.0;
    for (int i = 0; i < s.rows; ++i) d *= l(i, i) * l(i, i);
    return d;
}

/// Row-major SPD inverse with determinant on raw storage, n <= 4. Closed
/// forms for the small cases keep per-point kernels lean.
inline void invert_spd_small(int n, const double* s, double* inv, double& det) {
    switch (n) {
        case 1:
            det = s[0];
            inv[0] = 1.0 / det;
            return;
        case 2: {
            det = s[0] * s[3] - s[1] * s[2];
            const double r = 1.0 / det;
            inv[0] = s[3] * r;
            inv[1] = -s[1] * r;
            inv[2] = -s[2] * r;
            inv[3] = s[0] * r;
            return;
        }
        case 3: {
            const double c00 = s[4] * s[8] - s[5] * s[7];
            const double c01 = s[5] * s[6] - s[3] * s[8];
            const double c02 = s[3] * s[7] - s[4] * s[6];
            det = s[0] * c00 + s[1] * c01 + s[2] * c02;
            const double r = 1.0 / det;
            inv[0] = c00 * r;
            inv[1] = (s[2] * s[7] - s[1] * s[8]) * r;
            inv[2] = (s[1] * s[5] - s[2] * s[4]) * r;
            inv[4] = (s[0] * s[8] - s[2] * s[6]) * r;
            inv[5] = (s[2] * s[3] - s[0] * s[5]) * r;
            inv[8] = (s[0] * s[4] - s[1] * s[3]) * r;
            inv[3] = inv[1];
            inv[6] = inv[2];
            inv[7] = inv[5];
            return;
        }
        default: {
            double l[16] = {0};
            det = 1.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j <= i; ++j) {
                    double sum = s[i * n + j];
                    for (int k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
                    if (i == j) {
                        l[i * n + i] = std::sqrt(sum);
                        det *= sum;
                    } else {
                        l[i * n + j] = sum / l[j * n + j];
                    }
                }
            }
            for (int c = 0; c < n; ++c) {
                double y[4];
                for (int i = 0; i < n; ++i) {
                    double sum = (i == c) ? 1.0 : 0.0;
                    for (int k = 0; k < i; ++k) sum -= l[i * n + k] * y[k];
                    y[i] = sum / l[i * n + i];
                }
                for (int i = n - 1; i >= 0; --i) {
                    double sum = y[i];
                    for (int k = i + 1; k < n; ++k) sum -= l[k * n + i] * inv[k * n + c];
                    inv[i * n + c] = sum / l[i * n + i];
                }
            }
            return;
        }
    }
}

inline Mat inverse_spd(const Mat& s) {
    Mat l;
    if (!cholesky(s, l)) throw std::runtime_error("inverse_spd: matrix not SPD");
    const int n = s.rows;
    Mat inv(n, n);
    // Solve L L^T x = e_j column by column.
    for (int j = 0; j < n; ++j) {
        Vec y(n);
        for (int i = 0; i < n; ++i) {
            double sum = (i == j) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) sum -= l(i, k) * y[k];
            y[i] = sum / l(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double sum = y[i];
            for (int k = i + 1; k < n; ++k) sum -= l(k, i) * inv(k, j);
            inv(i, j) = sum / l(i, i);
        }
    }
    // Symmetrize to kill the last rounding asymmetry.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = v;
            inv(j, i) = v;
        }
    return inv;
}

}  // namespace gmcf
