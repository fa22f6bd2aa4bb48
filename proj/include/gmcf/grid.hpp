#pragma once

#include <functional>
#include <vector>

#include "gmcf/manifold.hpp"

namespace gmcf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discretized map f: T^n -> T^m on the unit torus [0,1)^n, stored as the
/// lift to the universal cover plus the integer linear part L (m x n,
/// row-major): f(x + e_i) = f(x) + L[:, i]. Grid points sit at cell centers
/// x_k = k / N (axis spacing 1/N_i), so derivatives act on the lift and
/// stencils never wrap values modulo 1.
struct GridMap {
    ManifoldSpec spec;
    std::vector<int> shape;    // N_1, ..., N_n, each >= 8
    std::vector<double> values;  // row-major, m components per point
    std::vector<int> winding;  // L[alpha * n + i]

    long points() const {
        long p = 1;
        for (int s : shape) p *= s;
        return p;
    }
    double dx(int axis) const { return 1.0 / shape[axis]; }
    double min_dx() const {
        int nmax = 0;
        for (int s : shape) nmax = std::max(nmax, s);
        return 1.0 / nmax;
    }
    double cell_volume() const {
        double w = 1.0;
        for (int s : shape) w /= s;
        return w;
    }
    int l(int alpha, int i) const { return winding[alpha * spec.n + i]; }
};

/// Sample a map given as a closure on [0,1]^n. The closure must be periodic
/// modulo the linear part L: f(x + e_i) = f(x) + L[:, i]. A residual beyond
/// 1e-9 on the wrap faces is a configuration error.
GridMap init_from_function(
    const ManifoldSpec& spec, const std::vector<int>& shape,
    const std::function<void(const double* x, double* f)>& fn,
    const std::vector<int>& winding);

/// Flat index <-> multi-index helpers.
struct GridIndexer {
    std::vector<int> shape;
    std::vector<long> strides;  // in points, innermost axis last

    explicit GridIndexer(const std::vector<int>& sh) : shape(sh) {
        strides.assign(sh.size(), 1);
        for (int a = static_cast<int>(sh.size()) - 2; a >= 0; --a)
            strides[a] = strides[a + 1] * sh[a + 1];
    }
    long flat(const std::vector<int>& idx) const {
        long f = 0;
        for (std::size_t a = 0; a < shape.size(); ++a) f += idx[a] * strides[a];
        return f;
    }
    void unflatten(long f, std::vector<int>& idx) const {
        for (std::size_t a = 0; a < shape.size(); ++a) {
            idx[a] = static_cast<int>(f / strides[a]);
            f %= strides[a];
        }
    }
};

}  // namespace gmcf
