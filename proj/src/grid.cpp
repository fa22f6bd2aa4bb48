#include "gmcf/grid.hpp"

#include <cmath>
#include <string>

namespace gmcf {

GridMap init_from_function(
    const ManifoldSpec& spec, const std::vector<int>& shape,
    const std::function<void(const double* x, double* f)>& fn,
    const std::vector<int>& winding) {
    spec.validate();
    if (static_cast<int>(shape.size()) != spec.n)
        throw ConfigError("init_from_function: shape rank != n");
    for (int s : shape)
        if (s < 8) throw ConfigError("init_from_function: grid size < 8");
    if (static_cast<int>(winding.size()) != spec.n * spec.m)
        throw ConfigError("init_from_function: winding must be m x n");

    GridMap g{spec, shape, {}, winding};
    g.values.assign(g.points() * spec.m, 0.0);

    GridIndexer ix(shape);
    std::vector<int> idx(spec.n, 0);
    std::vector<double> x(spec.n), f(spec.m);
    for (long p = 0; p < g.points(); ++p) {
        ix.unflatten(p, idx);
        for (int a = 0; a < spec.n; ++a) x[a] = static_cast<double>(idx[a]) / shape[a];
        fn(x.data(), f.data());
        for (int c = 0; c < spec.m; ++c) {
            if (!std::isfinite(f[c]))
                throw ConfigError("init_from_function: non-finite initial value");
            g.values[p * spec.m + c] = f[c];
        }
    }

    // Periodicity check: across each axis, f(x + e_a) - f(x) must equal the
    // winding column. Sample the wrap faces of the grid.
    std::vector<double> x1(spec.n), f0(spec.m), f1(spec.m);
    for (int a = 0; a < spec.n; ++a) {
        std::vector<int> face_shape = shape;
        face_shape[a] = 1;
        GridIndexer fx(face_shape);
        long face_points = 1;
        for (int s : face_shape) face_points *= s;
        for (long p = 0; p < face_points; ++p) {
            fx.unflatten(p, idx);
            for (int b = 0; b < spec.n; ++b) x[b] = static_cast<double>(idx[b]) / shape[b];
            x1 = x;
            x1[a] = x[a] + 1.0;
            fn(x.data(), f0.data());
            fn(x1.data(), f1.data());
            for (int c = 0; c < spec.m; ++c) {
                const double r = f1[c] - f0[c] - g.l(c, a);
                if (std::fabs(r) > 1e-9)
                    throw ConfigError(
                        "init_from_function: initial data not periodic modulo winding "
                        "(axis " + std::to_string(a) + ", residual " + std::to_string(r) + ")");
            }
        }
    }
    return g;
}

}  // namespace gmcf
