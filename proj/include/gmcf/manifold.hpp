#pragma once

#include <stdexcept>
#include <string>

namespace gmcf {

enum class ChartKind { flat_torus, round_sphere };

/// Constant-curvature product setup: base of dimension n and curvature k1,
/// target of dimension m and curvature k2.
struct ManifoldSpec {
    int n = 1;
    int m = 1;
    double k1 = 0.0;
    double k2 = 0.0;
    ChartKind chart_kind = ChartKind::flat_torus;

    void validate() const {
        if (n < 1 || m < 1)
            throw std::invalid_argument("ManifoldSpec: dimensions must be >= 1");
        if (chart_kind == ChartKind::flat_torus && (k1 != 0.0 || k2 != 0.0))
            throw std::invalid_argument("ManifoldSpec: flat torus requires k1 = k2 = 0");
        if (chart_kind == ChartKind::round_sphere && k1 <= 0.0)
            throw std::invalid_argument("ManifoldSpec: round sphere requires k1 > 0");
    }

    static ManifoldSpec torus(int n, int m) {
        return ManifoldSpec{n, m, 0.0, 0.0, ChartKind::flat_torus};
    }
    static ManifoldSpec sphere(int n) {
        return ManifoldSpec{n, n, 1.0, 1.0, ChartKind::round_sphere};
    }
};

inline std::string to_string(ChartKind k) {
    return k == ChartKind::flat_torus ? "flat_torus" : "round_sphere";
}

}  // namespace gmcf
