#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gmcf/flow_sphere.hpp"
#include "gmcf/flow_torus.hpp"

namespace gmcf {

/// Quadrature sample of a flow slice in ambient Euclidean space: points of
/// R^{ambient_dim} with their area weights. subdim is the dimension of the
/// submanifold (the n in the backward heat kernel).
struct PointCloud {
    int ambient_dim = 0;
    int subdim = 0;
    double t = 0.0;
    std::vector<double> coords;  // count x ambient_dim, row-major
    std::vector<double> areas;   // count

    long count() const { return static_cast<long>(areas.size()); }
    double total_area() const;
};

/// Isometric embedding of the product manifold into R^N. The evaluator maps
/// a chart point (x, f(x)) to ambient coordinates.
struct AmbientEmbedding {
    ManifoldSpec spec;
    int ambient_dim = 0;
    std::function<void(const double* x, const double* fval, double* y)> evaluator;
};

/// Each circle factor becomes a radius-1/(2pi) circle in a 2-plane;
/// N = 2 (n + m).
AmbientEmbedding torus_embedding(const ManifoldSpec& spec);
/// Unit spheres in R^{n+1} x R^{m+1}; N = (n+1) + (m+1).
AmbientEmbedding sphere_product_embedding(const ManifoldSpec& spec);

struct DensityProbe {
    std::vector<double> y0;
    double t0 = 0.0;
    std::vector<std::pair<double, double>> values;  // (t, integral rho dmu_t)
};

/// Backward heat kernel rho_{y0, t0}(y, t) of submanifold dimension n.
/// Throws std::domain_error when t >= t0.
double rho(const double* y, int dim, double t, const DensityProbe& probe, int n);

/// Midpoint quadrature of rho against the cloud's area weights; appends
/// (t, value) to the probe. Kernel contributions with exponent < -80 are
/// skipped (exact zeros in double precision).
double gaussian_density(const PointCloud& cloud, DensityProbe& probe);

/// Quadrature clouds for flow states.
PointCloud cloud_from_torus(const FlowState& state);
PointCloud cloud_from_profile(const ProfileState& state, int angular_resolution);

/// Parabolic dilation (y, t) -> (lambda (y - y0), lambda^2 (t - t0)):
/// areas scale by lambda^n.
PointCloud parabolic_dilate(const PointCloud& cloud, double lambda,
                            const std::vector<double>& y0, double t0);

enum class WhiteFlag { regular, suspicious };

struct WhiteResult {
    WhiteFlag flag = WhiteFlag::regular;
    double limit = 0.0;  // extrapolated density at t -> t0
};

/// Richardson extrapolation of the density limit through the last three
/// samples. Requires >= 3 samples whose t0 - t values span a decade.
WhiteResult white_flag(const DensityProbe& probe, double epsilon);

/// Probe log: comma-separated (t, t0-t, density, extrapolated_limit, flag);
/// the extrapolation columns fill once three samples are available.
void write_probe_log(const std::string& path,
                     const std::vector<std::string>& header,
                     const DensityProbe& probe, double epsilon);

/// Cloud file I/O (used by the monitor for synthetic fixtures).
void write_cloud_file(const std::string& path, const PointCloud& cloud);
PointCloud read_cloud_file(const std::string& path);

}  // namespace gmcf
