#include "gmcf/density.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "gmcf/parallel.hpp"
#include "gmcf/sphere_chart.hpp"

namespace gmcf {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTau = 2.0 * std::numbers::pi;
}  // namespace

double PointCloud::total_area() const {
    double s = 0.0;
    for (double a : areas) s += a;
    return s;
}

AmbientEmbedding torus_embedding(const ManifoldSpec& spec) {
    AmbientEmbedding e;
    e.spec = spec;
    e.ambient_dim = 2 * (spec.n + spec.m);
    const int n = spec.n, m = spec.m;
    const double r = 1.0 / kTau;
    e.evaluator = [n, m, r](const double* x, const double* f, double* y) {
        for (int i = 0; i < n; ++i) {
            y[2 * i] = r * std::cos(kTau * x[i]);
            y[2 * i + 1] = r * std::sin(kTau * x[i]);
        }
        for (int c = 0; c < m; ++c) {
            y[2 * n + 2 * c] = r * std::cos(kTau * f[c]);
            y[2 * n + 2 * c + 1] = r * std::sin(kTau * f[c]);
        }
    };
    return e;
}

AmbientEmbedding sphere_product_embedding(const ManifoldSpec& spec) {
    AmbientEmbedding e;
    e.spec = spec;
    e.ambient_dim = (spec.n + 1) + (spec.m + 1);
    const int n = spec.n, m = spec.m;
    e.evaluator = [n, m](const double* x, const double* f, double* y) {
        const Vec pb = sphere_chart::embed(x, n);
        const Vec pt = sphere_chart::embed(f, m);
        for (int c = 0; c <= n; ++c) y[c] = pb[c];
        for (int c = 0; c <= m; ++c) y[n + 1 + c] = pt[c];
    };
    return e;
}

double rho(const double* y, int dim, double t, const DensityProbe& probe, int n) {
    if (t >= probe.t0) throw std::domain_error("rho: requires t < t0");
    const double tau = probe.t0 - t;
    double d2 = 0.0;
    for (int c = 0; c < dim; ++c) {
        const double d = y[c] - probe.y0[c];
        d2 += d * d;
    }
    return std::pow(4.0 * kPi * tau, -0.5 * n) * std::exp(-d2 / (4.0 * tau));
}

double gaussian_density(const PointCloud& cloud, DensityProbe& probe) {
    if (cloud.t >= probe.t0) throw std::domain_error("gaussian_density: requires t < t0");
    if (static_cast<int>(probe.y0.size()) != cloud.ambient_dim)
        throw std::invalid_argument("gaussian_density: y0 dimension mismatch");

    const double tau = probe.t0 - cloud.t;
    const double inv4tau = 1.0 / (4.0 * tau);
    const double norm = std::pow(4.0 * kPi * tau, -0.5 * cloud.subdim);
    const int dim = cloud.ambient_dim;
    const double* y0 = probe.y0.data();

    // Fixed-size chunks keep the summation order independent of threading.
    const long chunk = 4096;
    const long nchunks = (cloud.count() + chunk - 1) / chunk;
    std::vector<double> partials(nchunks, 0.0);
    parallel_slabs(nchunks, [&](long ci) {
        double s = 0.0;
        const long lo = ci * chunk, hi = std::min(cloud.count(), lo + chunk);
        for (long p = lo; p < hi; ++p) {
            const double* y = cloud.coords.data() + p * dim;
            double d2 = 0.0;
            for (int c = 0; c < dim; ++c) {
                const double d = y[c] - y0[c];
                d2 += d * d;
            }
            const double expo = -d2 * inv4tau;
            if (expo < -80.0) continue;
            s += cloud.areas[p] * std::exp(expo);
        }
        partials[ci] = s;
    });
    const double value = norm * ordered_sum(partials);
    probe.values.emplace_back(cloud.t, value);
    return value;
}

PointCloud cloud_from_torus(const FlowState& state) {
    const GridMap& map = state.map;
    const int n = map.spec.n, m = map.spec.m;
    const AmbientEmbedding emb = torus_embedding(map.spec);

    FieldSet f;
    compute_fields(map, state.t, f);

    PointCloud cloud;
    cloud.ambient_dim = emb.ambient_dim;
    cloud.subdim = n;
    cloud.t = state.t;
    const long npts = map.points();
    cloud.coords.resize(npts * emb.ambient_dim);
    cloud.areas.resize(npts);
    const double w = map.cell_volume();

    GridIndexer ix(map.shape);
    std::vector<int> idx(n);
    std::vector<double> x(n);
    for (long p = 0; p < npts; ++p) {
        ix.unflatten(p, idx);
        for (int a = 0; a < n; ++a) x[a] = static_cast<double>(idx[a]) / map.shape[a];
        emb.evaluator(x.data(), map.values.data() + p * m,
                      cloud.coords.data() + p * emb.ambient_dim);
        cloud.areas[p] = f.sqrt_det[p] * w;
    }
    return cloud;
}

PointCloud cloud_from_profile(const ProfileState& state, int angular_resolution) {
    const int n = state.n;
    ManifoldSpec spec = ManifoldSpec::sphere(n);
    const AmbientEmbedding emb = sphere_product_embedding(spec);

    const int N = state.num_nodes;
    const double dth = state.dtheta();
    const int M = angular_resolution;

    // Angle grids for the orbit directions: x_2..x_{n-1} on (0, pi),
    // x_n on [0, 2 pi), all cell-centered.
    std::vector<int> ashape(n - 1, M);
    std::vector<double> astep(n - 1, kPi / M);
    if (n >= 2) astep[n - 2] = kTau / M;

    long orbit_count = 1;
    for (int a = 0; a < n - 1; ++a) orbit_count *= ashape[a];

    PointCloud cloud;
    cloud.ambient_dim = emb.ambient_dim;
    cloud.subdim = n;
    cloud.t = state.t;
    cloud.coords.resize(static_cast<long>(N) * orbit_count * emb.ambient_dim);
    cloud.areas.resize(static_cast<long>(N) * orbit_count);

    double wphi = dth;
    for (int a = 0; a < n - 1; ++a) wphi *= astep[a];

    std::vector<double> x(n), y(n);
    long out = 0;
    for (int k = 0; k < N; ++k) {
        const double th = state.theta(k);
        const double psi = state.psi[k];
        const double dpsi = (state.psi_at(k + 1) - state.psi_at(k - 1)) * 0.5 / dth;
        std::vector<int> aidx(n - 1, 0);
        for (long q = 0; q < orbit_count; ++q) {
            x[0] = th;
            y[0] = psi;
            for (int a = 0; a < n - 1; ++a) {
                x[a + 1] = (aidx[a] + 0.5) * astep[a];
                y[a + 1] = x[a + 1];
            }
            emb.evaluator(x.data(), y.data(), cloud.coords.data() + out * emb.ambient_dim);

            // sqrt(det Lambda) in the chart: Lambda is diagonal with
            // Lambda_00 = 1 + psi'^2 and Lambda_aa = g_aa(x) + g_aa(y).
            double sd = std::sqrt(1.0 + dpsi * dpsi);
            for (int a = 1; a < n; ++a)
                sd *= std::sqrt(sphere_chart::metric_diag(x.data(), n, a) +
                                sphere_chart::metric_diag(y.data(), n, a));
            cloud.areas[out] = sd * wphi;
            ++out;

            for (int a = n - 2; a >= 0; --a) {
                if (++aidx[a] < ashape[a]) break;
                aidx[a] = 0;
            }
        }
    }
    return cloud;
}

PointCloud parabolic_dilate(const PointCloud& cloud, double lambda,
                            const std::vector<double>& y0, double t0) {
    if (lambda < 1.0)
        throw std::invalid_argument("parabolic_dilate: lambda must be >= 1");
    PointCloud out = cloud;
    const int dim = cloud.ambient_dim;
    for (long p = 0; p < cloud.count(); ++p)
        for (int c = 0; c < dim; ++c)
            out.coords[p * dim + c] = lambda * (cloud.coords[p * dim + c] - y0[c]);
    const double as = std::pow(lambda, cloud.subdim);
    for (double& a : out.areas) a *= as;
    out.t = lambda * lambda * (cloud.t - t0);
    return out;
}

WhiteResult white_flag(const DensityProbe& probe, double epsilon) {
    if (probe.values.size() < 3)
        throw std::invalid_argument("white_flag: need at least 3 samples");
    double tau_min = std::numeric_limits<double>::infinity(), tau_max = 0.0;
    for (const auto& [t, v] : probe.values) {
        const double tau = probe.t0 - t;
        tau_min = std::min(tau_min, tau);
        tau_max = std::max(tau_max, tau);
    }
    if (tau_max < 10.0 * (1.0 - 1e-9) * tau_min)
        throw std::invalid_argument("white_flag: samples must span a decade in t0 - t");

    // Polynomial extrapolation to tau = 0 through the last three samples
    // (iterated order-1 Richardson in t0 - t).
    const auto& v = probe.values;
    const std::size_t s = v.size();
    double tau[3], val[3];
    for (int i = 0; i < 3; ++i) {
        tau[i] = probe.t0 - v[s - 3 + i].first;
        val[i] = v[s - 3 + i].second;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (tau[i] == tau[j])
                throw std::invalid_argument("white_flag: duplicate sample times");
    double limit = 0.0;
    for (int i = 0; i < 3; ++i) {
        double w = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= tau[j] / (tau[j] - tau[i]);
        limit += w * val[i];
    }
    WhiteResult res;
    res.limit = limit;
    res.flag = limit <= 1.0 + epsilon ? WhiteFlag::regular : WhiteFlag::suspicious;
    return res;
}

void write_probe_log(const std::string& path,
                     const std::vector<std::string>& header,
                     const DensityProbe& probe, double epsilon) {
    std::ofstream out(path);
    for (const std::string& h : header) out << "# " << h << "\n";
    out << "t,t0_minus_t,density,extrapolated_limit,flag\n";
    char buf[160];
    for (std::size_t i = 0; i < probe.values.size(); ++i) {
        const auto& [t, d] = probe.values[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", t, probe.t0 - t, d);
        out << buf;
        if (i >= 2) {
            DensityProbe head{probe.y0, probe.t0, {}};
            head.values.assign(probe.values.begin(), probe.values.begin() + i + 1);
            try {
                const WhiteResult w = white_flag(head, epsilon);
                std::snprintf(buf, sizeof buf, "%.17g,%s", w.limit,
                              w.flag == WhiteFlag::regular ? "regular" : "suspicious");
                out << buf;
            } catch (const std::invalid_argument&) {
                out << ",pending";
            }
        } else {
            out << ",pending";
        }
        out << "\n";
    }
}

void write_cloud_file(const std::string& path, const PointCloud& cloud) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        out << "gmcf-cloud 1\n";
        out << "subdim " << cloud.subdim << "\n";
        out << "ambient_dim " << cloud.ambient_dim << "\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", cloud.t);
        out << "t " << buf << "\n";
        out << "count " << cloud.count() << "\n";
        for (long p = 0; p < cloud.count(); ++p) {
            for (int c = 0; c < cloud.ambient_dim; ++c) {
                std::snprintf(buf, sizeof buf, "%.17g ",
                              cloud.coords[p * cloud.ambient_dim + c]);
                out << buf;
            }
            std::snprintf(buf, sizeof buf, "%.17g\n", cloud.areas[p]);
            out << buf;
        }
    }
    std::rename(tmp.c_str(), path.c_str());
}

PointCloud read_cloud_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read cloud file: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "gmcf-cloud" || version != 1)
        throw ConfigError("not a gmcf cloud file: " + path);
    PointCloud cloud;
    std::string key;
    long count = 0;
    in >> key >> cloud.subdim;
    in >> key >> cloud.ambient_dim;
    in >> key >> cloud.t;
    in >> key >> count;
    cloud.coords.resize(count * cloud.ambient_dim);
    cloud.areas.resize(count);
    for (long p = 0; p < count; ++p) {
        for (int c = 0; c < cloud.ambient_dim; ++c) in >> cloud.coords[p * cloud.ambient_dim + c];
        in >> cloud.areas[p];
    }
    if (!in) throw ConfigError("truncated cloud file: " + path);
    return cloud;
}

}  // namespace gmcf
