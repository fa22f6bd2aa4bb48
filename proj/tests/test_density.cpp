#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "gmcf/config.hpp"
#include "gmcf/density.hpp"
#include "gmcf/flow_torus.hpp"
#include "support/oracles.hpp"

using namespace gmcf;

namespace {
constexpr double kPi = std::numbers::pi;

FlowState constant_torus(int n, int m, int N, double value) {
    std::vector<int> winding;
    auto fn = torus_preset("constant", n, m, 0.0, value, {}, winding);
    GridMap g = init_from_function(ManifoldSpec::torus(n, m),
                                   std::vector<int>(n, N), fn, winding);
    return FlowState{g, 0.0, 0.0, {}};
}

}  // namespace

TEST_CASE("rho: closed-form values and the domain guard") {
    DensityProbe probe{{0.0, 0.0, 0.0}, 1.0, {}};
    const double y[3] = {0.0, 0.0, 0.0};

    // t0 - t = 1/(4 pi) makes the normalization exactly 1 for any n.
    for (int n : {1, 2, 3})
        CHECK(rho(y, 3, 1.0 - 1.0 / (4.0 * kPi), probe, n) == doctest::Approx(1.0));

    const double tau = 0.37;
    CHECK(rho(y, 3, 1.0 - tau, probe, 2) ==
          doctest::Approx(std::pow(4.0 * kPi * tau, -1.0)));

    CHECK_THROWS_AS(rho(y, 3, 1.0, probe, 2), std::domain_error);
    CHECK_THROWS_AS(rho(y, 3, 1.5, probe, 2), std::domain_error);
}

TEST_CASE("flat n-plane density is 1, matching the Gaussian-integral oracle") {
    for (int n : {1, 2}) {
        PointCloud plane = oracles::plane_cloud(n, n + 2, 1.0, 128);
        const double tau = 0.01;
        DensityProbe probe{std::vector<double>(n + 2, 0.0), tau, {}};
        const double val = gaussian_density(plane, probe);
        // Closed form over the truncated plane: erf(L / (2 sqrt(tau)))^n.
        const double expect = std::pow(std::erf(1.0 / (2.0 * std::sqrt(tau))), n);
        CHECK(std::fabs(val - 1.0) < 1e-3);
        CHECK(val == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("constant torus map: density near 1 at small t0 - t") {
    FlowState st = constant_torus(1, 1, 128, 0.3);
    PointCloud cloud = cloud_from_torus(st);
    // Probe centered on the graph.
    const AmbientEmbedding emb = torus_embedding(st.map.spec);
    std::vector<double> y0(emb.ambient_dim);
    const double x = 0.25, fv = 0.3;
    emb.evaluator(&x, &fv, y0.data());
    const double tau = 1e-3;
    DensityProbe probe{y0, tau, {}};
    const double val = gaussian_density(cloud, probe);

    // The graph is a planar circle of radius r = 1/(2 pi); its density has
    // the closed form r sqrt(pi/tau) e^{-z/2} I0(z/2), z = r^2/tau. The
    // curvature correction is pi^2 tau + O(tau^2) ~ 1.04e-2 at tau = 1e-3,
    // so the value sits just above 1.01.
    const double r = 1.0 / (2.0 * kPi);
    const double z = r * r / tau;
    const double exact =
        r * std::sqrt(kPi / tau) * std::exp(-z / 2.0) * std::cyl_bessel_i(0.0, z / 2.0);
    CHECK(val == doctest::Approx(exact).epsilon(1e-9));
    CHECK(val > 0.99);
    CHECK(val < 1.011);
}

TEST_CASE("probe far from the graph sees only the Gaussian tail") {
    FlowState st = constant_torus(2, 2, 32, 0.0);
    PointCloud cloud = cloud_from_torus(st);
    std::vector<double> y0(cloud.ambient_dim, 0.0);
    y0[0] = 1.0 / (2.0 * kPi) + 0.3;  // radial offset >= 0.3 from the torus
    DensityProbe probe{y0, 1e-3, {}};
    CHECK(gaussian_density(cloud, probe) < 1e-15);
}

TEST_CASE("parabolic dilation: identity at lambda=1, area scaling, invariance") {
    PointCloud sphere = oracles::sphere_cloud(2, 0.7, 64, 0.4);
    std::vector<double> y0 = {0.05, -0.02, 0.01};

    PointCloud same = parabolic_dilate(sphere, 1.0, std::vector<double>(3, 0.0), 0.5);
    CHECK(same.coords[7] == sphere.coords[7]);
    CHECK(same.t == doctest::Approx(0.4 - 0.5));

    const double lam = 3.5;
    PointCloud big = parabolic_dilate(sphere, lam, y0, 0.5);
    CHECK(big.total_area() ==
          doctest::Approx(sphere.total_area() * lam * lam).epsilon(1e-12));

    // rho_{y0,t0} dmu is invariant under the dilation.
    for (double lambda : {2.0, 10.0, 100.0}) {
        DensityProbe orig{y0, 0.5, {}};
        const double v1 = gaussian_density(sphere, orig);
        PointCloud moved = parabolic_dilate(sphere, lambda, y0, 0.5);
        DensityProbe origin_probe{std::vector<double>(3, 0.0), 0.0, {}};
        const double v2 = gaussian_density(moved, origin_probe);
        CHECK(std::fabs(v1 - v2) < 1e-6);
    }

    CHECK_THROWS_AS(parabolic_dilate(sphere, 0.5, y0, 0.5), std::invalid_argument);
}

TEST_CASE("density is invariant under rigid motions of the ambient space") {
    PointCloud cloud = oracles::sphere_cloud(2, 0.9, 48, 0.0);
    std::vector<double> y0 = {0.1, 0.2, -0.05};
    DensityProbe p1{y0, 0.25, {}};
    const double before = gaussian_density(cloud, p1);

    oracles::random_rigid_motion(cloud, y0, 424242);
    DensityProbe p2{y0, 0.25, {}};
    const double after = gaussian_density(cloud, p2);
    CHECK(std::fabs(before - after) < 1e-12);
}

TEST_CASE("white_flag: threshold arithmetic and preconditions") {
    DensityProbe probe{{0.0}, 1.0, {}};
    probe.values = {{1.0 - 4e-2, 1.8}, {1.0 - 8e-3, 1.9}, {1.0 - 2e-3, 1.95}};
    const WhiteResult res = white_flag(probe, 0.05);
    CHECK(res.flag == WhiteFlag::suspicious);
    CHECK(res.limit > 1.05);

    DensityProbe two{{0.0}, 1.0, {{0.9, 1.0}, {0.99, 1.0}}};
    CHECK_THROWS_AS(white_flag(two, 0.05), std::invalid_argument);

    DensityProbe narrow{{0.0}, 1.0, {{0.9, 1.0}, {0.91, 1.0}, {0.92, 1.0}}};
    CHECK_THROWS_AS(white_flag(narrow, 0.05), std::invalid_argument);
}

TEST_CASE("smooth torus run: probe values bounded and flagged regular") {
    FlowState st = constant_torus(1, 1, 128, 0.2);
    // Densities along a decade of t0 - t, all on the static graph (the
    // constant map is stationary, so no need to evolve).
    PointCloud cloud = cloud_from_torus(st);
    const AmbientEmbedding emb = torus_embedding(st.map.spec);
    std::vector<double> y0(emb.ambient_dim);
    const double x = 0.5, fv = 0.2;
    emb.evaluator(&x, &fv, y0.data());

    DensityProbe probe{y0, 0.0, {}};
    for (double tau : {1.2e-2, 6e-3, 3e-3, 1.5e-3, 1e-3}) {
        PointCloud c = cloud;
        c.t = probe.t0 - tau;
        const double v = gaussian_density(c, probe);
        CHECK(v < 1.2);
        CHECK(v > 0.9);
    }
    const WhiteResult res = white_flag(probe, 0.05);
    CHECK(res.flag == WhiteFlag::regular);
    CHECK(std::fabs(res.limit - 1.0) < 5e-3);
}

TEST_CASE("shrinking sphere: density matches the closed form and is suspicious") {
    // Self-similar shrinking 2-sphere: R(t) = sqrt(2 n (t0 - t)), n = 2.
    const double t0 = 0.5;
    const double expect = oracles::shrinking_sphere_density(2);
    DensityProbe probe{{0.0, 0.0, 0.0}, t0, {}};
    for (double tau : {2e-2, 8e-3, 2e-3}) {
        const double r = std::sqrt(4.0 * tau);
        PointCloud c = oracles::sphere_cloud(2, r, 128, t0 - tau);
        const double v = gaussian_density(c, probe);
        CHECK(v == doctest::Approx(expect).epsilon(1e-4));
    }
    const WhiteResult res = white_flag(probe, 0.05);
    CHECK(res.flag == WhiteFlag::suspicious);
    CHECK(res.limit == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("torus embedding is isometric (finite-difference pullback)") {
    const ManifoldSpec spec = ManifoldSpec::torus(2, 1);
    const AmbientEmbedding emb = torus_embedding(spec);
    REQUIRE(emb.ambient_dim == 6);
    const double h = 1e-6;
    std::vector<double> x = {0.37, 0.81}, fv = {0.59};
    std::vector<double> base(6), pert(6);
    emb.evaluator(x.data(), fv.data(), base.data());
    // d/dx_0 should be a unit vector orthogonal to d(f)/df.
    std::vector<double> xp = x;
    xp[0] += h;
    emb.evaluator(xp.data(), fv.data(), pert.data());
    double nrm = 0.0;
    for (int c = 0; c < 6; ++c) {
        const double d = (pert[c] - base[c]) / h;
        nrm += d * d;
    }
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("sphere graph cloud: total area of the zero section") {
    ProfileState st = init_profile(2, 128, BoundaryKind::null_homotopic,
                                   [](double) { return 0.0; });
    PointCloud cloud = cloud_from_profile(st, 256);
    CHECK(cloud.total_area() == doctest::Approx(4.0 * kPi).epsilon(1e-3));
    CHECK(cloud.ambient_dim == 6);
}

TEST_CASE("cloud file round trip") {
    PointCloud cloud = oracles::sphere_cloud(1, 0.4, 32, 0.125);
    const std::string path =
        (std::filesystem::temp_directory_path() / "gmcf_cloud_test.txt").string();
    write_cloud_file(path, cloud);
    const PointCloud back = read_cloud_file(path);
    CHECK(back.t == cloud.t);
    CHECK(back.subdim == cloud.subdim);
    REQUIRE(back.count() == cloud.count());
    for (long p = 0; p < cloud.count(); ++p) {
        CHECK(back.areas[p] == cloud.areas[p]);
        for (int c = 0; c < cloud.ambient_dim; ++c)
            CHECK(back.coords[p * 2 + c] == cloud.coords[p * 2 + c]);
    }
    std::filesystem::remove(path);
}
