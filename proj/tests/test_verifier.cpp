#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "gmcf/config.hpp"
#include "gmcf/flow_torus.hpp"
#include "gmcf/verify.hpp"

using namespace gmcf;

namespace {

FlowState smooth_state(int N, double amplitude, double t_settle) {
    std::vector<int> winding;
    auto fn = torus_preset("small_sine", 2, 2, amplitude, 0.0, {}, winding);
    GridMap g = init_from_function(ManifoldSpec::torus(2, 2), {N, N}, fn, winding);
    FlowState st{g, 0.0, 0.0, {}};
    if (t_settle > 0) {
        RunOptions opt;
        opt.t_end = t_settle;
        opt.track_margin = false;
        st = run(st, opt).final_state;
    }
    return st;
}

std::pair<FlowState, FlowState> consecutive_pair(const FlowState& st, double sigma) {
    const double dt = cfl_dt(st.map, sigma);
    return {st, step(st, dt)};
}

FlowState affine_state(int N) {
    std::vector<int> winding = {1, 0, 0, 1};
    auto fn = torus_preset("affine", 2, 2, 0.0, 0.15, {}, winding);
    GridMap g = init_from_function(ManifoldSpec::torus(2, 2), {N, N}, fn, winding);
    return FlowState{g, 0.0, 0.0, {}};
}

}  // namespace

TEST_CASE("residuals vanish identically on affine data") {
    const FlowState a = affine_state(16);
    CHECK(gradient_identity_residual(a) < 1e-12);
    const auto [s0, s1] = consecutive_pair(a, 0.9);
    CHECK(evolution_identity_residual(s0, s1) < 1e-12);
}

TEST_CASE("residuals vanish identically on a constant map") {
    std::vector<int> winding;
    auto fn = torus_preset("constant", 2, 2, 0.0, 0.3, {}, winding);
    GridMap g = init_from_function(ManifoldSpec::torus(2, 2), {16, 16}, fn, winding);
    const FlowState a{g, 0.0, 0.0, {}};
    const auto [s0, s1] = consecutive_pair(a, 0.9);
    CHECK(evolution_identity_residual(s0, s1) < 1e-12);
    CHECK(differential_inequality_check(s0, s1, 0.5) >= -1e-12);
}

TEST_CASE("evolution identity residual shrinks at second order") {
    double prev = 0.0;
    for (int N : {16, 32, 64}) {
        FlowState a = smooth_state(N, 0.05, 0.002);
        const auto [s0, s1] = consecutive_pair(a, 0.9);
        const double res = evolution_identity_residual(s0, s1);
        if (prev > 0) {
            const double factor = prev / res;
            INFO("N=", N, " residual=", res, " factor=", factor);
            CHECK(factor >= 3.0);
        }
        prev = res;
    }
}

TEST_CASE("gradient identity residual shrinks at second order") {
    double prev = 0.0;
    for (int N : {16, 32, 64}) {
        FlowState a = smooth_state(N, 0.05, 0.0);
        const double res = gradient_identity_residual(a);
        if (prev > 0) {
            const double factor = prev / res;
            INFO("N=", N, " residual=", res, " factor=", factor);
            CHECK(factor >= 3.0);
        }
        prev = res;
    }
}

TEST_CASE("gradient identity residual is small on a small-amplitude map at N=128") {
    FlowState a = smooth_state(128, 0.001, 0.0);
    CHECK(gradient_identity_residual(a) < 1e-3);
}

TEST_CASE("gradient inequality: affine data has zero margin") {
    const FlowState a = affine_state(16);
    // Both sides vanish identically: the margin is exactly 0.
    CHECK(std::fabs(gradient_inequality_check(a, 2.001)) < 1e-15);
}

TEST_CASE("gradient inequality holds with frame-based gradient") {
    FlowState a = smooth_state(32, 0.01, 0.0);
    FieldSet f;
    compute_fields(a.map, 0.0, f);
    const double eps2 = f.record.max_energy_density * 1.0000001;
    REQUIRE(eps2 <= 0.01);
    const double dx2 = (1.0 / 32) * (1.0 / 32);
    CHECK(gradient_inequality_check(a, eps2) >= -10.0 * dx2);
}

TEST_CASE("gradient inequality rejects an understated eps2") {
    FlowState a = smooth_state(32, 0.05, 0.0);
    CHECK_THROWS_AS(gradient_inequality_check(a, 1e-6), std::invalid_argument);
}

TEST_CASE("differential inequality margin on a smooth pair") {
    FlowState a = smooth_state(32, 0.05, 0.001);
    const auto [s0, s1] = consecutive_pair(a, 0.9);
    const double dx2 = (1.0 / 32) * (1.0 / 32);
    const double dt = s1.t - s0.t;
    const double margin = differential_inequality_check(s0, s1, 0.4);
    INFO("margin=", margin);
    CHECK(margin >= -10.0 * (dx2 + dt));
}

TEST_CASE("differential inequality rejects delta above the hypothesis") {
    FlowState a = smooth_state(16, 0.05, 0.0);
    const auto [s0, s1] = consecutive_pair(a, 0.9);
    CHECK_THROWS_AS(differential_inequality_check(s0, s1, 1.5), std::invalid_argument);
}

TEST_CASE("curvature mutation fixture is caught (negative control)") {
    const auto res = curvature_sign_suite(500, 99, -1.0);
    CHECK(res.min_value < -1e-12);
}

TEST_CASE("refinement study reports second-order factors") {
    const ResidualStudy study = residual_refinement_study({16, 32});
    REQUIRE(study.levels.size() == 2);
    CHECK(study.evolution_residual[0] / study.evolution_residual[1] >= 3.0);
    CHECK(study.gradient_residual[0] / study.gradient_residual[1] >= 3.0);
}
