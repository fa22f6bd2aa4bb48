// Benchmark of the production grid kernels against the serial reference
// implementation: torus field evaluation (the per-step workhorse) and the
// profile kernel. Also cross-checks that the two paths agree.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include "gmcf/config.hpp"
#include "gmcf/flow_sphere.hpp"
#include "gmcf/flow_torus.hpp"
#include "gmcf/parallel.hpp"
#include "gmcf/reference.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace gmcf;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::fabs(a[i] - b[i]));
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    const int N = quick ? 32 : 192;
    const int iters = quick ? 2 : 40;
#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif

    std::vector<int> winding;
    auto fn = torus_preset("small_sine", 2, 2, 0.05, 0.0, {}, winding);
    GridMap g = init_from_function(ManifoldSpec::torus(2, 2), {N, N}, fn, winding);

    FieldSet f_ref, f_one, f_many;
    std::printf("torus fields %dx%d, %d iterations\n", N, N, iters);

    auto t0 = std::chrono::steady_clock::now();
    ref::compute_fields(g, 0.0, f_ref);
    const double t_ref = ms_since(t0);
    std::printf("  reference (1 pass):        %8.2f ms\n", t_ref);

    set_threads(1);
    t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) compute_fields(g, 0.0, f_one);
    const double t_serial = ms_since(t0) / iters;
    std::printf("  production, 1 thread:      %8.2f ms/iter\n", t_serial);

    set_threads(max_threads);
    t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) compute_fields(g, 0.0, f_many);
    const double t_par = ms_since(t0) / iters;
    std::printf("  production, %d threads:     %8.2f ms/iter (speedup %.2fx)\n",
                max_threads, t_par, t_serial / t_par);

    const double d_rhs = max_abs_diff(f_ref.rhs, f_one.rhs);
    const double d_om = max_abs_diff(f_ref.omega, f_one.omega);
    const double d_a2 = max_abs_diff(f_ref.a2, f_one.a2);
    std::printf("  reference vs production:   |d rhs| %.3e  |d omega| %.3e  |d A2| %.3e\n",
                d_rhs, d_om, d_a2);
    const double d_par = std::max(max_abs_diff(f_one.rhs, f_many.rhs),
                                  max_abs_diff(f_one.omega, f_many.omega));
    std::printf("  1 thread vs %d threads:     max diff %.3e (bitwise: %s)\n",
                max_threads, d_par, d_par == 0.0 ? "yes" : "NO");

    if (d_rhs > 1e-12 || d_om > 1e-12 || d_a2 > 1e-12 || d_par != 0.0) {
        std::printf("MISMATCH between kernel paths\n");
        return 1;
    }

    // Profile kernel.
    const int NP = quick ? 64 : 2048;
    std::string bk;
    auto psi0 = sphere_preset("half_sine_sphere", 0.5, bk);
    ProfileState ps = init_profile(2, NP, BoundaryKind::null_homotopic, psi0);
    ProfileFields pf1, pf2;
    std::printf("profile fields n=2 N=%d, %d iterations\n", NP, iters);
    set_threads(1);
    t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) compute_profile_fields(ps, pf1);
    const double tp1 = ms_since(t0) / iters;
    std::printf("  1 thread:                  %8.2f ms/iter\n", tp1);
    set_threads(max_threads);
    t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) compute_profile_fields(ps, pf2);
    const double tpm = ms_since(t0) / iters;
    std::printf("  %d threads:                 %8.2f ms/iter (speedup %.2fx)\n",
                max_threads, tpm, tp1 / tpm);
    const double dp = max_abs_diff(pf1.a2, pf2.a2);
    std::printf("  1 vs %d threads:            max diff %.3e (bitwise: %s)\n",
                max_threads, dp, dp == 0.0 ? "yes" : "NO");
    return dp == 0.0 ? 0 : 1;
}
