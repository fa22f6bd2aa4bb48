#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmcf/flow_sphere.hpp"
#include "gmcf/flow_torus.hpp"

namespace gmcf {

/// L-infinity mismatch of the *Omega gradient identity: the directional
/// derivative of *Omega along the adapted tangent frame versus the
/// second-fundamental-form expression -*Omega sum_p lambda_p h_{n+p, p k}.
double gradient_identity_residual(const FlowState& state);

/// L-infinity residual of the *Omega evolution equation between two
/// consecutive torus states: material d*Omega/dt (forward difference plus
/// tangential-drift advection) minus Lap *Omega minus
/// *Omega (quadratic + curvature terms).
double evolution_identity_residual(const FlowState& at_t, const FlowState& at_t_dt);

/// Minimum over the grid of n eps2 eta^2 |A|^2 - |grad eta|^2, with the
/// frame-based gradient. Throws if eps2 understates the actual max energy
/// density.
double gradient_inequality_check(const FlowState& state, double eps2);

/// Pointwise margin of d*Omega/dt >= Lap *Omega + delta |A|^2 between two
/// consecutive torus states (the same quantity run() tracks per step).
double differential_inequality_check(const FlowState& at_t, const FlowState& at_t_dt,
                                     double delta);

// ---- property suites (self-contained inequality checks) -------------------

struct SvdSuiteResult {
    double max_reconstruction = 0;
    double max_diagonality = 0;
    double max_frame_error = 0;  // orthonormality + pi1 relations
    double max_energy_error = 0;  // sum lambda^2 vs trace(D^T D)
};
SvdSuiteResult svd_roundtrip_suite(int samples_per_shape, std::uint64_t seed);

/// Worst margin of quadratic_term - delta |A|^2 over random (lambda, h)
/// with prod(1 + lambda_i^2) = 2 - delta, shapes n, m in {1,2,3}.
double quadratic_bound_suite(int samples_per_shape, std::uint64_t seed,
                             const std::vector<double>& deltas);

struct CurvatureSuiteResult {
    double min_value = 0;         // over all k1 >= |k2| cases
    double min_strict_value = 0;  // over k1+k2 > 0 cases with max lambda > 1e-3
};
/// mutation_sign = -1 flips the evaluated term (negative-control fixture).
CurvatureSuiteResult curvature_sign_suite(int samples, std::uint64_t seed,
                                          double mutation_sign = 1.0);

/// Worst Q(x) - 0.5 |x|^2 over random pairs with |Lambda|^2 <= eps, unit x.
double qform_margin_suite(int samples, std::uint64_t seed, double eps);

// ---- verification report ---------------------------------------------------

struct VerifyCheck {
    std::string name;
    std::string level;  // grid level or "-"
    double value = 0;
    double threshold = 0;
    std::string cmp;  // "<=" or ">="
    bool pass = false;
};

VerifyCheck make_check(const std::string& name, const std::string& level,
                       double value, const std::string& cmp, double threshold);

void write_report(const std::string& path, const std::vector<std::string>& header,
                  const std::vector<VerifyCheck>& checks);

/// Refinement study of both residuals on the canonical smooth torus flow.
struct ResidualStudy {
    std::vector<int> levels;
    std::vector<double> evolution_residual;
    std::vector<double> gradient_residual;
};
ResidualStudy residual_refinement_study(const std::vector<int>& levels);

}  // namespace gmcf
