#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gmcf/flow_torus.hpp"  // DiagnosticsRecord, BlowupError, RunStatus

namespace gmcf {

enum class BoundaryKind { null_homotopic, degree_one };

std::string to_string(BoundaryKind b);

/// Rotationally symmetric map S^n -> S^n, f(theta, omega) = (psi(theta),
/// omega), reduced to the profile psi on a cell-centered grid over (0, pi).
/// Ghost values come from odd reflection about the poles (shifted by the
/// boundary value at theta = pi), which encodes psi(0) = 0 and
/// psi(pi) = 0 or pi without stencil special cases.
struct ProfileState {
    int n = 2;                 // sphere dimension, >= 2
    int num_nodes = 0;         // grid points on (0, pi)
    std::vector<double> psi;   // profile values at theta_k = (k + 1/2) dtheta
    BoundaryKind boundary = BoundaryKind::null_homotopic;
    double t = 0.0;
    double dt_last = 0.0;

    double dtheta() const;
    double theta(int k) const { return (k + 0.5) * dtheta(); }
    double boundary_value() const;
    /// psi with reflection ghosts, valid for k in [-1, num_nodes].
    double psi_at(int k) const;
};

ProfileState init_profile(int n, int num_nodes, BoundaryKind boundary,
                          const std::function<double(double)>& psi0);

struct ProfileDiagnostics {
    DiagnosticsRecord base;
    double max_abs_psi = 0.0;
    double max_lambda = 0.0;
};

/// Per-node geometry of the reduced flow.
struct ProfileFields {
    std::vector<double> rhs;      // psi_t
    std::vector<double> omega;    // *Omega
    std::vector<double> a2;       // |A|^2 of the graph in S^n x S^n
    std::vector<double> h2;       // |H|^2
    std::vector<double> lambda1;  // |psi'|
    std::vector<double> lambda2;  // |sin psi / sin theta|
    std::vector<double> kcoef;    // W Lambda^{theta theta}, for the Laplacian
    std::vector<double> weight;   // W = sqrt(1+psi'^2)(sin^2 th + sin^2 psi)^{(n-1)/2}
    std::vector<double> drift;    // normal-gauge chart drift in theta
    ProfileDiagnostics record;
};

/// Graphical flow velocity of the profile:
///   psi_t = psi''/(1+psi'^2)
///         + (n-1) (sin th cos th psi' - sin psi cos psi) / (sin^2 th + sin^2 psi),
/// central differences with reflection ghosts. Throws BlowupError on NaN.
std::vector<double> reduced_rhs(const ProfileState& state);

/// Full per-node geometry; the |A|^2 column goes through the ambient
/// product-sphere embedding and the projector-based second fundamental form.
void compute_profile_fields(const ProfileState& state, ProfileFields& f);

/// Divergence-form Laplace-Beltrami of an even scalar field on the reduced
/// graph geometry, coefficients averaged to half-grid midpoints.
void profile_laplace(const ProfileState& state, const ProfileFields& f,
                     const std::vector<double>& u, std::vector<double>& out);

struct ProfileRunOptions {
    double t_end = 1.0;
    double sigma = 0.9;
    double output_every = 0.0;
    double delta = -1.0;  // < 0: derive from initial max_det
    bool track_margin = true;
    std::function<void(const ProfileState&)> snapshot_cb;
    double snapshot_every = 0.0;
};

struct ProfileRunResult {
    ProfileState final_state;
    std::vector<ProfileDiagnostics> series;
    RunStatus status = RunStatus::completed;
    double blowup_t = 0.0;
    int blowup_index = -1;
    std::string blowup_what;
    double min_inequality_margin = 0.0;
    double delta_used = 0.0;
    double max_det_over_run = 0.0;
    double max_volume_step_increase = 0.0;
    double worst_min_omega_drop_rate = 0.0;
};

/// Forward Euler with dt = sigma dtheta^2 / (2n); the extra 1/n keeps the
/// pole reaction term (n-1) sin psi cos psi / sin^2 theta inside the
/// explicit stability region.
ProfileRunResult run_profile(const ProfileState& initial, const ProfileRunOptions& opt);

}  // namespace gmcf
