#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gmcf/grid.hpp"

namespace gmcf {

struct DiagnosticsRecord {
    double t = 0, dt = 0;
    double min_star_omega = 0, max_star_omega = 0;
    double max_det = 0, max_energy_density = 0;
    double max_a2 = 0, max_h2 = 0;
    double total_volume = 0, max_velocity = 0;
};

struct BlowupError : std::runtime_error {
    double t;
    std::vector<int> index;
    BlowupError(double time, std::vector<int> idx, const std::string& what)
        : std::runtime_error(what), t(time), index(std::move(idx)) {}
};

struct FlowState {
    GridMap map;
    double t = 0.0;
    double dt_last = 0.0;
    DiagnosticsRecord diagnostics;
};

/// Per-point geometry of a grid map, cached for stepping, diagnostics and
/// the in-run inequality margins. All arrays are indexed by flat grid point.
struct FieldSet {
    std::vector<double> omega;     // *Omega = 1/sqrt(det Lambda)
    std::vector<double> a2;        // |A|^2
    std::vector<double> sqrt_det;  // sqrt(det Lambda)
    std::vector<double> rhs;       // m per point: Lambda^{ij} d_ij f
    std::vector<double> drift;     // n per point: normal-gauge chart drift
    std::vector<double> kcoef;     // n*n per point: sqrt(det) Lambda^{ij}
    DiagnosticsRecord record;
};

/// Stable step size: sigma * min_i(dx_i^2) / (2n). The inverse induced
/// metric has eigenvalues <= 1 (Lambda >= I for graphs), so the principal
/// part is dominated by the flat heat operator.
double cfl_dt(const GridMap& map, double sigma);

/// Evaluate the flow geometry at every grid point (production kernel,
/// parallel over the first axis, reductions in fixed slab order).
/// Throws BlowupError on non-finite data.
void compute_fields(const GridMap& map, double t, FieldSet& f);

/// Discrete Laplace-Beltrami of a periodic scalar field in divergence form,
/// with sqrt(det) Lambda^{ij} averaged to half-grid midpoints.
void laplace_beltrami(const GridMap& map, const FieldSet& f,
                      const std::vector<double>& u, std::vector<double>& out);

/// Advection of a periodic scalar by the tangential-drift velocity:
/// out = xdot^i d_i u (central differences). Adding this to the chart time
/// derivative gives the material derivative along the normal-gauge flow.
void drift_advect(const GridMap& map, const FieldSet& f,
                  const std::vector<double>& u, std::vector<double>& out);

/// Minimum over grid points of
///   d*Omega/dt|normal - Lap *Omega - delta |A|^2
/// evaluated between a state (with its fields) and the *Omega field one
/// step later.
double pair_inequality_margin(const GridMap& map, const FieldSet& f_t,
                              const std::vector<double>& omega_next, double dt,
                              double delta);

/// One forward-Euler step f <- f + dt Lambda^{ij} d_ij f. Refreshes the
/// diagnostics of the returned state. dt must satisfy dt <= cfl_dt(map, 1).
FlowState step(const FlowState& state, double dt);

enum class RunStatus { completed, blew_up };

struct RunOptions {
    double t_end = 1.0;
    double sigma = 0.9;
    double output_every = 0.0;  // <= 0: only first and last records
    /// delta for the differential-inequality margin; < 0 derives it from the
    /// initial max_det (2 - max_det), 0 disables tracking.
    double delta = -1.0;
    bool track_margin = true;
    std::function<void(const FlowState&)> snapshot_cb;
    double snapshot_every = 0.0;
};

struct RunResult {
    FlowState final_state;
    std::vector<DiagnosticsRecord> series;
    RunStatus status = RunStatus::completed;
    double blowup_t = 0.0;
    std::vector<int> blowup_index;
    std::string blowup_what;

    // Per-step conservation tracking (worst cases over the whole run).
    double min_inequality_margin = 0.0;  // differential inequality, all steps
    double delta_used = 0.0;
    double max_det_over_run = 0.0;  // max over every accepted step
    double max_volume_step_increase = 0.0;   // max of V_{k+1} - V_k
    double worst_min_omega_drop_rate = 0.0;  // max of (min_k - min_{k+1})/dt
};

/// Repeated explicit steps with dt = cfl_dt(map, sigma), clamped to land on
/// t_end exactly. Deterministic for a fixed configuration and thread count
/// independent (Jacobi updates, ordered reductions).
RunResult run(const FlowState& initial, const RunOptions& opt);

}  // namespace gmcf
