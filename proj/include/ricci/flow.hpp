#pragma once

#include "ricci/geometry.hpp"

#include <optional>
#include <vector>

namespace ricci {

struct step_rejected_error : error {
    using error::error;
};
struct singularity_signal_error : error {
    using error::error;
};
struct numerical_blowup_error : error {
    using error::error;
};

struct FlowConfig {
    double dt_initial = 1e-3;
    double safety = 0.5;               // in (0, 1]
    double curvature_ceiling = 1e6;    // singularity threshold on max |Rm|
    double t_max = 1e9;
    int output_stride = 1;             // accepted steps between snapshots

    void validate() const;
};

/// A point of the running space-time curvature maximum.
struct TrackPoint {
    double t = 0.0;
    int node = 0;
    double value = 0.0;
};

/// Time-ordered metric states with curvature summaries.
struct FlowTrajectory {
    std::vector<MetricState> states;
    std::vector<CurvatureField> curvatures;
    double t_start = 0.0;
    double t_end = 0.0;
    bool singular = false;
    bool numerical_blowup = false;
    std::optional<double> T_hat;
    std::vector<TrackPoint> max_curvature_track;  // running max of |Rm|
    FlowConfig config;

    int snapshot_count() const { return static_cast<int>(states.size()); }
    double time(int i) const { return states[i].time(); }
    int dimension() const { return states.front().dimension(); }
    bool is_round() const {
        return states.front().form() == MetricState::Form::RoundSphere;
    }
    /// Largest snapshot index with time(i) <= t (throws if t precedes span).
    int index_at_or_before(double t) const;
    void validate() const;
};

/// Exact shrinking-sphere solution c(t) = c0 - 2(n-1) t.
MetricState evolve_round_sphere(int n, double c0, double t);

/// One explicit midpoint step of the warped-product flow. Throws
/// step_rejected_error when the result violates the state invariants,
/// singularity_signal_error when the interior of psi collapses, and
/// numerical_blowup_error on non-finite values.
MetricState step_warped(const MetricState& state, double dt);

/// Parabolic stability bound for the next warped step (before safety factor).
double warped_stability_dt(const MetricState& state);

FlowTrajectory run_flow(const MetricState& initial, const FlowConfig& config);

/// Residual of dR/dt = Lap R + 2|Ric|^2 at interior snapshot i, sampled on
/// the grid: the time derivative is the central difference over neighbor
/// snapshots, the Laplacian is taken in the time-t_i metric.
std::vector<double> scalar_evolution_residual(const FlowTrajectory& traj, int i);

/// Volume-weighted RMS of a residual field away from a fixed pole
/// neighborhood (spatial differencing of a sampled curvature field is not
/// second-order accurate near the coordinate poles).
double residual_summary(const MetricState& state, const std::vector<double>& residual);

/// Residual of dV/dt = -int R dmu at interior snapshot i.
double volume_evolution_residual(const FlowTrajectory& traj, int i);

struct VolumeDiameterReport {
    bool hypothesis_ok = true;     // Ricci eigenvalues within [ric_low, ric_high]
    bool vol_lower_holds = true;   // V(t) >= V(ref) e^{n ric_low (t_ref - t)}
    bool vol_upper_holds = true;   // V(t) <= V(ref) e^{n ric_high (t_ref - t)}
    bool diam_holds = true;        // D(t) <= D(ref) e^{ric_high (t_ref - t)}
    double t_ref = 0.0;
    double worst_margin = 0.0;     // most negative slack over all checks
};

struct RicciBounds {
    double ric_low = 0.0;
    double ric_high = 0.0;
};

/// Checks the volume and diameter evolution bounds over [a, b] against the
/// reference slice at the window end.
VolumeDiameterReport volume_diameter_bound_check(const FlowTrajectory& traj,
                                                 double a, double b,
                                                 const RicciBounds& bounds);

enum class TrackQuantity { ScalarCurvature, RiemannNorm };

/// k space-time points realizing the running curvature maximum, strictly
/// increasing in time with nondecreasing values; requires a singular
/// trajectory.
std::vector<TrackPoint> curvature_maximizing_sequence(const FlowTrajectory& traj,
                                                      int k, TrackQuantity quantity);

}  // namespace ricci
