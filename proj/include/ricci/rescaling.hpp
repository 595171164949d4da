#pragma once

#include "ricci/flow.hpp"
#include "ricci/norms.hpp"

#include <vector>

namespace ricci {

/// Parabolic rescaling data: g'(t) = Q g(Q^{-1} t + t_center).
struct RescaleSpec {
    double Q = 1.0;
    double t_center = 0.0;
    int base_point = 0;

    /// Spec of the inverse transformation.
    RescaleSpec inverse() const { return {1.0 / Q, -Q * t_center, base_point}; }
};

/// Rescaled trajectory sampled on [a, b] in the new time variable. New
/// snapshot times are the images of the source snapshot times plus the two
/// endpoints; states between snapshots interpolate linearly (in the scale
/// factor c, or nodewise in the profiles).
FlowTrajectory parabolic_rescale(const FlowTrajectory& traj, const RescaleSpec& spec,
                                 double a, double b);

/// after/before ratio of  int int |Rm|^alpha dmu dt  between the rescaled
/// window [w0, w1] and its source image. Equals Q^{(n+2)/2 - alpha} up to
/// quadrature (exactly 1 at the critical exponent).
double rescaled_power_ratio(const FlowTrajectory& traj, const RescaleSpec& spec,
                            double w0, double w1, double alpha);

struct InvarianceReport {
    double before = 0.0;
    double after = 0.0;
    double relative_diff = 0.0;
};

/// Scale invariance of the critical integral int int |Rm|^{(n+2)/2}.
InvarianceReport critical_integral_invariance(const FlowTrajectory& traj,
                                              const RescaleSpec& spec, double w0,
                                              double w1);

struct BlowupElement {
    FlowTrajectory trajectory;   // rescaled onto [0, 1], anchor at t = 1
    TrackPoint anchor;           // source (t^i, x^i, Q^i)
    double normalized_value = 0.0;  // quantity at the anchor, rescaled time 1
    double quantity_max = 0.0;      // max of the quantity over the window
    double ric_lower = 0.0;         // min Ricci eigenvalue over the window
    double critical_ball_integral = 0.0;  // int_0^1 int_{B(anchor,1)} |Rm|^{(n+2)/2}
};

struct BlowupSequence {
    std::vector<BlowupElement> elements;
    bool complete = true;  // false when fewer usable anchors than requested
};

/// Normalized blow-up sequence: each element is the flow rescaled by the
/// running curvature maximum so the anchor value is 1 at rescaled time 1.
/// Anchors whose backward parabolic window escapes the stored span are
/// skipped.
BlowupSequence blowup_sequence(const FlowTrajectory& traj, int count,
                               TrackQuantity quantity);

}  // namespace ricci
