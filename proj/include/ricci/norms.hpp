#pragma once

#include "ricci/flow.hpp"
#include "ricci/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ricci {

enum class Quantity {
    Scalar,        // R (signed samples; norms take |R|)
    AbsScalar,     // |R|
    ScalarPlus,    // R_+
    ScalarMinus,   // R_-
    RiemannNorm,   // |Rm|
    RicciNorm,     // |Ric|
};

std::string quantity_name(Quantity q);
Quantity quantity_from_name(const std::string& name);

/// Signed samples of a quantity on a curvature field.
std::vector<double> sample_field(const CurvatureField& cf, Quantity q);

/// A fixed spatial region: the whole manifold, or the set of points within
/// a given distance of a center in the metric of the reference-time slice.
struct Region {
    enum class Kind { Whole, Ball };
    Kind kind = Kind::Whole;
    int center = 0;
    double radius = 0.0;
    double ref_time = 0.0;

    static Region whole() { return {}; }
    static Region ball(int center, double radius, double ref_time) {
        return {Kind::Ball, center, radius, ref_time};
    }
};

struct NormQuery {
    Quantity quantity = Quantity::Scalar;
    double alpha = 1.0;  // >= 1; infinity selects the sup norm
    Region region;
    double t_begin = 0.0;
    double t_end = 0.0;
};

/// log of  int_region |F|^alpha dmu  on one snapshot.
double log_slice_power(const MetricState& state, const CurvatureField& cf,
                       Quantity q, double alpha, const Region& region,
                       const FlowTrajectory& traj);

/// Samples of an arbitrary scalar field on snapshot i (one sample for round
/// slices, one per node for warped slices).
using SnapshotField = std::function<std::vector<double>(int)>;

/// log of  int int_region |F|^p dmu dt  for a caller-supplied field.
/// Plain trapezoid in time (no singular-tail treatment).
double log_spacetime_field_power(const FlowTrajectory& traj, const SnapshotField& field,
                                 double p, const Region& region, double t0, double t1);

/// Supremum of |F| over the samples inside region x [t0, t1].
double sup_field_over_region(const FlowTrajectory& traj, const SnapshotField& field,
                             const Region& region, double t0, double t1);

/// log of the space-time measure  int int_region dmu dt.
double log_region_measure(const FlowTrajectory& traj, const Region& region, double t0,
                          double t1);

/// Spatial L^alpha norm of a quantity on one slice (alpha = inf: max sample).
double slice_norm(const MetricState& state, Quantity q, double alpha);

/// log of  int int_region |F|^alpha dmu dt  over the query interval.
/// Time quadrature is trapezoidal between snapshots; on singular
/// trajectories each sub-interval integrates the local power-law fit
/// I(t) = C (T_hat - t)^p exactly, which plain trapezoid underestimates
/// badly near the blow-up time.
double log_spacetime_power(const FlowTrajectory& traj, const NormQuery& q);

/// (int int |F|^alpha dmu dt)^(1/alpha); alpha = inf gives the sup norm.
double spacetime_norm(const FlowTrajectory& traj, const NormQuery& q);

/// Example 2.1 closed form for the shrinking sphere:
/// ||R||_alpha over M x [0,T) = (n/2) V0^{1/a} T^{-n/(2a)}
///   (int_0^T (T-t)^{n/2-a} dt)^{1/a}; infinite iff alpha >= n/2 + 1.
double closed_form_sphere_norm(int n, double V0, double T, double alpha);

enum class Divergence { Finite, LogDivergent, PowerDivergent };
std::string divergence_name(Divergence d);

struct ScanRow {
    double alpha = 0.0;
    std::vector<double> eps;            // usable epsilon values
    std::vector<double> partial_norms;  // norms over [t_start, T_hat - eps]
    double exponent = 0.0;              // slope of log(norm^alpha) vs log(1/eps)
    Divergence classification = Divergence::Finite;
};

/// Partial-norm scan toward the singular time for each alpha.
std::vector<ScanRow> alpha_threshold_scan(const FlowTrajectory& traj, Quantity quantity,
                                          const std::vector<double>& alphas,
                                          const std::vector<double>& eps_sequence);

struct NormStatus {
    bool finite = true;
    bool resolved = true;   // enough partials to classify; finiteness is
                            // never certified from an unresolved scan
    double value = 0.0;     // norm value when finite, last partial otherwise
    double exponent = 0.0;  // fitted divergence exponent when diverging
    Divergence classification = Divergence::Finite;
};

struct ExtensionVerdict {
    double A = 0.0;      // measured sup of Ric_-
    double alpha = 0.0;
    NormStatus scalar_norm;    // ||R||_alpha status
    NormStatus riemann_norm;   // ||Rm||_alpha status
    bool scalar_criterion_met = false;
    bool riemann_criterion_met = false;
    std::string conclusion;
    bool consistent = true;  // singular flows must fail each extension criterion
};

ExtensionVerdict extension_verdict(const FlowTrajectory& traj, double alpha);

/// Region-restricted volume/diameter evolution check: the region is frozen
/// in its reference slice; its volume and geodesic extent are measured in
/// each earlier metric and compared against the exponential bounds driven
/// by the Ricci eigenvalue range.
VolumeDiameterReport volume_diameter_bound_check(const FlowTrajectory& traj,
                                                 const Region& region, double a,
                                                 double b, const RicciBounds& bounds);

}  // namespace ricci
