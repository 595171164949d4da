#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ricci {

/// Error hierarchy mirroring the failure modes of the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct invalid_parameter_error : error {
    using error::error;
};
struct invalid_profile_error : error {
    using error::error;
};
struct resolution_error : error {
    using error::error;
};
struct out_of_range_error : error {
    using error::error;
};
struct not_applicable_error : error {
    using error::error;
};
struct past_singularity_error : error {
    using error::error;
};

/// Absolute + relative slack used by all inequality checks.
inline double check_tolerance(double rhs) {
    return 1e-12 + 1e-9 * std::abs(rhs);
}

/// A time slice of a metric on S^n in one of two symmetry classes.
///
/// RoundSphere: g = c * g_s with g_s the unit round metric.
/// Warped:      g = phi^2 dx^2 + psi^2 g_{S^{n-1}} on a uniform grid over
///              x in [0, pi]; arclength element ds = phi dx.
class MetricState {
public:
    enum class Form { RoundSphere, Warped };

    static MetricState round_sphere(int n, double c, double t);
    static MetricState warped(int n, std::vector<double> psi,
                              std::vector<double> phi, double t);

    Form form() const { return form_; }
    int dimension() const { return n_; }
    double time() const { return t_; }
    void set_time(double t) { t_ = t; }

    // RoundSphere accessors
    double scale() const;  // c

    // Warped accessors
    int node_count() const { return static_cast<int>(psi_.size()); }  // m+1
    int segments() const { return node_count() - 1; }                 // m
    double grid_step() const;                                         // h = pi/m
    double x(int j) const;
    const std::vector<double>& psi() const { return psi_; }
    const std::vector<double>& phi() const { return phi_; }

    /// |psi_s| mismatch against 1 at the two poles (warped only).
    std::pair<double, double> pole_regularity_defect() const;

    /// Validation tolerance for pole regularity: max(1e-6, 10 h^2).
    double pole_tolerance() const;

    /// Throws invalid_profile_error / invalid_parameter_error on violation.
    void validate() const;
    bool is_valid() const noexcept;

private:
    MetricState() = default;
    Form form_ = Form::RoundSphere;
    int n_ = 0;
    double t_ = 0.0;
    double c_ = 0.0;
    std::vector<double> psi_;
    std::vector<double> phi_;
};

/// Pointwise curvature data sampled on the state's grid (one sample for
/// round spheres).
struct CurvatureField {
    int n = 0;
    std::vector<double> R;           // scalar curvature
    std::vector<double> ric_radial;  // Ricci eigenvalue, radial direction
    std::vector<double> ric_sphere;  // Ricci eigenvalue, sphere directions (multiplicity n-1)
    std::vector<double> rm_norm;     // |Rm|
    std::vector<double> nu_min;      // smallest sectional (curvature operator) eigenvalue
    double ric_inf = 0.0;            // global infimum of Ricci eigenvalues

    int samples() const { return static_cast<int>(R.size()); }
    double max_rm() const;
    double max_R() const;
    /// Index of the sample realizing max R (max |Rm| with by_rm = true).
    int argmax(bool by_rm) const;
};

struct BallVolumeReport {
    int center = 0;
    double radius = 0.0;
    double volume = 0.0;
    double ratio = 0.0;  // volume / radius^n
    bool clamped = false;  // radius exceeded the manifold, whole volume used
    std::optional<double> kappa_threshold;
};

struct DiameterReport {
    double length = 0.0;
    bool exact = true;  // false: axis length is only a lower bound
};

struct RhatReport {
    double lhs = 0.0;  // |Ric|^2
    double rhs = 0.0;  // Rhat^2 - 2 B Rhat + n B^2
    bool holds = false;
    bool hypothesis_ok = true;  // min eigenvalue >= -B
};

MetricState make_round_sphere(int n, double c, double t);
MetricState make_warped(int n, const std::vector<double>& psi_profile,
                        const std::vector<double>& phi_profile, double t);

/// All pointwise curvature quantities of a state. Warped states need
/// at least 8 segments to resolve the poles.
CurvatureField curvature(const MetricState& state);

/// C(n) = sqrt(2/(n(n-1))), the space-form ratio |Rm| = C(n)|R|.
double riemann_scalar_factor(int n);

double total_volume(const MetricState& state);

/// Geodesic ball volume about a center node, measured by arclength along
/// the profile. Exact on round spheres (any center) and for pole-centered
/// balls on warped states.
BallVolumeReport ball_volume_ratio(const MetricState& state, int center, double r,
                                   std::optional<double> kappa_threshold = {});

double diameter(const MetricState& state);
DiameterReport diameter_report(const MetricState& state);

/// Pointwise inequality |Ric|^2 <= Rhat^2 - 2 B Rhat + n B^2 for
/// Ricci eigenvalue tuples with min lambda_i >= -B.
RhatReport rhat_inequality_check(const std::vector<double>& eigenvalues, double B);

/// n-dimensional measure of the unit n-sphere: 2 pi^((n+1)/2) / Gamma((n+1)/2).
double sphere_measure(int k);

/// Volume of the geodesic ball of radius r on the round sphere c*g_s.
double round_ball_volume(int n, double c, double r);

/// Arclength distances from a node along the axis (warped states).
std::vector<double> arclength_from(const MetricState& state, int center);

/// Arclength derivatives of the warped profile on the full grid, computed
/// with the parity-extended stencils (psi odd, phi even about the poles).
struct WarpedDerivatives {
    std::vector<double> psi_s;
    std::vector<double> psi_ss;
};
WarpedDerivatives warped_arc_derivatives(const MetricState& state);

/// Laplace-Beltrami operator applied to a sampled radial function.
/// Round spheres carry constant fields, so the result is zero there.
std::vector<double> laplacian(const MetricState& state, const std::vector<double>& f);

/// Slice integral  int_N F dmu  (signed) over the whole manifold.
double slice_integral(const MetricState& state, const std::vector<double>& F);

}  // namespace ricci
