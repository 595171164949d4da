#include "ricci/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ricci {

namespace {

constexpr double kPi = std::numbers::pi;

// Ghost-node access with parity reflection about both poles.
// Odd fields (psi) flip sign across a pole, even fields (phi) do not.
double reflect_get(const std::vector<double>& v, int j, bool odd) {
    const int m = static_cast<int>(v.size()) - 1;
    double s = 1.0;
    while (j < 0 || j > m) {
        if (j < 0) {
            j = -j;
        } else {
            j = 2 * m - j;
        }
        if (odd) s = -s;
    }
    return s * v[j];
}

// Fourth-order first derivative in x; needed so that (1 - psi_s^2)
// stays consistent with psi^2 near the poles.
double d1_o4(const std::vector<double>& v, int j, double h, bool odd) {
    return (-reflect_get(v, j + 2, odd) + 8.0 * reflect_get(v, j + 1, odd) -
            8.0 * reflect_get(v, j - 1, odd) + reflect_get(v, j - 2, odd)) /
           (12.0 * h);
}

double d2_o2(const std::vector<double>& v, int j, double h, bool odd) {
    return (reflect_get(v, j + 1, odd) - 2.0 * v[j] + reflect_get(v, j - 1, odd)) /
           (h * h);
}

// Quadratic extrapolation in x^2 of an even-about-pole field to the pole.
double pole_even_extrapolate(double f1, double f2) {
    return (4.0 * f1 - f2) / 3.0;
}

// int_0^theta sin^k u du by the stable downward recursion.
double sin_power_integral(int k, double theta) {
    if (k == 0) return theta;
    if (k == 1) return 1.0 - std::cos(theta);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return (-c * std::pow(s, k - 1) + (k - 1) * sin_power_integral(k - 2, theta)) / k;
}

double trapezoid(const std::vector<double>& f, double h) {
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t j = 1; j + 1 < f.size(); ++j) sum += f[j];
    return sum * h;
}

}  // namespace

// ---------------------------------------------------------------------------
// MetricState
// ---------------------------------------------------------------------------

MetricState MetricState::round_sphere(int n, double c, double t) {
    if (n < 2) throw invalid_parameter_error("round sphere: dimension must be >= 2");
    if (!(c > 0.0) || !std::isfinite(c))
        throw invalid_parameter_error("round sphere: scale factor must be positive");
    MetricState s;
    s.form_ = Form::RoundSphere;
    s.n_ = n;
    s.t_ = t;
    s.c_ = c;
    return s;
}

MetricState MetricState::warped(int n, std::vector<double> psi,
                                std::vector<double> phi, double t) {
    if (n < 2) throw invalid_parameter_error("warped: dimension must be >= 2");
    if (psi.size() != phi.size())
        throw invalid_profile_error("warped: psi and phi must share the grid");
    if (psi.size() < 5)
        throw invalid_profile_error("warped: need at least 5 nodes on [0, pi]");
    MetricState s;
    s.form_ = Form::Warped;
    s.n_ = n;
    s.t_ = t;
    // Snap pole values that are zero up to rounding; the invariant wants
    // exact zeros there.
    double scale = 0.0;
    for (double v : psi) scale = std::max(scale, std::abs(v));
    for (std::size_t j : {std::size_t{0}, psi.size() - 1}) {
        if (std::abs(psi[j]) <= 1e-13 * scale) psi[j] = 0.0;
    }
    s.psi_ = std::move(psi);
    s.phi_ = std::move(phi);
    s.validate();
    return s;
}

double MetricState::scale() const {
    if (form_ != Form::RoundSphere)
        throw invalid_parameter_error("scale() is only defined for round spheres");
    return c_;
}

double MetricState::grid_step() const { return kPi / segments(); }

double MetricState::x(int j) const { return kPi * j / segments(); }

std::pair<double, double> MetricState::pole_regularity_defect() const {
    if (form_ != Form::Warped)
        throw invalid_parameter_error("pole regularity is a warped-state notion");
    const int m = segments();
    const double h = grid_step();
    const double ds_left = std::abs(d1_o4(psi_, 0, h, true)) / phi_[0];
    const double ds_right = std::abs(d1_o4(psi_, m, h, true)) / phi_[m];
    return {std::abs(ds_left - 1.0), std::abs(ds_right - 1.0)};
}

double MetricState::pole_tolerance() const {
    const double h = grid_step();
    return std::max(1e-6, 10.0 * h * h);
}

void MetricState::validate() const {
    if (form_ == Form::RoundSphere) {
        if (!(c_ > 0.0) || !std::isfinite(c_))
            throw invalid_parameter_error("round sphere: scale factor must be positive");
        return;
    }
    const int m = segments();
    for (int j = 0; j <= m; ++j) {
        if (!std::isfinite(psi_[j]) || !std::isfinite(phi_[j]))
            throw invalid_profile_error("warped: non-finite profile value");
        if (!(phi_[j] > 0.0))
            throw invalid_profile_error("warped: phi must be positive everywhere");
    }
    if (psi_[0] != 0.0 || psi_[m] != 0.0)
        throw invalid_profile_error("warped: psi must vanish exactly at the poles");
    for (int j = 1; j < m; ++j) {
        if (!(psi_[j] > 0.0))
            throw invalid_profile_error("warped: psi must be positive at interior nodes");
    }
    const auto [dl, dr] = pole_regularity_defect();
    const double tol = pole_tolerance();
    if (dl > tol || dr > tol)
        throw invalid_profile_error("warped: |d psi/ds| != 1 at a pole beyond tolerance");
}

bool MetricState::is_valid() const noexcept {
    try {
        validate();
        return true;
    } catch (const error&) {
        return false;
    }
}

MetricState make_round_sphere(int n, double c, double t) {
    return MetricState::round_sphere(n, c, t);
}

MetricState make_warped(int n, const std::vector<double>& psi_profile,
                        const std::vector<double>& phi_profile, double t) {
    return MetricState::warped(n, psi_profile, phi_profile, t);
}

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

double CurvatureField::max_rm() const {
    return *std::max_element(rm_norm.begin(), rm_norm.end());
}

double CurvatureField::max_R() const {
    return *std::max_element(R.begin(), R.end());
}

int CurvatureField::argmax(bool by_rm) const {
    const auto& v = by_rm ? rm_norm : R;
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

WarpedDerivatives warped_arc_derivatives(const MetricState& state) {
    if (state.form() != MetricState::Form::Warped)
        throw invalid_parameter_error("warped_arc_derivatives: warped states only");
    const int m = state.segments();
    const double h = state.grid_step();
    const auto& psi = state.psi();
    const auto& phi = state.phi();
    WarpedDerivatives d;
    d.psi_s.resize(m + 1);
    d.psi_ss.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double px = d1_o4(psi, j, h, true);
        const double pxx = d2_o2(psi, j, h, true);
        const double fx = d1_o4(phi, j, h, false);
        d.psi_s[j] = px / phi[j];
        d.psi_ss[j] = (pxx * phi[j] - px * fx) / (phi[j] * phi[j] * phi[j]);
    }
    return d;
}

CurvatureField curvature(const MetricState& state) {
    const int n = state.dimension();
    CurvatureField out;
    out.n = n;

    if (state.form() == MetricState::Form::RoundSphere) {
        const double K = 1.0 / state.scale();
        out.R = {n * (n - 1) * K};
        out.ric_radial = {(n - 1) * K};
        out.ric_sphere = {(n - 1) * K};
        out.rm_norm = {std::sqrt(2.0 * n * (n - 1)) * K};
        out.nu_min = {K};
        out.ric_inf = (n - 1) * K;
        return out;
    }

    if (state.segments() < 8)
        throw resolution_error("curvature: need at least 8 segments to resolve the poles");

    const int m = state.segments();
    const auto& psi = state.psi();
    const auto d = warped_arc_derivatives(state);

    std::vector<double> k_rad(m + 1), k_sph(m + 1);
    for (int j = 1; j < m; ++j) {
        k_rad[j] = -d.psi_ss[j] / psi[j];
        k_sph[j] = (1.0 - d.psi_s[j] * d.psi_s[j]) / (psi[j] * psi[j]);
    }
    // Sectional curvatures are even about the poles and coincide there.
    k_rad[0] = pole_even_extrapolate(k_rad[1], k_rad[2]);
    k_rad[m] = pole_even_extrapolate(k_rad[m - 1], k_rad[m - 2]);
    k_sph[0] = k_rad[0];
    k_sph[m] = k_rad[m];

    out.R.resize(m + 1);
    out.ric_radial.resize(m + 1);
    out.ric_sphere.resize(m + 1);
    out.rm_norm.resize(m + 1);
    out.nu_min.resize(m + 1);
    double ric_inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= m; ++j) {
        out.ric_radial[j] = (n - 1) * k_rad[j];
        out.ric_sphere[j] = k_rad[j] + (n - 2) * k_sph[j];
        out.R[j] = out.ric_radial[j] + (n - 1) * out.ric_sphere[j];
        out.rm_norm[j] = std::sqrt(4.0 * (n - 1) * k_rad[j] * k_rad[j] +
                                   2.0 * (n - 1) * (n - 2) * k_sph[j] * k_sph[j]);
        out.nu_min[j] = (n == 2) ? k_rad[j] : std::min(k_rad[j], k_sph[j]);
        ric_inf = std::min({ric_inf, out.ric_radial[j], out.ric_sphere[j]});
    }
    out.ric_inf = ric_inf;
    return out;
}

double riemann_scalar_factor(int n) {
    if (n < 2) throw invalid_parameter_error("riemann_scalar_factor: n >= 2 required");
    return std::sqrt(2.0 / (static_cast<double>(n) * (n - 1)));
}

// ---------------------------------------------------------------------------
// Volumes, distances
// ---------------------------------------------------------------------------

double sphere_measure(int k) {
    if (k < 1) throw invalid_parameter_error("sphere_measure: k >= 1 required");
    return 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

double total_volume(const MetricState& state) {
    const int n = state.dimension();
    if (state.form() == MetricState::Form::RoundSphere)
        return std::pow(state.scale(), 0.5 * n) * sphere_measure(n);
    const auto& psi = state.psi();
    const auto& phi = state.phi();
    std::vector<double> f(psi.size());
    for (std::size_t j = 0; j < psi.size(); ++j)
        f[j] = phi[j] * std::pow(psi[j], n - 1);
    return sphere_measure(n - 1) * trapezoid(f, state.grid_step());
}

double round_ball_volume(int n, double c, double r) {
    const double theta = std::min(r / std::sqrt(c), kPi);
    return sphere_measure(n - 1) * std::pow(c, 0.5 * n) *
           sin_power_integral(n - 1, theta);
}

std::vector<double> arclength_from(const MetricState& state, int center) {
    if (state.form() != MetricState::Form::Warped)
        throw invalid_parameter_error("arclength_from: warped states only");
    const auto& phi = state.phi();
    const double h = state.grid_step();
    const int m = state.segments();
    if (center < 0 || center > m)
        throw invalid_parameter_error("arclength_from: center node out of range");
    std::vector<double> cum(m + 1, 0.0);
    for (int j = 0; j < m; ++j) cum[j + 1] = cum[j] + 0.5 * h * (phi[j] + phi[j + 1]);
    std::vector<double> dist(m + 1);
    for (int j = 0; j <= m; ++j) dist[j] = std::abs(cum[j] - cum[center]);
    return dist;
}

BallVolumeReport ball_volume_ratio(const MetricState& state, int center, double r,
                                   std::optional<double> kappa_threshold) {
    if (!(r > 0.0)) throw invalid_parameter_error("ball_volume_ratio: radius must be positive");
    const int n = state.dimension();
    BallVolumeReport rep;
    rep.center = center;
    rep.radius = r;
    rep.kappa_threshold = kappa_threshold;

    if (state.form() == MetricState::Form::RoundSphere) {
        const double diam = kPi * std::sqrt(state.scale());
        rep.clamped = r >= diam;
        rep.volume = round_ball_volume(n, state.scale(), r);
        rep.ratio = rep.volume / std::pow(r, n);
        return rep;
    }

    const auto dist = arclength_from(state, center);
    const auto& psi = state.psi();
    const auto& phi = state.phi();
    const double h = state.grid_step();
    const int m = state.segments();
    const double an1 = sphere_measure(n - 1);

    auto density = [&](int j) { return phi[j] * std::pow(psi[j], n - 1); };

    if (r >= dist[0] && r >= dist[m]) {
        rep.clamped = true;
        rep.volume = total_volume(state);
        rep.ratio = rep.volume / std::pow(r, n);
        return rep;
    }

    // Walk outward from the center in both directions, adding whole
    // trapezoid cells; the crossing cell is integrated by Simpson on the
    // interpolated profile (the density ~ psi^{n-1} vanishes like a power
    // toward the poles, so interpolating the density itself is badly off
    // for sub-cell radii).
    double vol = 0.0;
    auto partial_cell = [&](int j, int k, double frac) {
        const int N = 16;
        double acc = 0.0;
        for (int i = 0; i <= N; ++i) {
            const double tau = frac * i / N;
            const double ps = (1.0 - tau) * psi[j] + tau * psi[k];
            const double ph = (1.0 - tau) * phi[j] + tau * phi[k];
            const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * ph * std::pow(ps, n - 1);
        }
        return acc * (frac * h / N) / 3.0;
    };
    auto sweep = [&](int step) {
        for (int j = center; j + step >= 0 && j + step <= m; j += step) {
            const int k = j + step;
            if (dist[k] <= r) {
                vol += 0.5 * h * (density(j) + density(k));
            } else {
                const double span = dist[k] - dist[j];
                const double frac = span > 0.0 ? (r - dist[j]) / span : 0.0;
                vol += partial_cell(j, k, frac);
                break;
            }
        }
    };
    sweep(+1);
    sweep(-1);

    rep.volume = an1 * vol;
    rep.ratio = rep.volume / std::pow(r, n);
    return rep;
}

DiameterReport diameter_report(const MetricState& state) {
    DiameterReport rep;
    if (state.form() == MetricState::Form::RoundSphere) {
        rep.length = kPi * std::sqrt(state.scale());
        rep.exact = true;
        return rep;
    }
    const auto& psi = state.psi();
    const auto& phi = state.phi();
    const double h = state.grid_step();
    rep.length = trapezoid(phi, h);
    rep.exact = true;
    const int m = state.segments();
    for (int j = 1; j < m; ++j) {
        const double psi_s = d1_o4(psi, j, h, true) / phi[j];
        if (std::abs(psi_s) > 1.0 + state.pole_tolerance()) {
            rep.exact = false;  // axis length is only a lower bound then
            break;
        }
    }
    return rep;
}

double diameter(const MetricState& state) { return diameter_report(state).length; }

// ---------------------------------------------------------------------------
// Pointwise Ricci inequality
// ---------------------------------------------------------------------------

RhatReport rhat_inequality_check(const std::vector<double>& eigenvalues, double B) {
    if (eigenvalues.empty())
        throw invalid_parameter_error("rhat_inequality_check: empty eigenvalue list");
    if (B < 0.0)
        throw invalid_parameter_error("rhat_inequality_check: B must be nonnegative");
    const int n = static_cast<int>(eigenvalues.size());
    RhatReport rep;
    double sum = 0.0;
    double min_ev = eigenvalues[0];
    for (double ev : eigenvalues) {
        rep.lhs += ev * ev;
        sum += ev;
        min_ev = std::min(min_ev, ev);
    }
    rep.hypothesis_ok = min_ev >= -B - 1e-12;
    const double rhat = sum + n * B;
    rep.rhs = rhat * rhat - 2.0 * B * rhat + n * B * B;
    rep.holds = rep.lhs <= rep.rhs + check_tolerance(rep.rhs);
    return rep;
}

// ---------------------------------------------------------------------------
// Differential operators and slice integrals
// ---------------------------------------------------------------------------

std::vector<double> laplacian(const MetricState& state, const std::vector<double>& f) {
    if (state.form() == MetricState::Form::RoundSphere) {
        if (f.size() != 1)
            throw invalid_parameter_error("laplacian: round-sphere fields carry one sample");
        return {0.0};
    }
    const int m = state.segments();
    if (static_cast<int>(f.size()) != m + 1)
        throw invalid_parameter_error("laplacian: field size does not match the grid");
    const double h = state.grid_step();
    const auto& psi = state.psi();
    const auto& phi = state.phi();
    std::vector<double> out(m + 1);
    for (int j = 1; j < m; ++j) {
        const double fx = d1_o4(f, j, h, false);
        const double fxx = d2_o2(f, j, h, false);
        const double gx = d1_o4(phi, j, h, false);
        const double f_s = fx / phi[j];
        const double f_ss = (fxx * phi[j] - fx * gx) / (phi[j] * phi[j] * phi[j]);
        const double psi_s = d1_o4(psi, j, h, true) / phi[j];
        out[j] = f_ss + ((state.dimension() - 1) * psi_s / psi[j]) * f_s;
    }
    // Poles: f is even about them, Delta f -> n * f_ss.
    const double fxx0 = 2.0 * (f[1] - f[0]) / (h * h);
    const double fxxm = 2.0 * (f[m - 1] - f[m]) / (h * h);
    out[0] = state.dimension() * fxx0 / (phi[0] * phi[0]);
    out[m] = state.dimension() * fxxm / (phi[m] * phi[m]);
    return out;
}

double slice_integral(const MetricState& state, const std::vector<double>& F) {
    const int n = state.dimension();
    if (state.form() == MetricState::Form::RoundSphere) {
        if (F.size() != 1)
            throw invalid_parameter_error("slice_integral: round-sphere fields carry one sample");
        return F[0] * total_volume(state);
    }
    const int m = state.segments();
    if (static_cast<int>(F.size()) != m + 1)
        throw invalid_parameter_error("slice_integral: field size does not match the grid");
    const auto& psi = state.psi();
    const auto& phi = state.phi();
    std::vector<double> f(m + 1);
    for (int j = 0; j <= m; ++j) f[j] = F[j] * phi[j] * std::pow(psi[j], n - 1);
    return sphere_measure(n - 1) * trapezoid(f, state.grid_step());
}

}  // namespace ricci
