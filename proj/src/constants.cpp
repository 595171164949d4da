#include "ricci/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ricci {

namespace {

constexpr double kPi = std::numbers::pi;

double binomial(int k, int j) {
    double v = 1.0;
    for (int i = 0; i < j; ++i) v = v * (k - i) / (i + 1);
    return v;
}

// Composite Simpson of sinh^k on [0, U] (mid-range evaluation path).
double sinh_power_simpson(int k, double U) {
    const int N = 2048;
    const double h = U / N;
    double acc = 0.0;  // endpoints: sinh(0)^k = 0; add the right end below
    acc += std::pow(std::sinh(U), k);
    for (int i = 1; i < N; ++i)
        acc += (i % 2 ? 4.0 : 2.0) * std::pow(std::sinh(i * h), k);
    return acc * h / 3.0;
}

}  // namespace

CrokeConstants croke_constants(int n) {
    if (n < 2) throw invalid_parameter_error("croke_constants: n >= 2 required");
    CrokeConstants c;
    const double an = sphere_measure(n);
    const double an1 = sphere_measure(n - 1);
    c.C1 = kPi * an / (2.0 * an1);
    c.C2 = std::pow(2.0, n - 1) * std::pow(an1, n) / std::pow(an, n - 1);
    return c;
}

OmegaTildeBound omega_tilde_lower_bound(double vol_N2, double vol_N1, double D,
                                        double K, int n) {
    if (vol_N1 < 0.0 || D <= 0.0 || K < 0.0 || n < 2)
        throw invalid_parameter_error("omega_tilde_lower_bound: bad parameters");
    OmegaTildeBound out;
    if (vol_N2 < vol_N1) {
        out.vacuous = true;
        out.value = 0.0;
        return out;
    }
    // int_0^D (sinh(K r)/K)^{n-1} dr; the K -> 0 limit integrand is r^{n-1}.
    double denom;
    if (K == 0.0) {
        denom = std::pow(D, n) / n;
    } else {
        denom = sinh_power_integral(n - 1, K * D) / std::pow(K, n);
    }
    out.value = (vol_N2 - vol_N1) / (sphere_measure(n - 1) * denom);
    return out;
}

double isoperimetric_lower_bound(double omega_tilde, int n) {
    if (omega_tilde < 0.0 || omega_tilde > 1.0 + 1e-12)
        throw invalid_parameter_error("isoperimetric_lower_bound: omega in [0,1]");
    return croke_constants(n).C2 * std::pow(omega_tilde, n + 1);
}

double sinh_power_integral(int k, double U) {
    if (k < 1) throw invalid_parameter_error("sinh_power_integral: k >= 1 required");
    if (U < 0.0) throw invalid_parameter_error("sinh_power_integral: U >= 0 required");
    if (U == 0.0) return 0.0;
    if (U < 1e-3) {
        // sinh^k u = u^k (1 + k u^2/6 + k(5k-2) u^4/360 + ...)
        const double u2 = U * U;
        return std::pow(U, k + 1) *
               (1.0 / (k + 1) + k * u2 / (6.0 * (k + 3)) +
                k * (5.0 * k - 2.0) * u2 * u2 / (360.0 * (k + 5)));
    }
    if (U <= 3.0) return sinh_power_simpson(k, U);
    if (k * U > 700.0) return std::numeric_limits<double>::infinity();
    // Exact binomial expansion with expm1 terms; the alternating
    // cancellation is mild once U > 3.
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
        const int a = k - 2 * j;
        const double coef = binomial(k, j) * (j % 2 ? -1.0 : 1.0);
        const double term = a == 0 ? U : std::expm1(a * U) / a;
        acc += coef * term;
    }
    return acc / std::pow(2.0, k);
}

PosReal sinh_power_integral_pos(int k, double U) {
    if (k * U <= 700.0) return pos(sinh_power_integral(k, U));
    // Leading term of the expansion: e^{kU} / (k 2^k); the next term is
    // smaller by a factor ~ k e^{-2U}.
    return PosReal::from_log(k * U - k * std::numbers::ln2 - std::log(double(k)));
}

double r_kappa(int n, double kappa) {
    if (n < 2) throw invalid_parameter_error("r_kappa: n >= 2 required");
    if (!(kappa > 0.0)) throw invalid_parameter_error("r_kappa: kappa > 0 required");
    const double target =
        kappa / (2.0 * sphere_measure(n - 1) * std::exp(2.0 * n * (n - 1)));
    if (!(target > 0.0) || !std::isfinite(target))
        throw invalid_parameter_error("r_kappa: target underflowed");

    auto F = [&](double r) { return sinh_power_integral(n - 1, r); };

    // Bracket: the integral is strictly increasing and onto (0, inf).
    double lo = 0.0;
    double hi = std::pow(double(n) * target, 1.0 / n);  // small-r asymptote
    while (F(hi) < target) hi *= 2.0;

    // Newton from the bracket midpoint with bisection fallback.
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = F(r) - target;
        if (f > 0.0) hi = r;
        else lo = r;
        const double df = std::pow(std::sinh(r), n - 1);
        double next = df > 0.0 ? r - f / df : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) <= 1e-17 * std::max(1.0, r)) {
            r = next;
            break;
        }
        r = next;
    }
    return r;
}

SobolevConstants sobolev_sigma(int n, double kappa) {
    if (n == 2)
        throw not_applicable_error("sobolev_sigma: the exponent divides by n - 2");
    if (n < 3) throw invalid_parameter_error("sobolev_sigma: n >= 3 required");
    if (!(kappa > 0.0)) throw invalid_parameter_error("sobolev_sigma: kappa > 0 required");
    SobolevConstants out;
    const double an1 = sphere_measure(n - 1);
    const PosReal denom =
        pos(2.0 * an1) * sinh_power_integral_pos(n - 1, 2.0 * std::exp(double(n - 1)));
    out.C3 = pos(kappa) * PosReal::from_log(-double(n) * (n - 1)) / denom;
    out.C4 = pos(croke_constants(n).C2) * out.C3.pow(n + 1);
    out.sigma = (pos(2.0 * (n - 1)) / (out.C4 * pos(double(n - 2)))).pow(2.0);
    return out;
}

double moser_nu(int n, double q) {
    if (q <= 0.5 * (n + 2))
        throw not_applicable_error("moser_nu: requires q > (n+2)/2");
    return (n + 2.0) / (2.0 * q - n - 2.0);
}

MoserConstants moser_constants(int n, double q, PosReal sigma, double r, double B,
                               double beta) {
    if (beta <= 1.0) throw invalid_parameter_error("moser_constants: beta > 1 required");
    if (!(r > 0.0)) throw invalid_parameter_error("moser_constants: r > 0 required");
    if (B < 0.0) throw invalid_parameter_error("moser_constants: B >= 0 required");
    MoserConstants out;
    out.Lambda = 6.0 * std::max(beta, 2.0);
    if (q > 0.5 * (n + 2)) out.nu = moser_nu(n, q);
    const PosReal sigma_p = sigma.pow(double(n) / (n + 2));
    out.delta_b = pos(1.0) / (pos(4.0) * sigma_p * pos(out.Lambda));
    out.C8 = 64.0 * std::exp(2.0 * B) / (r * r) + 16.0;
    const PosReal C9 = (pos(2.0) * sigma_p * pos(out.Lambda) * pos(out.C8)).pow(1.0 / beta);
    out.C_b = C9 * (pos(4.0) * sigma_p * pos(out.Lambda) + pos(1.0));
    return out;
}

PosReal moser_ladder_step(int n, double q, PosReal sigma, PosReal C0, double r,
                          double B, int j) {
    const double nu = moser_nu(n, q);
    const double lambda = (n + 2.0) / n;
    const PosReal sigma_p = sigma.pow(double(n) / (n + 2));
    // Pre-iteration constant: two sigma^{n/(n+2)} (1 + C0^{1+nu} (2 sigma^{n/(n+2)})^nu).
    const PosReal C_pre =
        pos(2.0) * sigma_p * (pos(1.0) + C0.pow(1.0 + nu) * (pos(2.0) * sigma_p).pow(nu));
    // Cutoff constant covering every rung: 4^{k+2} e^{2B}/r^2 + 2^{k+3} + 1
    // <= 4^{k-1} (64 e^{2B}/r^2 + 17) for k >= 1.
    const PosReal C8pp = pos(64.0 * std::exp(2.0 * B) / (r * r) + 17.0);
    const double beta_j = std::pow(lambda, j);
    const double Lambda_j = 6.0 * std::max(beta_j, 2.0);
    const PosReal inner = C_pre * C8pp * pos(Lambda_j).pow(1.0 + nu) *
                          PosReal::from_log(j * std::log(4.0));
    return inner.pow(1.0 / beta_j);
}

PosReal moser_ladder_constant(int n, double q, PosReal sigma, PosReal C0, double r,
                              double B) {
    double acc = 0.0;
    for (int j = 1; j <= 2000; ++j) {
        const double step = moser_ladder_step(n, q, sigma, C0, r, B, j).log();
        acc += step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(acc))) break;
    }
    return PosReal::from_log(acc);
}

TildeVolume tilde_volume(int n, double r) {
    if (!(r > 0.0)) throw invalid_parameter_error("tilde_volume: r > 0 required");
    TildeVolume out;
    out.C10 = pos(sphere_measure(n - 1)) *
              sinh_power_integral_pos(n - 1, std::exp(double(n - 1)) * r);
    out.V = out.C10 >= pos(1.0) ? out.C10 : pos(1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Moser domains and cutoffs
// ---------------------------------------------------------------------------

namespace {
// Smoothstep ramp: 0 below 0, 1 above 1, slope <= 1.5 in between.
double ramp(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * (3.0 - 2.0 * u);
}
}  // namespace

MoserDomains::MoserDomains(double r, int k_max) : r_(r), k_max_(k_max) {
    if (!(r > 0.0)) throw invalid_parameter_error("moser_domains: r > 0 required");
    if (k_max < 1) throw invalid_parameter_error("moser_domains: k_max >= 1 required");
}

double MoserDomains::t_k(int k) const { return 0.5 - std::pow(2.0, -(k + 1)); }

double MoserDomains::r_k(int k) const { return (0.5 + std::pow(2.0, -(k + 1))) * r_; }

double MoserDomains::eta(int k, double dist, double t) const {
    if (k < 1) throw invalid_parameter_error("eta: k >= 1 required");
    const double gamma = ramp((t - t_k(k - 1)) / (t_k(k) - t_k(k - 1)));
    const double rho = 1.0 - ramp((dist - r_k(k)) / (r_k(k - 1) - r_k(k)));
    return gamma * rho;
}

double MoserDomains::eta_dt_bound(int k) const { return std::pow(2.0, k + 2); }

double MoserDomains::eta_grad_bound(int k, double B) const {
    return std::exp(B) * std::pow(2.0, k + 2) / r_;
}

MoserDomains moser_domains(double r, int k_max) { return MoserDomains(r, k_max); }

// ---------------------------------------------------------------------------
// Radial quadrature on a slice
// ---------------------------------------------------------------------------

namespace {

// int_{B(center, radius)} f(dist) dmu on one slice, by Simpson in arclength
// with the profile interpolated between nodes.
double radial_ball_integral(const MetricState& s, int center, double radius,
                            const std::function<double(double)>& f) {
    const int n = s.dimension();
    const double an1 = sphere_measure(n - 1);
    const int N = 512;

    if (s.form() == MetricState::Form::RoundSphere) {
        const double rc = std::sqrt(s.scale());
        const double theta = std::min(radius / rc, kPi);
        const double h = theta / N;
        double acc = 0.0;
        for (int i = 0; i <= N; ++i) {
            const double u = i * h;
            const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * f(rc * u) * std::pow(rc * std::sin(u), n - 1);
        }
        return an1 * rc * acc * h / 3.0;
    }

    const int m = s.segments();
    const double hx = s.grid_step();
    const auto& psi = s.psi();
    const auto& phi = s.phi();
    std::vector<double> cum(m + 1, 0.0);
    for (int j = 0; j < m; ++j) cum[j + 1] = cum[j] + 0.5 * hx * (phi[j] + phi[j + 1]);
    const double s_c = cum[center];
    const double lo = std::max(0.0, s_c - radius);
    const double hi = std::min(cum[m], s_c + radius);
    auto psi_at = [&](double arc) {
        const int j = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), arc) -
                                       cum.begin()) -
                      1;
        const int jj = std::clamp(j, 0, m - 1);
        const double seg = cum[jj + 1] - cum[jj];
        const double tau = seg > 0.0 ? (arc - cum[jj]) / seg : 0.0;
        return (1.0 - tau) * psi[jj] + tau * psi[jj + 1];
    };
    const double h = (hi - lo) / N;
    if (!(h > 0.0)) return 0.0;
    double acc = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double arc = lo + i * h;
        const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f(std::abs(arc - s_c)) * std::pow(psi_at(arc), n - 1);
    }
    return an1 * acc * h / 3.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parabolic Sobolev check
// ---------------------------------------------------------------------------

SobolevCheckReport parabolic_sobolev_check(const FlowTrajectory& traj, int center,
                                           const std::vector<RadialTestField>& fields) {
    SobolevCheckReport rep;
    const int n = traj.dimension();
    const double t0 = traj.t_start;
    const double t1 = traj.time(traj.snapshot_count() - 1);

    // Measured non-collapsing constant at the reference slice feeds the
    // Sobolev chain; the inequality is then checked on B(p, r(kappa)).
    const auto& ref = traj.states.back();
    rep.kappa = ball_volume_ratio(ref, center, 1.0).volume;
    rep.r = r_kappa(n, rep.kappa);
    rep.sigma = sobolev_sigma(n, rep.kappa).sigma;

    for (const auto& v : fields) {
        // Boundary trace must vanish.
        double vmax = 0.0;
        for (double tn : {0.0, 0.25, 0.5, 0.75, 1.0})
            for (double sn : {0.0, 0.3, 0.6, 0.9})
                vmax = std::max(vmax, std::abs(v(sn, tn)));
        for (double tn : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            if (std::abs(v(1.0, tn)) > 1e-10 * std::max(vmax, 1e-300))
                throw invalid_parameter_error(
                    "parabolic_sobolev_check: test field does not vanish on the boundary");
        }

        SobolevCheckRow row;
        const double span = t1 - t0;
        double prev_lhs = 0.0, prev_grad = 0.0, prev_t = 0.0;
        bool first = true;
        for (int i = 0; i < traj.snapshot_count(); ++i) {
            const double t = traj.time(i);
            const double tn = span > 0.0 ? (t - t0) / span : 0.0;
            const MetricState& st = traj.states[i];
            auto vi = [&](double dist) { return v(std::min(dist / rep.r, 1.0), tn); };
            auto dvds = [&](double dist) {
                const double du = 1e-5;
                const double up = std::min(dist / rep.r + du, 1.0);
                const double dn = std::max(dist / rep.r - du, 0.0);
                return (v(up, tn) - v(dn, tn)) / ((up - dn) * rep.r);
            };
            const double lhs_i = radial_ball_integral(
                st, center, rep.r,
                [&](double d) { return std::pow(std::abs(vi(d)), 2.0 * (n + 2) / n); });
            const double l2_i = radial_ball_integral(
                st, center, rep.r, [&](double d) { return vi(d) * vi(d); });
            const double grad_i = radial_ball_integral(
                st, center, rep.r, [&](double d) { return dvds(d) * dvds(d); });
            row.max_slice = std::max(row.max_slice, std::sqrt(l2_i));
            if (!first) {
                row.lhs += 0.5 * (t - prev_t) * (lhs_i + prev_lhs);
                row.grad += 0.5 * (t - prev_t) * (grad_i + prev_grad);
            }
            prev_lhs = lhs_i;
            prev_grad = grad_i;
            prev_t = t;
            first = false;
        }
        row.rhs = rep.sigma * pos(std::pow(row.max_slice, 4.0 / n)) * pos(row.grad);
        row.holds = pos(row.lhs) <= row.rhs + pos(1e-300);
        rep.all_hold = rep.all_hold && row.holds;
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Moser iteration trace
// ---------------------------------------------------------------------------

MoserTrace moser_iteration_trace(const FlowTrajectory& traj, int center,
                                 const MoserDomains& domains, const MoserProblem& problem,
                                 PosReal sigma) {
    const int n = traj.dimension();
    const double B = problem.B;
    const double q = problem.q;
    const double lambda = (n + 2.0) / n;
    const double t0 = traj.t_start;
    const double t1 = traj.time(traj.snapshot_count() - 1);
    const double span = t1 - t0;
    auto t_abs = [&](double frac) { return t0 + frac * span; };

    MoserTrace trace;

    // kappa shift: ||h||_{q,D} with h = 2 n B^2.
    const Region D = Region::ball(center, domains.r_k(0), t1);
    if (problem.kappa_shift >= 0.0) {
        trace.kappa_shift = problem.kappa_shift;
    } else {
        const double h_const = 2.0 * n * B * B;
        if (h_const == 0.0) {
            trace.kappa_shift = 0.0;
        } else {
            const double lmeas = log_region_measure(traj, D, t0, t1);
            trace.kappa_shift = h_const * std::exp(lmeas / q);
        }
    }

    auto v_field = [&](int i) {
        std::vector<double> v = traj.curvatures[i].R;
        for (auto& x : v) x += n * B + trace.kappa_shift;
        return v;
    };
    auto f_field = [&](int i) {
        std::vector<double> f = traj.curvatures[i].R;
        for (auto& x : f) x = 2.0 * (x + (n - 2) * B);
        return f;
    };
    auto rminus_field = [&](int i) {
        std::vector<double> f = traj.curvatures[i].R;
        for (auto& x : f) x = std::max(-x, 0.0);
        return f;
    };

    // Hypothesis: ||f||_{q,D} + ||R_-||_{q,D} + 1 <= C0.
    const double lf = log_spacetime_field_power(traj, f_field, q, D, t0, t1);
    const double lrm = log_spacetime_field_power(traj, rminus_field, q, D, t0, t1);
    const double measured = (lf == kLogZero ? 0.0 : std::exp(lf / q)) +
                            (lrm == kLogZero ? 0.0 : std::exp(lrm / q)) + 1.0;
    trace.C0_used = problem.C0 > 0.0 ? pos(problem.C0) : pos(measured + 1.0);
    trace.hypothesis_ok = pos(measured) <= trace.C0_used * pos(1.0 + 1e-12);

    // Measured ladder and the partial-product analytic bound.
    std::vector<double> log_norms(domains.k_max() + 1, 0.0);
    for (int k = 1; k <= domains.k_max(); ++k) {
        const double p = std::pow(lambda, k);
        const Region Dk = Region::ball(center, domains.r_k(k), t1);
        const double lp =
            log_spacetime_field_power(traj, v_field, p, Dk, t_abs(domains.t_k(k)), t1);
        log_norms[k] = lp == kLogZero ? kLogZero : lp / p;
    }

    PosReal bound = PosReal::from_log(log_norms[1]);
    for (int k = 1; k <= domains.k_max(); ++k) {
        MoserRung rung;
        rung.k = k;
        rung.exponent = std::pow(lambda, k);
        rung.norm = log_norms[k] == kLogZero ? 0.0 : std::exp(log_norms[k]);
        if (k > 1)
            bound = bound * moser_ladder_step(n, q, sigma, trace.C0_used,
                                              domains.base_radius(), B, k - 1);
        rung.bound = bound;
        rung.holds = PosReal::from_log(log_norms[k]) <= bound * pos(1.0 + 1e-9);
        trace.all_hold = trace.all_hold && rung.holds;
        trace.rungs.push_back(rung);
    }

    const Region Dprime = Region::ball(center, 0.5 * domains.base_radius(), t1);
    trace.sup_Dprime = sup_field_over_region(traj, v_field, Dprime, t_abs(0.5), t1);
    return trace;
}

// ---------------------------------------------------------------------------
// Epsilon-regularity
// ---------------------------------------------------------------------------

EpsRegularityReport epsilon_regularity_check(const FlowTrajectory& traj, int center,
                                             double B) {
    EpsRegularityReport rep;
    const int n = traj.dimension();
    if (n < 3) throw not_applicable_error("epsilon_regularity_check: n >= 3 required");
    const double t0 = traj.t_start;
    const double t1 = traj.time(traj.snapshot_count() - 1);

    if (std::abs((t1 - t0) - 1.0) > 1e-6)
        rep.reasons.push_back("window is not a unit time span");
    if (B < 0.0 || B > 1.0) rep.reasons.push_back("B outside [0, 1]");

    // Ric >= -B on the whole window.
    double ric_min = std::numeric_limits<double>::infinity();
    for (const auto& cf : traj.curvatures) ric_min = std::min(ric_min, cf.ric_inf);
    if (ric_min < -B - 1e-9) rep.reasons.push_back("Ric >= -B fails on the window");

    // Ric <= n-1 on the unit ball about the center.
    auto ric_max_field = [&](int i) {
        const auto& cf = traj.curvatures[i];
        std::vector<double> v(cf.samples());
        for (int j = 0; j < cf.samples(); ++j)
            v[j] = std::max(cf.ric_radial[j], cf.ric_sphere[j]);
        return v;
    };
    const Region unit_ball = Region::ball(center, 1.0, t1);
    const double ric_max = sup_field_over_region(traj, ric_max_field, unit_ball, t0, t1);
    if (ric_max > double(n - 1) + 1e-9)
        rep.reasons.push_back("Ric <= n-1 fails on the unit ball");

    rep.kappa = ball_volume_ratio(traj.states.back(), center, 1.0).volume;
    rep.r = r_kappa(n, rep.kappa);
    rep.sigma = sobolev_sigma(n, rep.kappa).sigma;

    const double beta = 0.5 * (n + 2);
    const auto mc = moser_constants(n, 0.0, rep.sigma, rep.r, 1.0, beta);
    const auto tv = tilde_volume(n, rep.r);
    rep.delta = mc.delta_b / (pos(3.0 * n) * tv.V);

    const Region D = Region::ball(center, rep.r, t1);
    NormQuery qn{Quantity::Scalar, 0.5 * (n + 2), D, t0, t1};
    rep.norm_in = spacetime_norm(traj, qn);

    // Smallness gate.
    if (!(pos(rep.norm_in + B) <= rep.delta)) rep.reasons.push_back("gate");
    rep.applicable = rep.reasons.empty();

    // Final constant: C_a at q = (n+2)^2/(2n), C0 = (3 C_b + 1) delta_b + 1, B = 1.
    const double q_thm = (n + 2.0) * (n + 2.0) / (2.0 * n);
    const PosReal C0 = (pos(3.0) * mc.C_b + pos(1.0)) * mc.delta_b + pos(1.0);
    const PosReal C_a = moser_ladder_constant(n, q_thm, rep.sigma, C0, rep.r, 1.0);
    rep.C_eps = pos(3.0 * n) * (mc.C_b + pos(1.0)) * C_a *
                tv.V.pow((n + 4.0) / (n + 2.0));

    auto rplus_field = [&](int i) {
        std::vector<double> v = traj.curvatures[i].R;
        for (auto& x : v) x = std::max(x, 0.0);
        return v;
    };
    const Region Dprime = Region::ball(center, 0.5 * rep.r, t1);
    rep.sup_out =
        sup_field_over_region(traj, rplus_field, Dprime, t0 + 0.5 * (t1 - t0), t1);

    rep.holds = pos(rep.sup_out) <= rep.C_eps * pos(rep.norm_in + B) + pos(1e-300);
    return rep;
}

// ---------------------------------------------------------------------------
// Hamilton-Ivey pinching monitor
// ---------------------------------------------------------------------------

HamiltonIveyReport hamilton_ivey_check(const FlowTrajectory& traj) {
    if (traj.dimension() != 3)
        throw not_applicable_error("hamilton_ivey_check: dimension 3 only");
    double nu0 = std::numeric_limits<double>::infinity();
    for (double v : traj.curvatures.front().nu_min) nu0 = std::min(nu0, v);
    if (nu0 < -1.0 - 1e-9)
        throw invalid_parameter_error(
            "hamilton_ivey_check: initial data not normalized (inf nu < -1); rescale first");

    HamiltonIveyReport rep;
    for (int i = 0; i < traj.snapshot_count(); ++i) {
        const auto& cf = traj.curvatures[i];
        const double t = traj.time(i);
        HamiltonIveyRow worst;
        double worst_margin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < cf.samples(); ++j) {
            const double nu = cf.nu_min[j];
            const double anu = std::abs(nu);
            const double rhs =
                anu == 0.0 ? 0.0 : anu * (std::log(anu) + std::log1p(t) - 3.0);
            const double margin = cf.R[j] - rhs;
            ++rep.checked_samples;
            if (margin < -1e-9) rep.all_hold = false;
            if (margin < worst_margin) {
                worst_margin = margin;
                worst = {j, t, cf.R[j], nu, rhs, margin >= -1e-9};
            }
        }
        rep.worst_rows.push_back(worst);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Ledger
// ---------------------------------------------------------------------------

const LedgerEntry& ConstantLedger::at(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw invalid_parameter_error("ledger entry not found: " + name);
}

ConstantLedger build_constant_ledger(int n, double kappa, double r, double q,
                                     double beta, double B) {
    if (n < 3)
        throw not_applicable_error("constant ledger: n >= 3 (sigma divides by n-2)");
    if (!(kappa > 0.0) || !(r > 0.0) || !(beta > 1.0) || B < 0.0)
        throw invalid_parameter_error("constant ledger: bad inputs");

    ConstantLedger led;
    led.n = n;
    led.kappa = kappa;
    led.r = r;
    led.q = q;
    led.beta = beta;
    led.B = B;

    auto add = [&](const std::string& name, const std::string& formula, PosReal v) {
        led.entries.push_back({name, formula, v});
    };

    add("alpha_n", "2 pi^{(n+1)/2} / Gamma((n+1)/2)", pos(sphere_measure(n)));
    add("alpha_n_minus_1", "2 pi^{n/2} / Gamma(n/2)", pos(sphere_measure(n - 1)));

    const auto croke = croke_constants(n);
    add("C1", "pi alpha(n) / (2 alpha(n-1))", pos(croke.C1));
    add("C2", "2^{n-1} alpha(n-1)^n / alpha(n)^{n-1}", pos(croke.C2));

    add("r_kappa", "root of int_0^r sinh^{n-1} = kappa/(2 alpha(n-1) e^{2n(n-1)})",
        pos(r_kappa(n, kappa)));

    const auto sob = sobolev_sigma(n, kappa);
    add("C3", "kappa e^{-n(n-1)} / (2 alpha(n-1) int_0^{2e^{n-1}} sinh^{n-1})", sob.C3);
    add("C4", "C2 C3^{n+1}", sob.C4);
    add("sigma", "(2(n-1) / ((n-2) C4))^2", sob.sigma);

    const auto mc = moser_constants(n, q, sob.sigma, r, B, beta);
    add("Lambda_beta", "6 max(beta, 2)", pos(mc.Lambda));
    if (mc.nu) {
        led.nu = *mc.nu;
        add("nu", "(n+2)/(2q - n - 2)", pos(*mc.nu));
    }
    add("delta_b", "1 / (4 sigma^{n/(n+2)} Lambda)", mc.delta_b);
    add("C8", "64 e^{2B} r^{-2} + 16", pos(mc.C8));
    add("C_b", "(2 sigma^{n/(n+2)} Lambda C8)^{1/beta} (4 sigma^{n/(n+2)} Lambda + 1)",
        mc.C_b);

    const auto tv = tilde_volume(n, r);
    add("C10", "alpha(n-1) int_0^{e^{n-1} r} sinh^{n-1}", tv.C10);
    add("V_tilde", "max(C10, 1)", tv.V);

    const PosReal delta = mc.delta_b / (pos(3.0 * n) * tv.V);
    add("delta", "delta_b / (3 n V_tilde)", delta);

    const PosReal C0 = (pos(3.0) * mc.C_b + pos(1.0)) * mc.delta_b + pos(1.0);
    add("C0", "(3 C_b + 1) delta_b + 1", C0);

    if (mc.nu) {
        const PosReal C_a = moser_ladder_constant(n, q, sob.sigma, C0, r, B);
        add("C_a", "prod_j [C_pre C8'' Lambda(l^j)^{1+nu} 4^j]^{1/l^j}", C_a);
        add("C_eps", "3n (C_b + 1) C_a V_tilde^{(n+4)/(n+2)}",
            pos(3.0 * n) * (mc.C_b + pos(1.0)) * C_a * tv.V.pow((n + 4.0) / (n + 2.0)));
    }
    return led;
}

}  // namespace ricci
