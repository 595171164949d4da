#include "ricci/norms.hpp"

#include "ricci/logspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ricci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_0^theta sin^k u du: downward recursion, series for tiny apertures
// (the recursion cancels catastrophically when theta^{k+1} is near ulp).
double sin_power_int(int k, double theta) {
    if (theta < 1e-3) {
        const double t2 = theta * theta;
        return std::pow(theta, k + 1) *
               (1.0 / (k + 1) - k * t2 / (6.0 * (k + 3)) +
                k * (5.0 * k - 2.0) * t2 * t2 / (360.0 * (k + 5)));
    }
    if (k == 0) return theta;
    if (k == 1) return 1.0 - std::cos(theta);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return (-c * std::pow(s, k - 1) + (k - 1) * sin_power_int(k - 2, theta)) / k;
}

// Resolved region: an angular aperture (round) or an x-interval (warped),
// frozen in the reference slice.
struct ResolvedRegion {
    bool whole = true;
    double aperture = 0.0;  // round: geodesic angle from the center
    double x_lo = 0.0, x_hi = 0.0;
};

ResolvedRegion resolve_region(const FlowTrajectory& traj, const Region& region) {
    ResolvedRegion rr;
    if (region.kind == Region::Kind::Whole) return rr;
    rr.whole = false;
    const int iref = traj.index_at_or_before(region.ref_time);
    const MetricState& ref = traj.states[iref];
    if (ref.form() == MetricState::Form::RoundSphere) {
        rr.aperture = std::min(region.radius / std::sqrt(ref.scale()), std::numbers::pi);
        return rr;
    }
    const auto dist = arclength_from(ref, region.center);
    const int m = ref.segments();
    const double h = ref.grid_step();
    // Walk out from the center; linear interpolation fixes the fractional
    // boundary in x.
    auto boundary = [&](int dir) {
        int j = region.center;
        while (j + dir >= 0 && j + dir <= m && dist[j + dir] <= region.radius) j += dir;
        if (j + dir < 0 || j + dir > m) return ref.x(j);
        const double span = dist[j + dir] - dist[j];
        const double frac = span > 0.0 ? (region.radius - dist[j]) / span : 0.0;
        return ref.x(j) + dir * frac * h;
    };
    rr.x_lo = boundary(-1);
    rr.x_hi = boundary(+1);
    return rr;
}

// log of int_region |F|^p dmu on one slice for an arbitrary sampled field.
double log_slice_field_power(const MetricState& state, const std::vector<double>& field,
                             double p, const ResolvedRegion& rr) {
    const int n = state.dimension();

    if (state.form() == MetricState::Form::RoundSphere) {
        const double f = std::abs(field[0]);
        const double theta = rr.whole ? std::numbers::pi : rr.aperture;
        const double vol = sphere_measure(n - 1) * std::pow(state.scale(), 0.5 * n) *
                           sin_power_int(n - 1, theta);
        if (f == 0.0 || vol <= 0.0) return kLogZero;
        return p * std::log(f) + std::log(vol);
    }

    const int m = state.segments();
    const double h = state.grid_step();
    const auto& psi = state.psi();
    const auto& phi = state.phi();
    const double x_lo = rr.whole ? 0.0 : rr.x_lo;
    const double x_hi = rr.whole ? std::numbers::pi : rr.x_hi;

    auto log_point = [&](int j) {
        const double f = std::abs(field[j]);
        const double dens = phi[j] * std::pow(psi[j], n - 1);
        if (f == 0.0 || dens == 0.0) return kLogZero;
        return p * std::log(f) + std::log(dens);
    };
    // Partial cells: composite Simpson on linearly interpolated profile and
    // field values. This stays accurate when the cut lands inside a cell
    // whose density vanishes toward a pole (sub-grid balls included).
    auto log_partial_cell = [&](int j, double a, double b) {
        const int N = 16;
        const double w = (b - a) / N;
        double acc = kLogZero;
        for (int i = 0; i <= N; ++i) {
            const double x = a + i * w;
            const double tau = (x - state.x(j)) / h;
            const double ps = (1.0 - tau) * psi[j] + tau * psi[j + 1];
            const double ph = (1.0 - tau) * phi[j] + tau * phi[j + 1];
            const double f = std::abs((1.0 - tau) * field[j] + tau * field[j + 1]);
            if (ps <= 0.0 || f == 0.0) continue;
            const double lg = p * std::log(f) + std::log(ph) + (n - 1) * std::log(ps);
            const double simpson_w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc = logaddexp(acc, lg + std::log(simpson_w * w / 3.0));
        }
        return acc;
    };

    double acc = kLogZero;
    for (int j = 0; j < m; ++j) {
        const double xl = state.x(j), xr = state.x(j + 1);
        if (xr <= x_lo || xl >= x_hi) continue;
        const double a = std::max(xl, x_lo);
        const double b = std::min(xr, x_hi);
        double cell;
        if (a == xl && b == xr) {
            const double la = log_point(j), lb = log_point(j + 1);
            if (la == kLogZero && lb == kLogZero) continue;
            cell = std::log(0.5 * h) + logaddexp(la, lb);
        } else {
            cell = log_partial_cell(j, a, b);
            if (cell == kLogZero) continue;
        }
        acc = logaddexp(acc, cell);
    }
    return acc == kLogZero ? kLogZero : acc + std::log(sphere_measure(n - 1));
}

// log of int_region |F|^alpha dmu on one snapshot, region already resolved.
double log_slice_power_resolved(const MetricState& state, const CurvatureField& cf,
                                Quantity q, double alpha, const ResolvedRegion& rr) {
    return log_slice_field_power(state, sample_field(cf, q), alpha, rr);
}

// Exact integral of the power-law fit through (t_i, I_i), (t_j, I_j) with
// pole at T_hat; falls back to trapezoid when the fit is not usable.
double log_interval_term(double t_i, double log_i, double t_j, double log_j,
                         double a, double b, bool singular, double T_hat) {
    const double lo = std::max(a, t_i);
    const double hi = std::min(b, t_j);
    if (!(hi > lo)) return kLogZero;

    auto trapezoid = [&]() {
        // Linear interpolation of I in log space at the segment ends.
        const double w = t_j - t_i;
        auto at = [&](double t) {
            if (log_i == kLogZero || log_j == kLogZero) {
                // Interpolate the values linearly when a side vanishes.
                const double Ii = log_i == kLogZero ? 0.0 : std::exp(log_i);
                const double Ij = log_j == kLogZero ? 0.0 : std::exp(log_j);
                const double v = Ii + (Ij - Ii) * (t - t_i) / w;
                return v > 0.0 ? std::log(v) : kLogZero;
            }
            return log_i + (log_j - log_i) * (t - t_i) / w;
        };
        const double la = at(lo), lb = at(hi);
        if (la == kLogZero && lb == kLogZero) return kLogZero;
        return std::log(0.5 * (hi - lo)) + logaddexp(la, lb);
    };

    if (!singular || log_i == kLogZero || log_j == kLogZero || T_hat <= t_j)
        return trapezoid();

    const double u_i = T_hat - t_i;
    const double u_j = T_hat - t_j;
    const double p = (log_j - log_i) / (std::log(u_j) - std::log(u_i));
    if (!std::isfinite(p)) return trapezoid();
    const double log_C = log_i - p * std::log(u_i);
    const double ua = T_hat - lo;
    const double ub = T_hat - hi;  // ua > ub > 0
    const double q = p + 1.0;
    if (std::abs(q) < 1e-9) {
        return log_C + std::log(std::log(ua / ub));
    }
    const double x1 = q * std::log(ua);
    const double x2 = q * std::log(ub);
    // |e^x1 - e^x2| / |q|
    const double hi_x = std::max(x1, x2), lo_x = std::min(x1, x2);
    return log_C + logdiffexp(hi_x, lo_x) - std::log(std::abs(q));
}

double sup_over_interval(const FlowTrajectory& traj, const NormQuery& q) {
    double best = 0.0;
    for (int i = 0; i < traj.snapshot_count(); ++i) {
        const double t = traj.time(i);
        if (t < q.t_begin - 1e-15 || t > q.t_end + 1e-15) continue;
        for (double v : sample_field(traj.curvatures[i], q.quantity))
            best = std::max(best, std::abs(v));
    }
    return best;
}

}  // namespace

std::string quantity_name(Quantity q) {
    switch (q) {
        case Quantity::Scalar: return "R";
        case Quantity::AbsScalar: return "absR";
        case Quantity::ScalarPlus: return "R+";
        case Quantity::ScalarMinus: return "R-";
        case Quantity::RiemannNorm: return "Rm";
        case Quantity::RicciNorm: return "Ric";
    }
    return "?";
}

Quantity quantity_from_name(const std::string& name) {
    if (name == "R") return Quantity::Scalar;
    if (name == "absR" || name == "|R|") return Quantity::AbsScalar;
    if (name == "R+" || name == "Rplus") return Quantity::ScalarPlus;
    if (name == "R-" || name == "Rminus") return Quantity::ScalarMinus;
    if (name == "Rm" || name == "|Rm|") return Quantity::RiemannNorm;
    if (name == "Ric" || name == "|Ric|") return Quantity::RicciNorm;
    throw invalid_parameter_error("unknown quantity: " + name);
}

std::vector<double> sample_field(const CurvatureField& cf, Quantity q) {
    const int s = cf.samples();
    std::vector<double> out(s);
    for (int j = 0; j < s; ++j) {
        switch (q) {
            case Quantity::Scalar: out[j] = cf.R[j]; break;
            case Quantity::AbsScalar: out[j] = std::abs(cf.R[j]); break;
            case Quantity::ScalarPlus: out[j] = std::max(cf.R[j], 0.0); break;
            case Quantity::ScalarMinus: out[j] = std::max(-cf.R[j], 0.0); break;
            case Quantity::RiemannNorm: out[j] = cf.rm_norm[j]; break;
            case Quantity::RicciNorm:
                out[j] = std::sqrt(cf.ric_radial[j] * cf.ric_radial[j] +
                                   (cf.n - 1) * cf.ric_sphere[j] * cf.ric_sphere[j]);
                break;
        }
    }
    return out;
}

double log_slice_power(const MetricState& state, const CurvatureField& cf,
                       Quantity q, double alpha, const Region& region,
                       const FlowTrajectory& traj) {
    return log_slice_power_resolved(state, cf, q, alpha, resolve_region(traj, region));
}

double slice_norm(const MetricState& state, Quantity q, double alpha) {
    const auto cf = curvature(state);
    if (alpha == kInf) {
        double best = 0.0;
        for (double v : sample_field(cf, q)) best = std::max(best, std::abs(v));
        return best;
    }
    if (alpha < 1.0) throw invalid_parameter_error("slice_norm: alpha >= 1 required");
    ResolvedRegion whole;
    const double lp = log_slice_power_resolved(state, cf, q, alpha, whole);
    return lp == kLogZero ? 0.0 : std::exp(lp / alpha);
}

double log_spacetime_power(const FlowTrajectory& traj, const NormQuery& q) {
    if (q.alpha < 1.0) throw invalid_parameter_error("spacetime norm: alpha >= 1 required");
    if (q.t_begin < traj.time(0) - 1e-12 ||
        q.t_end > traj.time(traj.snapshot_count() - 1) + 1e-12)
        throw out_of_range_error("norm interval extends beyond the stored snapshots");
    if (q.t_end < q.t_begin)
        throw invalid_parameter_error("norm interval is empty");

    const ResolvedRegion rr = resolve_region(traj, q.region);
    const double T_hat = traj.T_hat.value_or(0.0);

    // Slice powers are evaluated lazily: only snapshots bounding intervals
    // that intersect the window are needed.
    std::vector<double> logI(traj.snapshot_count(), 1.0);  // 1.0 marks "unset"
    auto slice = [&](int i) {
        if (logI[i] > 0.0)
            logI[i] = log_slice_power_resolved(traj.states[i], traj.curvatures[i],
                                               q.quantity, q.alpha, rr);
        return logI[i];
    };

    double acc = kLogZero;
    for (int i = 0; i + 1 < traj.snapshot_count(); ++i) {
        const double t_i = traj.time(i), t_j = traj.time(i + 1);
        if (t_j <= q.t_begin || t_i >= q.t_end) continue;
        const double term = log_interval_term(t_i, slice(i), t_j, slice(i + 1),
                                              q.t_begin, q.t_end, traj.singular, T_hat);
        acc = logaddexp(acc, term);
    }
    return acc;
}

double spacetime_norm(const FlowTrajectory& traj, const NormQuery& q) {
    if (q.alpha == kInf) return sup_over_interval(traj, q);
    const double lp = log_spacetime_power(traj, q);
    return lp == kLogZero ? 0.0 : std::exp(lp / q.alpha);
}

double log_spacetime_field_power(const FlowTrajectory& traj, const SnapshotField& field,
                                 double p, const Region& region, double t0, double t1) {
    if (t0 < traj.time(0) - 1e-12 ||
        t1 > traj.time(traj.snapshot_count() - 1) + 1e-12)
        throw out_of_range_error("field power interval extends beyond the snapshots");
    const ResolvedRegion rr = resolve_region(traj, region);
    std::vector<double> logI(traj.snapshot_count(), 1.0);
    auto slice = [&](int i) {
        if (logI[i] > 0.0)
            logI[i] = log_slice_field_power(traj.states[i], field(i), p, rr);
        return logI[i];
    };
    double acc = kLogZero;
    for (int i = 0; i + 1 < traj.snapshot_count(); ++i) {
        const double t_i = traj.time(i), t_j = traj.time(i + 1);
        if (t_j <= t0 || t_i >= t1) continue;
        acc = logaddexp(acc, log_interval_term(t_i, slice(i), t_j, slice(i + 1), t0, t1,
                                               false, 0.0));
    }
    return acc;
}

double sup_field_over_region(const FlowTrajectory& traj, const SnapshotField& field,
                             const Region& region, double t0, double t1) {
    const ResolvedRegion rr = resolve_region(traj, region);
    double best = 0.0;
    for (int i = 0; i < traj.snapshot_count(); ++i) {
        const double t = traj.time(i);
        if (t < t0 - 1e-12 || t > t1 + 1e-12) continue;
        const auto values = field(i);
        const MetricState& s = traj.states[i];
        if (s.form() == MetricState::Form::RoundSphere || rr.whole) {
            for (double v : values) best = std::max(best, std::abs(v));
            continue;
        }
        for (int j = 0; j < static_cast<int>(values.size()); ++j) {
            const double x = s.x(j);
            if (x < rr.x_lo - 1e-15 || x > rr.x_hi + 1e-15) continue;
            best = std::max(best, std::abs(values[j]));
        }
        // Piecewise-linear sup also needs the region edge values (the only
        // contribution when the ball is smaller than one cell).
        const double h = s.grid_step();
        for (double x : {rr.x_lo, rr.x_hi}) {
            if (x <= 0.0 || x >= std::numbers::pi) continue;
            const int j = std::min(static_cast<int>(x / h), s.segments() - 1);
            const double tau = (x - s.x(j)) / h;
            best = std::max(best, std::abs((1.0 - tau) * values[j] + tau * values[j + 1]));
        }
    }
    return best;
}

double log_region_measure(const FlowTrajectory& traj, const Region& region, double t0,
                          double t1) {
    auto ones = [&](int i) {
        return std::vector<double>(traj.curvatures[i].samples(), 1.0);
    };
    return log_spacetime_field_power(traj, ones, 1.0, region, t0, t1);
}

double closed_form_sphere_norm(int n, double V0, double T, double alpha) {
    if (n < 2 || V0 <= 0.0 || T <= 0.0)
        throw invalid_parameter_error("closed_form_sphere_norm: bad parameters");
    if (alpha < 1.0)
        throw invalid_parameter_error("closed_form_sphere_norm: alpha >= 1 required");
    if (alpha >= 0.5 * n + 1.0) return kInf;
    const double q = 0.5 * n - alpha;
    const double time_integral = std::pow(T, q + 1.0) / (q + 1.0);
    return 0.5 * n * std::pow(V0, 1.0 / alpha) * std::pow(T, -0.5 * n / alpha) *
           std::pow(time_integral, 1.0 / alpha);
}

std::string divergence_name(Divergence d) {
    switch (d) {
        case Divergence::Finite: return "finite";
        case Divergence::LogDivergent: return "log-divergent";
        case Divergence::PowerDivergent: return "power-divergent";
    }
    return "?";
}

std::vector<ScanRow> alpha_threshold_scan(const FlowTrajectory& traj, Quantity quantity,
                                          const std::vector<double>& alphas,
                                          const std::vector<double>& eps_sequence) {
    if (!traj.singular || !traj.T_hat)
        throw not_applicable_error("alpha_threshold_scan: singular trajectory required");
    for (std::size_t k = 0; k + 1 < eps_sequence.size(); ++k) {
        if (!(eps_sequence[k] > eps_sequence[k + 1]) || eps_sequence[k + 1] <= 0.0)
            throw invalid_parameter_error("eps sequence must be positive decreasing");
    }
    const double T_hat = *traj.T_hat;
    const double t_last = traj.time(traj.snapshot_count() - 1);

    std::vector<ScanRow> rows;
    for (double alpha : alphas) {
        ScanRow row;
        row.alpha = alpha;
        std::vector<double> logJ;
        for (double eps : eps_sequence) {
            const double b = T_hat - eps;
            if (b <= traj.t_start || b > t_last) continue;  // unresolvable epsilon
            NormQuery q{quantity, alpha, Region::whole(), traj.t_start, b};
            const double lp = log_spacetime_power(traj, q);
            row.eps.push_back(eps);
            logJ.push_back(lp);
            row.partial_norms.push_back(lp == kLogZero ? 0.0 : std::exp(lp / alpha));
        }
        const int K = static_cast<int>(row.eps.size());
        if (K >= 2) {
            // Least-squares slope of log J against log(1/eps), last 3 points.
            const int use = std::min(3, K);
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (int k = K - use; k < K; ++k) {
                const double x = std::log(1.0 / row.eps[k]);
                const double y = logJ[k];
                sx += x; sy += y; sxx += x * x; sxy += x * y;
            }
            row.exponent = (use * sxy - sx * sy) / (use * sxx - sx * sx);

            const double nK = row.partial_norms[K - 1];
            const double nK1 = row.partial_norms[K - 2];
            const bool cauchy = nK > 0.0 && std::abs(nK - nK1) / nK <= 1e-3;
            if (cauchy)
                row.classification = Divergence::Finite;
            else if (row.exponent > 0.05)
                row.classification = Divergence::PowerDivergent;
            else
                row.classification = Divergence::LogDivergent;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

NormStatus norm_status_for(const FlowTrajectory& traj, Quantity quantity, double alpha) {
    NormStatus st;
    if (!traj.singular) {
        NormQuery q{quantity, alpha, Region::whole(), traj.t_start,
                    traj.time(traj.snapshot_count() - 1)};
        st.finite = true;
        st.value = spacetime_norm(traj, q);
        st.classification = Divergence::Finite;
        return st;
    }
    // Adaptive epsilon ladder toward the estimated singular time. The floor
    // keeps successive cutoffs at least a snapshot interval apart, so the
    // partials genuinely differ.
    const double T_hat = *traj.T_hat;
    const int K = traj.snapshot_count();
    const double span = T_hat - traj.t_start;
    double floor_eps = std::max(T_hat - traj.time(K - 1), 0.0);
    if (K >= 3) floor_eps = std::max(floor_eps, 0.5 * (traj.time(K - 1) - traj.time(K - 3)));
    std::vector<double> eps;
    double e = span / 4.0;
    while (e > floor_eps && eps.size() < 40) {
        eps.push_back(e);
        e /= 4.0;
    }
    if (eps.size() < 2) {
        st.resolved = false;
        st.finite = false;  // no evidence either way; never certify finiteness
        return st;
    }
    auto rows = alpha_threshold_scan(traj, quantity, {alpha}, eps);
    const auto& row = rows.front();
    st.resolved = row.eps.size() >= 2;
    st.classification = row.classification;
    st.finite = st.resolved && row.classification == Divergence::Finite;
    st.value = row.partial_norms.empty() ? 0.0 : row.partial_norms.back();
    st.exponent = row.exponent;
    return st;
}

}  // namespace

ExtensionVerdict extension_verdict(const FlowTrajectory& traj, double alpha) {
    ExtensionVerdict v;
    v.alpha = alpha;
    double ric_inf = 0.0;
    for (const auto& cf : traj.curvatures) ric_inf = std::min(ric_inf, cf.ric_inf);
    v.A = std::max(0.0, -ric_inf);

    v.scalar_norm = norm_status_for(traj, Quantity::Scalar, alpha);
    v.riemann_norm = norm_status_for(traj, Quantity::RiemannNorm, alpha);

    const int n = traj.dimension();
    const bool alpha_ok = alpha >= 0.5 * (n + 2) - 1e-12;
    v.scalar_criterion_met = alpha_ok && v.scalar_norm.finite;
    v.riemann_criterion_met = alpha_ok && v.riemann_norm.finite;

    if (!traj.singular) {
        v.conclusion = "extendable (nonsingular window, trivially continues)";
    } else if (v.scalar_criterion_met) {
        v.conclusion = "extendable-by-scalar-criterion";
    } else if (v.riemann_criterion_met) {
        v.conclusion = "extendable-by-riemann-criterion";
    } else {
        std::string reasons;
        if (!alpha_ok) reasons += "alpha";
        if (!v.scalar_norm.finite || !v.riemann_norm.finite) {
            if (!reasons.empty()) reasons += ",";
            reasons += "norm";
        }
        v.conclusion = "hypotheses-fail(" + reasons + ")";
    }

    // A singular flow satisfying either extension criterion would contradict it.
    v.consistent = !traj.singular ||
                   (!v.scalar_criterion_met && !v.riemann_criterion_met);
    return v;
}

namespace {

// Volume of a frozen region in the metric of snapshot i.
double region_volume(const FlowTrajectory& traj, int i, const ResolvedRegion& rr) {
    const auto ones = std::vector<double>(traj.curvatures[i].samples(), 1.0);
    const double lg = log_slice_field_power(traj.states[i], ones, 1.0, rr);
    return lg == kLogZero ? 0.0 : std::exp(lg);
}

// Geodesic extent of a frozen region in the metric of snapshot i: the full
// diameter for the whole manifold, twice the aperture arc for round caps,
// the axis arclength of the x-interval for warped slabs.
double region_extent(const FlowTrajectory& traj, int i, const ResolvedRegion& rr) {
    const MetricState& s = traj.states[i];
    if (rr.whole) return diameter(s);
    if (s.form() == MetricState::Form::RoundSphere)
        return std::min(2.0 * rr.aperture, std::numbers::pi) * std::sqrt(s.scale());
    const int m = s.segments();
    const double h = s.grid_step();
    double len = 0.0;
    for (int j = 0; j < m; ++j) {
        const double a = std::max(s.x(j), rr.x_lo);
        const double b = std::min(s.x(j + 1), rr.x_hi);
        if (b <= a) continue;
        const auto phi_at = [&](double x) {
            const double tau = (x - s.x(j)) / h;
            return (1.0 - tau) * s.phi()[j] + tau * s.phi()[j + 1];
        };
        len += 0.5 * (b - a) * (phi_at(a) + phi_at(b));
    }
    return len;
}

}  // namespace

VolumeDiameterReport volume_diameter_bound_check(const FlowTrajectory& traj,
                                                 const Region& region, double a,
                                                 double b, const RicciBounds& bounds) {
    if (a >= b) throw invalid_parameter_error("volume_diameter_bound_check: a < b required");
    const ResolvedRegion rr = resolve_region(traj, region);
    VolumeDiameterReport rep;
    const int n = traj.dimension();
    const int ib = traj.index_at_or_before(b);
    rep.t_ref = traj.time(ib);
    const double v_ref = region_volume(traj, ib, rr);
    const double d_ref = region_extent(traj, ib, rr);
    double worst = std::numeric_limits<double>::infinity();

    for (int i = 0; i <= ib; ++i) {
        const double t = traj.time(i);
        if (t < a - 1e-15) continue;
        const auto& cf = traj.curvatures[i];
        const MetricState& s = traj.states[i];
        for (int j = 0; j < cf.samples(); ++j) {
            if (!rr.whole && s.form() == MetricState::Form::Warped) {
                const double x = s.x(j);
                if (x < rr.x_lo - 1e-15 || x > rr.x_hi + 1e-15) continue;
            }
            if (cf.ric_radial[j] < bounds.ric_low - 1e-12 ||
                cf.ric_radial[j] > bounds.ric_high + 1e-12 ||
                cf.ric_sphere[j] < bounds.ric_low - 1e-12 ||
                cf.ric_sphere[j] > bounds.ric_high + 1e-12)
                rep.hypothesis_ok = false;
        }
        const double gap = rep.t_ref - t;
        const double v = region_volume(traj, i, rr);
        const double lower = v_ref * std::exp(n * bounds.ric_low * gap);
        const double upper = v_ref * std::exp(n * bounds.ric_high * gap);
        const double d_bound = d_ref * std::exp(bounds.ric_high * gap);
        const double d = region_extent(traj, i, rr);
        if (v < lower - check_tolerance(lower)) rep.vol_lower_holds = false;
        if (v > upper + check_tolerance(upper)) rep.vol_upper_holds = false;
        if (d > d_bound + check_tolerance(d_bound)) rep.diam_holds = false;
        worst = std::min({worst, v - lower, upper - v, d_bound - d});
    }
    rep.worst_margin = worst;
    return rep;
}

}  // namespace ricci
