#include "ricci/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ricci {

namespace {

// Midpoint-rule right-hand side: d phi/dt = -ric_radial phi,
// d psi/dt = -ric_sphere psi (poles stay pinned since psi = 0 there).
struct WarpedRhs {
    std::vector<double> dpsi;
    std::vector<double> dphi;
};

// The stepper evaluates the K_sph reaction through the integrated identity
//   1 - psi_s^2 (x) = -2 int_0^x psi_ss psi_s phi dx',
// which builds the pole regularity condition |psi_s| = 1 into the
// integration constant. The pointwise quotient (1 - psi_s^2)/psi^2 couples
// the discrete cone mode (psi_s(0) != 1) back to itself at a rate ~ 1/h^2
// and is dynamically unstable; the integrated form is invariant under that
// mode. The quadrature closure error is redistributed with a smooth weight
// vanishing like dist^4 at both poles, which keeps the right-pole branch
// consistent without introducing a formula seam anywhere on the grid.
WarpedRhs warped_rhs(const MetricState& state) {
    const int m = state.segments();
    const int n = state.dimension();
    const double h = state.grid_step();
    const auto& psi = state.psi();
    const auto& phi = state.phi();
    const auto d = warped_arc_derivatives(state);

    std::vector<double> k_rad(m + 1, 0.0);
    for (int j = 1; j < m; ++j) k_rad[j] = -d.psi_ss[j] / psi[j];
    k_rad[0] = (4.0 * k_rad[1] - k_rad[2]) / 3.0;
    k_rad[m] = (4.0 * k_rad[m - 1] - k_rad[m - 2]) / 3.0;

    std::vector<double> W(m + 1, 0.0);
    auto integrand = [&](int j) { return -2.0 * d.psi_ss[j] * d.psi_s[j] * phi[j]; };
    for (int j = 1; j <= m; ++j)
        W[j] = W[j - 1] + 0.5 * h * (integrand(j - 1) + integrand(j));
    const double closure = W[m];  // analytically zero

    WarpedRhs rhs;
    rhs.dpsi.resize(m + 1);
    rhs.dphi.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
        double k_sph = k_rad[j];
        if (j > 0 && j < m) {
            const double cx = std::cos(state.x(j));
            const double lambda = (2.0 - 3.0 * cx + cx * cx * cx) / 4.0;
            k_sph = (W[j] - lambda * closure) / (psi[j] * psi[j]);
        }
        const double ric_sphere = k_rad[j] + (n - 2) * k_sph;
        const double ric_radial = (n - 1) * k_rad[j];
        rhs.dpsi[j] = -ric_sphere * psi[j];
        rhs.dphi[j] = -ric_radial * phi[j];
    }
    rhs.dpsi[0] = 0.0;
    rhs.dpsi[m] = 0.0;
    return rhs;
}

MetricState advance(const MetricState& base, const WarpedRhs& rhs, double dt,
                    double new_time) {
    const int m = base.segments();
    std::vector<double> psi(m + 1), phi(m + 1);
    for (int j = 0; j <= m; ++j) {
        psi[j] = base.psi()[j] + dt * rhs.dpsi[j];
        phi[j] = base.phi()[j] + dt * rhs.dphi[j];
    }
    for (int j = 0; j <= m; ++j) {
        if (!std::isfinite(psi[j]) || !std::isfinite(phi[j]))
            throw numerical_blowup_error("warped step produced non-finite values");
    }
    double psi_min = std::numeric_limits<double>::infinity();
    for (int j = 1; j < m; ++j) psi_min = std::min(psi_min, psi[j]);
    if (psi_min < 10.0 * std::numeric_limits<double>::epsilon())
        throw singularity_signal_error("interior of psi collapsed");
    try {
        auto next = MetricState::warped(base.dimension(), std::move(psi),
                                        std::move(phi), new_time);
        return next;
    } catch (const invalid_profile_error& e) {
        throw step_rejected_error(e.what());
    }
}

}  // namespace

void FlowConfig::validate() const {
    if (!(dt_initial > 0.0)) throw invalid_parameter_error("flow config: dt_initial > 0");
    if (!(safety > 0.0) || safety > 1.0)
        throw invalid_parameter_error("flow config: safety in (0, 1]");
    if (!(curvature_ceiling > 0.0))
        throw invalid_parameter_error("flow config: curvature_ceiling > 0");
    if (output_stride < 1) throw invalid_parameter_error("flow config: output_stride >= 1");
}

int FlowTrajectory::index_at_or_before(double t) const {
    if (snapshot_count() == 0 || t < time(0) - 1e-12)
        throw out_of_range_error("time precedes the stored trajectory");
    int lo = 0;
    for (int i = 0; i < snapshot_count(); ++i) {
        if (time(i) <= t + 1e-15) lo = i;
        else break;
    }
    return lo;
}

void FlowTrajectory::validate() const {
    for (int i = 0; i + 1 < snapshot_count(); ++i) {
        if (!(time(i) < time(i + 1)))
            throw invalid_parameter_error("trajectory times must strictly increase");
    }
    for (const auto& s : states) {
        s.validate();
        if (s.dimension() != states.front().dimension() ||
            s.form() != states.front().form())
            throw invalid_parameter_error("trajectory states must share n and form");
    }
    for (std::size_t i = 1; i < max_curvature_track.size(); ++i) {
        if (max_curvature_track[i].value < max_curvature_track[i - 1].value - 1e-12)
            throw invalid_parameter_error("running curvature max must be nondecreasing");
    }
}

MetricState evolve_round_sphere(int n, double c0, double t) {
    if (n < 2) throw invalid_parameter_error("evolve_round_sphere: n >= 2");
    if (!(c0 > 0.0)) throw invalid_parameter_error("evolve_round_sphere: c0 > 0");
    const double T = c0 / (2.0 * (n - 1));
    if (t >= T) throw past_singularity_error("evolve_round_sphere: t >= maximal time");
    return make_round_sphere(n, c0 - 2.0 * (n - 1) * t, t);
}

double warped_stability_dt(const MetricState& state) {
    const int m = state.segments();
    const double h = state.grid_step();
    const auto& psi = state.psi();
    const auto& phi = state.phi();
    double coeff = 1.0;
    for (int j = 0; j <= m; ++j) coeff = std::max(coeff, 1.0 / (phi[j] * phi[j]));
    // Neck stiffness: the reaction term is steep at interior minima of psi.
    for (int j = 1; j < m; ++j) {
        if (psi[j] <= psi[j - 1] && psi[j] <= psi[j + 1])
            coeff = std::max(coeff, 1.0 / (psi[j] * psi[j]));
    }
    return h * h / (2.0 * coeff);
}

MetricState step_warped(const MetricState& state, double dt) {
    if (state.form() != MetricState::Form::Warped)
        throw invalid_parameter_error("step_warped: warped states only");
    if (dt < 0.0) throw invalid_parameter_error("step_warped: dt >= 0");
    if (dt == 0.0) return state;
    const WarpedRhs k1 = warped_rhs(state);
    const MetricState half = advance(state, k1, 0.5 * dt, state.time() + 0.5 * dt);
    const WarpedRhs k2 = warped_rhs(half);
    return advance(state, k2, dt, state.time() + dt);
}

FlowTrajectory run_flow(const MetricState& initial, const FlowConfig& config) {
    config.validate();
    initial.validate();

    FlowTrajectory traj;
    traj.config = config;
    traj.t_start = initial.time();

    const int n = initial.dimension();
    const bool round = initial.form() == MetricState::Form::RoundSphere;

    MetricState state = initial;
    CurvatureField cf = curvature(state);

    TrackPoint best{state.time(), cf.argmax(true), cf.max_rm()};

    auto record = [&](const MetricState& s, const CurvatureField& c) {
        traj.states.push_back(s);
        traj.curvatures.push_back(c);
        if (c.max_rm() >= best.value)
            best = {s.time(), c.argmax(true), c.max_rm()};
        traj.max_curvature_track.push_back(best);
    };

    record(state, cf);

    const double T_exact =
        round ? initial.time() + initial.scale() / (2.0 * (n - 1)) : 0.0;

    int steps_since_snapshot = 0;
    double dt_warped = std::min(config.dt_initial, config.safety * warped_stability_dt(state));

    auto snapshot_due = [&](bool force) {
        ++steps_since_snapshot;
        if (force || steps_since_snapshot >= config.output_stride) {
            steps_since_snapshot = 0;
            return true;
        }
        return false;
    };

    while (true) {
        if (cf.max_rm() >= config.curvature_ceiling) {
            traj.singular = true;
            break;
        }
        if (state.time() >= config.t_max - 1e-15) break;

        if (round) {
            const double remaining = T_exact - state.time();
            double dt = std::min(config.dt_initial, config.safety * 0.05 * remaining);
            if (dt < 1e-14) {  // step size collapsed against the singular time
                traj.singular = true;
                break;
            }
            dt = std::min(dt, config.t_max - state.time());
            const double t_new = state.time() + dt;
            state = make_round_sphere(n, initial.scale() - 2.0 * (n - 1) * (t_new - traj.t_start),
                                      t_new);
            cf = curvature(state);
            if (snapshot_due(false)) record(state, cf);
            continue;
        }

        // Warped branch: explicit midpoint with step-size control.
        dt_warped = std::min(dt_warped, config.safety * warped_stability_dt(state));
        bool accepted = false;
        bool forced_snapshot = false;
        while (!accepted) {
            if (dt_warped < 1e-14) {
                traj.singular = true;
                break;
            }
            dt_warped = std::min(dt_warped, config.t_max - state.time());
            try {
                state = step_warped(state, dt_warped);
                accepted = true;
            } catch (const step_rejected_error&) {
                dt_warped *= 0.5;
                forced_snapshot = true;
            } catch (const singularity_signal_error&) {
                traj.singular = true;
                break;
            } catch (const numerical_blowup_error&) {
                traj.numerical_blowup = true;
                break;
            }
        }
        if (!accepted) break;
        cf = curvature(state);
        if (snapshot_due(forced_snapshot)) record(state, cf);
        dt_warped = std::min(config.dt_initial, config.safety * warped_stability_dt(state));
    }

    // Always keep the final accepted state.
    if (traj.states.back().time() < state.time()) record(state, cf);
    traj.t_end = state.time();

    // Maximal-time estimate: linear extrapolation of 1/max|Rm| -> 0 when the
    // blow-up looks type-I (three-point linearity), else the last time.
    if (traj.singular) {
        traj.T_hat = traj.t_end;
        const int K = traj.snapshot_count();
        if (K >= 3) {
            const double tK = traj.time(K - 1), tK1 = traj.time(K - 2), tK2 = traj.time(K - 3);
            const double yK = 1.0 / traj.curvatures[K - 1].max_rm();
            const double yK1 = 1.0 / traj.curvatures[K - 2].max_rm();
            const double yK2 = 1.0 / traj.curvatures[K - 3].max_rm();
            const double slope = (yK - yK1) / (tK - tK1);
            if (slope < 0.0) {
                const double predicted = yK + slope * (tK2 - tK);
                if (std::abs(predicted - yK2) <= 0.1 * yK2)
                    traj.T_hat = tK - yK / slope;
            }
        } else if (cf.max_rm() >= config.curvature_ceiling && K == 1) {
            traj.T_hat = traj.t_start;  // ceiling already exceeded at start
        }
    }

    traj.validate();
    return traj;
}

std::vector<double> scalar_evolution_residual(const FlowTrajectory& traj, int i) {
    if (i <= 0 || i + 1 >= traj.snapshot_count())
        throw out_of_range_error("scalar_evolution_residual: interior snapshot required");
    const auto& prev = traj.curvatures[i - 1];
    const auto& cur = traj.curvatures[i];
    const auto& next = traj.curvatures[i + 1];
    const double dt2 = traj.time(i + 1) - traj.time(i - 1);
    const auto lap = laplacian(traj.states[i], cur.R);
    const int n = traj.dimension();
    std::vector<double> res(cur.samples());
    for (int j = 0; j < cur.samples(); ++j) {
        const double dRdt = (next.R[j] - prev.R[j]) / dt2;
        const double ric2 = cur.ric_radial[j] * cur.ric_radial[j] +
                            (n - 1) * cur.ric_sphere[j] * cur.ric_sphere[j];
        res[j] = dRdt - lap[j] - 2.0 * ric2;
    }
    return res;
}

double residual_summary(const MetricState& state, const std::vector<double>& residual) {
    const int s = static_cast<int>(residual.size());
    if (s == 1) return std::abs(residual[0]);
    // The discretization error of sampled curvature grows like h^2/x^2
    // toward the coordinate poles; the summary is the volume-weighted RMS
    // of the residual away from a fixed pole neighborhood, where the field
    // is uniformly second order.
    constexpr double kPoleCut = 0.25;
    const double h = state.grid_step();
    const int n = state.dimension();
    double num = 0.0, den = 0.0;
    for (int j = 0; j < s; ++j) {
        const double x = h * j;
        if (x < kPoleCut || x > std::numbers::pi - kPoleCut) continue;
        const double w = state.phi()[j] * std::pow(state.psi()[j], n - 1);
        num += w * residual[j] * residual[j];
        den += w;
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double volume_evolution_residual(const FlowTrajectory& traj, int i) {
    if (i <= 0 || i + 1 >= traj.snapshot_count())
        throw out_of_range_error("volume_evolution_residual: interior snapshot required");
    const double dt2 = traj.time(i + 1) - traj.time(i - 1);
    const double dVdt = (total_volume(traj.states[i + 1]) - total_volume(traj.states[i - 1])) / dt2;
    const double rint = slice_integral(traj.states[i], traj.curvatures[i].R);
    return std::abs(dVdt + rint);
}

VolumeDiameterReport volume_diameter_bound_check(const FlowTrajectory& traj,
                                                 double a, double b,
                                                 const RicciBounds& bounds) {
    if (a >= b) throw invalid_parameter_error("volume_diameter_bound_check: a < b required");
    VolumeDiameterReport rep;
    const int n = traj.dimension();
    const int ib = traj.index_at_or_before(b);
    rep.t_ref = traj.time(ib);
    const double v_ref = total_volume(traj.states[ib]);
    const double d_ref = diameter(traj.states[ib]);
    double worst = std::numeric_limits<double>::infinity();

    for (int i = 0; i <= ib; ++i) {
        const double t = traj.time(i);
        if (t < a - 1e-15) continue;
        const auto& cf = traj.curvatures[i];
        for (int j = 0; j < cf.samples(); ++j) {
            if (cf.ric_radial[j] < bounds.ric_low - 1e-12 ||
                cf.ric_radial[j] > bounds.ric_high + 1e-12 ||
                cf.ric_sphere[j] < bounds.ric_low - 1e-12 ||
                cf.ric_sphere[j] > bounds.ric_high + 1e-12)
                rep.hypothesis_ok = false;
        }
        const double gap = rep.t_ref - t;
        const double v = total_volume(traj.states[i]);
        const double lower = v_ref * std::exp(n * bounds.ric_low * gap);
        const double upper = v_ref * std::exp(n * bounds.ric_high * gap);
        const double d_bound = d_ref * std::exp(bounds.ric_high * gap);
        const double d = diameter(traj.states[i]);
        if (v < lower - check_tolerance(lower)) rep.vol_lower_holds = false;
        if (v > upper + check_tolerance(upper)) rep.vol_upper_holds = false;
        if (d > d_bound + check_tolerance(d_bound)) rep.diam_holds = false;
        worst = std::min({worst, v - lower, upper - v, d_bound - d});
    }
    rep.worst_margin = worst;
    return rep;
}

std::vector<TrackPoint> curvature_maximizing_sequence(const FlowTrajectory& traj,
                                                      int k, TrackQuantity quantity) {
    if (!traj.singular)
        throw not_applicable_error("curvature_maximizing_sequence: singular trajectory required");
    if (k < 1) throw invalid_parameter_error("curvature_maximizing_sequence: k >= 1");

    const bool by_rm = quantity == TrackQuantity::RiemannNorm;
    std::vector<TrackPoint> attained;  // snapshots where the running max is realized now
    double running = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < traj.snapshot_count(); ++i) {
        const auto& cf = traj.curvatures[i];
        const int node = cf.argmax(by_rm);
        const double value = by_rm ? cf.rm_norm[node] : cf.R[node];
        if (value >= running) {
            running = value;
            attained.push_back({traj.time(i), node, value});
        }
    }
    const int M = static_cast<int>(attained.size());
    std::vector<TrackPoint> out;
    if (M == 0) return out;
    if (k == 1) return {attained.back()};
    int prev = -1;
    for (int j = 0; j < k; ++j) {
        int idx = static_cast<int>(std::round(static_cast<double>(j) * (M - 1) / (k - 1)));
        if (idx <= prev) idx = prev + 1;
        if (idx >= M) break;
        out.push_back(attained[idx]);
        prev = idx;
    }
    return out;
}

}  // namespace ricci
