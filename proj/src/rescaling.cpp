#include "ricci/rescaling.hpp"

#include "ricci/logspace.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ricci {

namespace {

// Source state at time tau, linearly interpolated between snapshots.
MetricState interpolate_state(const FlowTrajectory& traj, double tau) {
    const int last = traj.snapshot_count() - 1;
    const double t0 = traj.time(0), t1 = traj.time(last);
    const double slack = 1e-12 * std::max(1.0, std::abs(t1));
    if (tau < t0 - slack || tau > t1 + slack)
        throw out_of_range_error("rescale interval escapes the source span");
    const double t = std::clamp(tau, t0, t1);
    int i = traj.index_at_or_before(t);
    if (i == last) i = last - 1;
    if (i < 0) i = 0;
    const double w = traj.time(i + 1) - traj.time(i);
    const double theta = w > 0.0 ? (t - traj.time(i)) / w : 0.0;
    const MetricState& A = traj.states[i];
    const MetricState& B = traj.states[i + 1];
    if (A.form() == MetricState::Form::RoundSphere) {
        const double c = (1.0 - theta) * A.scale() + theta * B.scale();
        return make_round_sphere(A.dimension(), c, tau);
    }
    const int m = A.segments();
    std::vector<double> psi(m + 1), phi(m + 1);
    for (int j = 0; j <= m; ++j) {
        psi[j] = (1.0 - theta) * A.psi()[j] + theta * B.psi()[j];
        phi[j] = (1.0 - theta) * A.phi()[j] + theta * B.phi()[j];
    }
    return make_warped(A.dimension(), psi, phi, tau);
}

MetricState scale_state(const MetricState& s, double Q, double new_time) {
    if (s.form() == MetricState::Form::RoundSphere)
        return make_round_sphere(s.dimension(), Q * s.scale(), new_time);
    const double root = std::sqrt(Q);
    std::vector<double> psi(s.psi()), phi(s.phi());
    for (auto& v : psi) v *= root;
    for (auto& v : phi) v *= root;
    return make_warped(s.dimension(), psi, phi, new_time);
}

}  // namespace

FlowTrajectory parabolic_rescale(const FlowTrajectory& traj, const RescaleSpec& spec,
                                 double a, double b) {
    if (!(spec.Q > 0.0)) throw invalid_parameter_error("rescale: Q must be positive");
    if (!(a < b)) throw invalid_parameter_error("rescale: empty interval");

    auto to_source = [&](double t) { return t / spec.Q + spec.t_center; };

    // New time grid: window ends plus the images of interior source times.
    std::set<double> times{a, b};
    for (int i = 0; i < traj.snapshot_count(); ++i) {
        const double t = spec.Q * (traj.time(i) - spec.t_center);
        if (t > a && t < b) times.insert(t);
    }

    FlowTrajectory out;
    out.config = traj.config;
    out.t_start = a;
    out.t_end = b;
    out.singular = traj.singular;
    out.numerical_blowup = traj.numerical_blowup;
    if (traj.T_hat) out.T_hat = spec.Q * (*traj.T_hat - spec.t_center);

    TrackPoint best{a, 0, -std::numeric_limits<double>::infinity()};
    for (double t : times) {
        MetricState src = interpolate_state(traj, to_source(t));
        MetricState scaled = scale_state(src, spec.Q, t);
        CurvatureField cf = curvature(scaled);
        if (cf.max_rm() >= best.value) best = {t, cf.argmax(true), cf.max_rm()};
        out.states.push_back(std::move(scaled));
        out.curvatures.push_back(std::move(cf));
        out.max_curvature_track.push_back(best);
    }
    out.validate();
    return out;
}

double rescaled_power_ratio(const FlowTrajectory& traj, const RescaleSpec& spec,
                            double w0, double w1, double alpha) {
    FlowTrajectory scaled = parabolic_rescale(traj, spec, w0, w1);
    NormQuery after_q{Quantity::RiemannNorm, alpha, Region::whole(), w0, w1};
    NormQuery before_q{Quantity::RiemannNorm, alpha, Region::whole(),
                       w0 / spec.Q + spec.t_center, w1 / spec.Q + spec.t_center};
    const double log_after = log_spacetime_power(scaled, after_q);
    const double log_before = log_spacetime_power(traj, before_q);
    return std::exp(log_after - log_before);
}

InvarianceReport critical_integral_invariance(const FlowTrajectory& traj,
                                              const RescaleSpec& spec, double w0,
                                              double w1) {
    const double alpha = 0.5 * (traj.dimension() + 2);
    FlowTrajectory scaled = parabolic_rescale(traj, spec, w0, w1);
    NormQuery after_q{Quantity::RiemannNorm, alpha, Region::whole(), w0, w1};
    NormQuery before_q{Quantity::RiemannNorm, alpha, Region::whole(),
                       w0 / spec.Q + spec.t_center, w1 / spec.Q + spec.t_center};
    InvarianceReport rep;
    const double log_after = log_spacetime_power(scaled, after_q);
    const double log_before = log_spacetime_power(traj, before_q);
    rep.before = std::exp(log_before);
    rep.after = std::exp(log_after);
    rep.relative_diff = std::abs(std::expm1(log_after - log_before));
    return rep;
}

BlowupSequence blowup_sequence(const FlowTrajectory& traj, int count,
                               TrackQuantity quantity) {
    // Sample the maximizing sequence densely, keep the anchors whose
    // backward parabolic window fits in the stored span, then spread the
    // requested count over them (always retaining the latest).
    const int dense = std::max(count, std::min(64, traj.snapshot_count()));
    const auto all = curvature_maximizing_sequence(traj, dense, quantity);
    std::vector<TrackPoint> usable;
    for (const auto& a : all) {
        if (a.value > 0.0 && a.t - 1.0 / a.value >= traj.t_start - 1e-15)
            usable.push_back(a);
    }
    std::vector<TrackPoint> anchors;
    const int M = static_cast<int>(usable.size());
    if (M <= count) {
        anchors = usable;
    } else if (count == 1) {
        anchors = {usable.back()};
    } else {
        int prev = -1;
        for (int j = 0; j < count; ++j) {
            int idx = static_cast<int>(
                std::round(static_cast<double>(j) * (M - 1) / (count - 1)));
            if (idx <= prev) idx = prev + 1;
            anchors.push_back(usable[idx]);
            prev = idx;
        }
    }

    BlowupSequence seq;
    const double alpha_crit = 0.5 * (traj.dimension() + 2);

    for (const auto& anchor : anchors) {
        const double Q = anchor.value;
        const double t_center = anchor.t - 1.0 / Q;

        BlowupElement el;
        el.anchor = anchor;
        el.trajectory = parabolic_rescale(traj, {Q, t_center, anchor.node}, 0.0, 1.0);

        const auto& last_cf = el.trajectory.curvatures.back();
        const auto field = sample_field(last_cf, quantity == TrackQuantity::RiemannNorm
                                                     ? Quantity::RiemannNorm
                                                     : Quantity::Scalar);
        el.normalized_value = field[std::min<std::size_t>(anchor.node, field.size() - 1)];

        double qmax = 0.0;
        double ric_lo = std::numeric_limits<double>::infinity();
        for (const auto& cf : el.trajectory.curvatures) {
            for (double v : sample_field(cf, quantity == TrackQuantity::RiemannNorm
                                                 ? Quantity::RiemannNorm
                                                 : Quantity::Scalar))
                qmax = std::max(qmax, v);
            ric_lo = std::min(ric_lo, cf.ric_inf);
        }
        el.quantity_max = qmax;
        el.ric_lower = ric_lo;

        NormQuery ball_q{Quantity::RiemannNorm, alpha_crit,
                         Region::ball(anchor.node, 1.0, 1.0), 0.0, 1.0};
        const double lp = log_spacetime_power(el.trajectory, ball_q);
        el.critical_ball_integral = lp == kLogZero ? 0.0 : std::exp(lp);

        seq.elements.push_back(std::move(el));
    }
    seq.complete = static_cast<int>(seq.elements.size()) == count;
    return seq;
}

}  // namespace ricci
