#include "doctest.h"

#include "ricci/rescaling.hpp"

#include <cmath>
#include <numbers>

using namespace ricci;

namespace {

constexpr double kPi = std::numbers::pi;

FlowTrajectory sphere_run(double ceiling = 1e8, double t_max = 10.0) {
    FlowConfig cfg;
    cfg.dt_initial = 1e-3;
    cfg.curvature_ceiling = ceiling;
    cfg.t_max = t_max;
    return run_flow(make_round_sphere(3, 1.0, 0.0), cfg);
}

FlowTrajectory warped_run(int m, double t_max) {
    std::vector<double> psi(m + 1), phi(m + 1, 1.0);
    for (int j = 0; j <= m; ++j) psi[j] = std::sin(kPi * j / m);
    FlowConfig cfg;
    cfg.dt_initial = 1.0;
    cfg.safety = 0.5;
    cfg.t_max = t_max;
    cfg.output_stride = 10;
    return run_flow(make_warped(3, psi, phi, 0.0), cfg);
}

}  // namespace

TEST_CASE("identity rescale") {
    auto traj = sphere_run(1e6, 0.2);
    RescaleSpec id{1.0, 0.0, 0};
    auto same = parabolic_rescale(traj, id, traj.t_start, traj.t_end);
    // Times map one-to-one, scale factors agree to machine precision.
    for (int i = 0; i < same.snapshot_count(); ++i) {
        const double c_exact = 1.0 - 4.0 * same.time(i);
        CHECK(same.states[i].scale() == doctest::Approx(c_exact).epsilon(1e-13));
    }
}

TEST_CASE("rescale normalizes curvature and scales lengths") {
    auto traj = sphere_run();
    const double t_i = 0.2;
    const double Q = 6.0 / (1.0 - 4.0 * t_i);  // R(t_i)

    // Window [-1, 0] anchored so that rescaled time 0 maps to t_i.
    auto scaled = parabolic_rescale(traj, {Q, t_i, 0}, -1.0, 0.0);
    const auto& cf = scaled.curvatures.back();
    CHECK(cf.R[0] == doctest::Approx(1.0).epsilon(1e-10));

    // Lengths multiply by sqrt(Q).
    const int i_src = traj.index_at_or_before(t_i);
    const double d_src = diameter(traj.states[i_src]);
    CHECK(diameter(scaled.states.back()) == doctest::Approx(std::sqrt(Q) * d_src).epsilon(1e-6));

    // R * diam^2 is scale-free, checked per snapshot.
    for (int i = 0; i < scaled.snapshot_count(); ++i) {
        const double t_source = scaled.time(i) / Q + t_i;
        const double c_source = 1.0 - 4.0 * t_source;
        const double product_src = (6.0 / c_source) * std::pow(kPi * std::sqrt(c_source), 2);
        const double d = diameter(scaled.states[i]);
        CHECK(scaled.curvatures[i].R[0] * d * d ==
              doctest::Approx(product_src).epsilon(1e-9));
    }
}

TEST_CASE("inverse composition returns the original trajectory") {
    auto traj = sphere_run(1e6, 0.2);
    RescaleSpec spec{50.0, 0.05, 0};
    auto fwd = parabolic_rescale(traj, spec, 0.0, 5.0);
    auto back = parabolic_rescale(fwd, spec.inverse(), 0.05, 0.14);
    for (int i = 0; i < back.snapshot_count(); ++i) {
        const double c_exact = 1.0 - 4.0 * back.time(i);
        CHECK(std::abs(back.states[i].scale() - c_exact) <= 1e-10);
    }

    // Warped: interpolation-limited tolerance.
    auto wtraj = warped_run(64, 0.05);
    RescaleSpec wspec{10.0, 0.01, 0};
    auto wfwd = parabolic_rescale(wtraj, wspec, 0.0, 0.3);
    auto wback = parabolic_rescale(wfwd, wspec.inverse(), 0.012, 0.04);
    for (int i = 0; i < wback.snapshot_count(); ++i) {
        const auto src = traj.index_at_or_before(wback.time(i));
        (void)src;
        const MetricState& got = wback.states[i];
        // Compare against a direct interpolation of the source run.
        auto direct = parabolic_rescale(wtraj, {1.0, 0.0, 0}, 0.012, 0.04);
        const MetricState& want = direct.states[direct.index_at_or_before(got.time())];
        if (std::abs(want.time() - got.time()) < 1e-12) {
            for (int j = 0; j <= got.segments(); ++j)
                CHECK(got.psi()[j] == doctest::Approx(want.psi()[j]).epsilon(1e-6));
        }
    }
}

TEST_CASE("critical integral is scale invariant; other exponents are not") {
    auto traj = sphere_run();

    for (double Q : {1e-3, 1.0, 1e3}) {
        RescaleSpec spec{Q, 0.1, 0};
        auto rep = critical_integral_invariance(traj, spec, 0.0, 0.05 * Q);
        CHECK(rep.relative_diff <= 1e-10);
        CHECK(rep.before > 0.0);
    }

    // alpha = 2, n = 3: ratio must equal Q^{(n+2)/2 - alpha} = Q^{1/2}.
    for (double Q : {1e-3, 1e3}) {
        RescaleSpec spec{Q, 0.1, 0};
        const double ratio = rescaled_power_ratio(traj, spec, 0.0, 0.05 * Q, 2.0);
        CHECK(std::abs(ratio / std::pow(Q, 0.5) - 1.0) <= 1e-8);
    }

    // Warped numeric flow, Q = 10: interpolation-limited.
    auto wtraj = warped_run(128, 0.06);
    RescaleSpec wspec{10.0, 0.01, 0};
    auto wrep = critical_integral_invariance(wtraj, wspec, 0.0, 0.4);
    CHECK(wrep.relative_diff <= 1e-6);
}

TEST_CASE("blow-up sequence on the shrinking sphere") {
    auto traj = sphere_run(1e8);
    auto seq = blowup_sequence(traj, 5, TrackQuantity::ScalarCurvature);
    CHECK(seq.complete);
    REQUIRE(seq.elements.size() == 5);

    double prev_Q = 0.0;
    for (const auto& el : seq.elements) {
        // Every element is a round shrinking sphere with R(anchor, 1) = 1.
        CHECK(el.normalized_value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(el.quantity_max <= 1.0 + 1e-9);
        CHECK(el.anchor.value > prev_Q);
        prev_Q = el.anchor.value;
        // Ric >= 0 on the sphere, so the rescaled lower bound stays >= 0.
        CHECK(el.ric_lower >= -1e-12);
        CHECK(el.trajectory.snapshot_count() >= 2);
        // The anchored critical ball integral never exceeds the whole-manifold
        // window integral (the region-monotonicity step of the blow-up bound).
        NormQuery whole{Quantity::RiemannNorm, 2.5, Region::whole(), 0.0, 1.0};
        const double whole_val = std::pow(spacetime_norm(el.trajectory, whole), 2.5);
        CHECK(el.critical_ball_integral <= whole_val * (1.0 + 1e-9));
    }

    // On the sphere the critical norm is NOT finite, so the windowed
    // integrals stay bounded away from zero along the sequence.
    for (const auto& el : seq.elements)
        CHECK(el.critical_ball_integral >= 0.1 * seq.elements.front().critical_ball_integral);

    auto one = blowup_sequence(traj, 1, TrackQuantity::RiemannNorm);
    CHECK(one.elements.size() == 1);
    CHECK(one.elements[0].normalized_value == doctest::Approx(1.0).epsilon(1e-9));
    // A single-element request picks the latest usable anchor.
    CHECK(one.elements[0].anchor.t >= seq.elements.back().anchor.t);
}

TEST_CASE("neckpinch pipeline: warped blow-up elements normalize at the neck") {
    // Thin-neck dumbbell run to a deep curvature ceiling; the running
    // maximum concentrates at the neck and the rescaled elements carry
    // R = 1 there at the window end.
    const int m = 128;
    std::vector<double> psi(m + 1), phi(m + 1, 1.0);
    for (int j = 0; j <= m; ++j) {
        const double s = std::sin(kPi * j / m);
        psi[j] = s * (1.0 - 0.9 * s * s);
    }
    FlowConfig cfg;
    cfg.dt_initial = 1.0;
    cfg.safety = 0.4;
    cfg.curvature_ceiling = 2000.0;
    cfg.t_max = 1.0;
    cfg.output_stride = 40;
    auto traj = run_flow(make_warped(3, psi, phi, 0.0), cfg);
    REQUIRE(traj.singular);

    auto seq = blowup_sequence(traj, 3, TrackQuantity::ScalarCurvature);
    REQUIRE(!seq.elements.empty());
    for (const auto& el : seq.elements) {
        // Anchor sits near the equatorial neck.
        CHECK(el.anchor.node > m / 4);
        CHECK(el.anchor.node < 3 * m / 4);
        // Normalization: anchor value 1 at the window end, max below 1 up to
        // snapshot-interpolation error.
        CHECK(el.normalized_value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(el.quantity_max <= 1.0 + 1e-2);
        CHECK(el.critical_ball_integral > 0.0);
    }
}

TEST_CASE("blow-up sequence reports incompleteness for early anchors") {
    // A run stopped just after start: anchors near t=0 have 1/Q windows that
    // escape the span when Q is small.
    FlowConfig cfg;
    cfg.dt_initial = 1e-4;
    cfg.curvature_ceiling = 3.47;  // barely above the initial max |Rm|
    cfg.t_max = 10.0;
    auto traj = run_flow(make_round_sphere(3, 1.0, 0.0), cfg);
    CHECK(traj.singular);
    auto seq = blowup_sequence(traj, 4, TrackQuantity::RiemannNorm);
    CHECK_FALSE(seq.complete);  // Q ~ 3.5 needs t^i >= 1/Q ~ 0.29 > T
    CHECK(seq.elements.empty());
}
