#include "doctest.h"

#include "ricci/flow.hpp"
#include "ricci/norms.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace ricci;

namespace {

constexpr double kPi = std::numbers::pi;

MetricState round_profile(int n, int m, double c = 1.0) {
    std::vector<double> psi(m + 1), phi(m + 1, std::sqrt(c));
    for (int j = 0; j <= m; ++j) psi[j] = std::sqrt(c) * std::sin(kPi * j / m);
    return make_warped(n, psi, phi, 0.0);
}

MetricState dumbbell_profile(int m, double pinch = 0.6) {
    std::vector<double> psi(m + 1), phi(m + 1, 1.0);
    for (int j = 0; j <= m; ++j) {
        const double s = std::sin(kPi * j / m);
        psi[j] = s * (1.0 - pinch * s * s);
    }
    return make_warped(3, psi, phi, 0.0);
}

// Scale factor recovered from the volume, V = 2 pi^2 c^{3/2} on S^3.
double fitted_scale(const MetricState& s) {
    return std::pow(total_volume(s) / (2.0 * kPi * kPi), 2.0 / 3.0);
}

double neck_min(const MetricState& s) {
    double v = 1e300;
    for (int j = 1; j < s.segments(); ++j) v = std::min(v, s.psi()[j]);
    return v;
}

}  // namespace

TEST_CASE("exact shrinking-sphere evolution") {
    auto s = evolve_round_sphere(3, 1.0, 0.2);
    CHECK(s.scale() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(curvature(s).R[0] == doctest::Approx(30.0).epsilon(1e-13));

    CHECK(evolve_round_sphere(3, 1.0, 0.0).scale() == doctest::Approx(1.0));
    CHECK(evolve_round_sphere(2, 1.0, 0.25).scale() == doctest::Approx(0.5));

    CHECK_THROWS_AS(evolve_round_sphere(3, 1.0, 0.25), past_singularity_error);
    CHECK_THROWS_AS(evolve_round_sphere(3, 1.0, 0.3), past_singularity_error);
}

TEST_CASE("run_flow on the unit S^3: singularity at T = 1/4") {
    FlowConfig cfg;
    cfg.dt_initial = 1e-3;
    cfg.curvature_ceiling = 1e6;
    cfg.t_max = 10.0;
    auto traj = run_flow(make_round_sphere(3, 1.0, 0.0), cfg);

    CHECK(traj.singular);
    REQUIRE(traj.T_hat.has_value());
    CHECK(std::abs(*traj.T_hat - 0.25) <= 1e-6);

    // Exact path: c(t) = 1 - 4t to machine precision at every snapshot.
    for (int i = 0; i < traj.snapshot_count(); ++i) {
        const double c = traj.states[i].scale();
        CHECK(std::abs(c - (1.0 - 4.0 * traj.time(i))) <= 1e-12);
    }

    // Running curvature max is nondecreasing.
    for (std::size_t i = 1; i < traj.max_curvature_track.size(); ++i)
        CHECK(traj.max_curvature_track[i].value >=
              traj.max_curvature_track[i - 1].value);
}

TEST_CASE("run_flow nonsingular prefix on the unit S^2") {
    FlowConfig cfg;
    cfg.dt_initial = 1e-3;
    cfg.t_max = 0.1;
    auto traj = run_flow(make_round_sphere(2, 1.0, 0.0), cfg);
    CHECK_FALSE(traj.singular);
    CHECK(traj.t_end == doctest::Approx(0.1).epsilon(1e-9));
    for (int i = 0; i < traj.snapshot_count(); ++i) {
        const double t = traj.time(i);
        CHECK(traj.curvatures[i].R[0] ==
              doctest::Approx(2.0 / (1.0 - 2.0 * t)).epsilon(1e-12));
    }
}

TEST_CASE("run_flow degenerate config: ceiling below the initial curvature") {
    FlowConfig cfg;
    cfg.curvature_ceiling = 1.0;  // unit S^3 has |Rm| = 2 sqrt(3) > 1 at t = 0
    auto traj = run_flow(make_round_sphere(3, 1.0, 0.0), cfg);
    CHECK(traj.singular);
    CHECK(traj.snapshot_count() == 1);
    REQUIRE(traj.T_hat.has_value());
    CHECK(*traj.T_hat == doctest::Approx(traj.t_start));
}

TEST_CASE("step_warped basics") {
    auto s = round_profile(3, 64);

    // dt = 0 is the identity.
    auto same = step_warped(s, 0.0);
    CHECK(same.psi() == s.psi());
    CHECK(same.phi() == s.phi());

    // One small step shrinks the fitted scale by about 4 dt (n = 3).
    const double dt = 1e-4;
    auto next = step_warped(s, dt);
    const double drop = fitted_scale(s) - fitted_scale(next);
    CHECK(drop == doctest::Approx(4.0 * dt).epsilon(0.05));

    // Dumbbell necks tighten monotonically over early steps.
    auto d = dumbbell_profile(96);
    double prev = neck_min(d);
    for (int step = 0; step < 20; ++step) {
        d = step_warped(d, 0.5 * warped_stability_dt(d));
        const double now = neck_min(d);
        CHECK(now < prev);
        prev = now;
    }
}

TEST_CASE("warped integrator tracks the exact sphere over half the lifespan") {
    const int m = 256;
    FlowConfig cfg;
    cfg.dt_initial = 1.0;  // stability rule binds
    cfg.safety = 0.5;
    cfg.t_max = 0.125;
    cfg.output_stride = 200;
    auto traj = run_flow(round_profile(3, m), cfg);
    CHECK_FALSE(traj.singular);
    double worst = 0.0;
    for (int i = 0; i < traj.snapshot_count(); ++i) {
        const double c_exact = 1.0 - 4.0 * traj.time(i);
        const double rel = std::abs(fitted_scale(traj.states[i]) - c_exact) / c_exact;
        worst = std::max(worst, rel);
    }
    CHECK(worst <= 1e-4);

    // Every stored state satisfies the invariants.
    for (const auto& s : traj.states) CHECK(s.is_valid());
}

TEST_CASE("scalar evolution residual") {
    // Exact sphere with closely spaced snapshots: residual is central-difference
    // error only (Lap R = 0).
    FlowConfig cfg;
    cfg.dt_initial = 1e-5;
    cfg.t_max = 1e-3;
    auto traj = run_flow(make_round_sphere(3, 1.0, 0.0), cfg);
    REQUIRE(traj.snapshot_count() >= 5);
    const int mid = traj.snapshot_count() / 2;
    auto res = scalar_evolution_residual(traj, mid);
    CHECK(residual_summary(traj.states[mid], res) <= 1e-6);

    // Two identical round states at different times: residual = -2 |Ric|^2.
    FlowTrajectory flat;
    flat.states = {make_round_sphere(3, 1.0, 0.0), make_round_sphere(3, 1.0, 0.1),
                   make_round_sphere(3, 1.0, 0.2)};
    for (auto& s : flat.states) flat.curvatures.push_back(curvature(s));
    flat.t_start = 0.0;
    flat.t_end = 0.2;
    auto fres = scalar_evolution_residual(flat, 1);
    CHECK(fres[0] == doctest::Approx(-2.0 * (4.0 + 2.0 * 4.0)).epsilon(1e-14));  // -24

    CHECK_THROWS_AS(scalar_evolution_residual(traj, 0), out_of_range_error);
}

TEST_CASE("volume evolution residual") {
    FlowConfig cfg;
    cfg.dt_initial = 1e-5;
    cfg.t_max = 1e-3;
    auto traj = run_flow(make_round_sphere(3, 1.0, 0.0), cfg);
    const int mid = traj.snapshot_count() / 2;
    const double rint = slice_integral(traj.states[mid], traj.curvatures[mid].R);
    CHECK(volume_evolution_residual(traj, mid) / std::abs(rint) <= 1e-6);

    // Constant c (equal neighbor states): dV/dt = 0, residual = int R dmu.
    FlowTrajectory flat;
    flat.states = {make_round_sphere(3, 1.0, 0.0), make_round_sphere(3, 1.0, 0.1),
                   make_round_sphere(3, 1.0, 0.2)};
    for (auto& s : flat.states) flat.curvatures.push_back(curvature(s));
    flat.t_start = 0.0;
    flat.t_end = 0.2;
    const double want = slice_integral(flat.states[1], flat.curvatures[1].R);
    CHECK(volume_evolution_residual(flat, 1) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("residual refinement study on warped round profiles") {
    // Scalar and volume residuals drop at order >= 1.8 under m doubling with
    // dt proportional to h^2 (the stability rule provides that coupling).
    std::vector<double> scalar_err, volume_err;
    for (int m : {32, 64, 128}) {
        FlowConfig cfg;
        cfg.dt_initial = 1.0;
        cfg.safety = 0.4;
        cfg.t_max = 0.01;
        cfg.output_stride = 1;
        auto traj = run_flow(round_profile(3, m), cfg);
        const int mid = traj.snapshot_count() / 2;
        scalar_err.push_back(residual_summary(traj.states[mid], scalar_evolution_residual(traj, mid)));
        volume_err.push_back(volume_evolution_residual(traj, mid));
    }
    CHECK(std::log2(scalar_err[0] / scalar_err[1]) >= 1.8);
    CHECK(std::log2(scalar_err[1] / scalar_err[2]) >= 1.8);
    CHECK(std::log2(volume_err[0] / volume_err[1]) >= 1.8);
    CHECK(std::log2(volume_err[1] / volume_err[2]) >= 1.8);
}

TEST_CASE("volume and diameter evolution bounds") {
    // Window with |Ric| <= 2 on S^3 (c in [1, 2]).
    FlowConfig cfg;
    cfg.dt_initial = 2e-3;
    cfg.t_max = 0.25;
    auto traj = run_flow(make_round_sphere(3, 2.0, 0.0), cfg);
    auto rep = volume_diameter_bound_check(traj, 0.0, 0.25, {-2.0, 2.0});
    CHECK(rep.hypothesis_ok);
    CHECK(rep.vol_lower_holds);
    CHECK(rep.vol_upper_holds);
    CHECK(rep.diam_holds);

    // Single-snapshot window at the reference time: equalities.
    auto tiny = volume_diameter_bound_check(traj, rep.t_ref - 1e-9, rep.t_ref, {-2.0, 2.0});
    CHECK(tiny.worst_margin >= -1e-9);

    // A collapsing sphere violates the upper Ricci hypothesis.
    FlowConfig deep;
    deep.dt_initial = 1e-3;
    deep.curvature_ceiling = 1e4;
    auto sing = run_flow(make_round_sphere(3, 1.0, 0.0), deep);
    auto bad = volume_diameter_bound_check(sing, 0.0, sing.t_end, {-2.0, 2.0});
    CHECK_FALSE(bad.hypothesis_ok);

    // Region-restricted variant: a frozen cap obeys the same bounds, and the
    // whole-manifold region reproduces the plain check.
    auto cap = volume_diameter_bound_check(traj, Region::ball(0, 0.5, 0.25), 0.0, 0.25,
                                           {-2.0, 2.0});
    CHECK(cap.hypothesis_ok);
    CHECK(cap.vol_lower_holds);
    CHECK(cap.vol_upper_holds);
    CHECK(cap.diam_holds);
    auto whole = volume_diameter_bound_check(traj, Region::whole(), 0.0, 0.25, {-2.0, 2.0});
    CHECK(whole.worst_margin == doctest::Approx(rep.worst_margin).epsilon(1e-9));
}

TEST_CASE("curvature maximizing sequence") {
    FlowConfig cfg;
    cfg.dt_initial = 1e-3;
    cfg.curvature_ceiling = 1e6;
    auto traj = run_flow(make_round_sphere(3, 1.0, 0.0), cfg);

    auto pts = curvature_maximizing_sequence(traj, 5, TrackQuantity::ScalarCurvature);
    REQUIRE(pts.size() == 5);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double expect = 6.0 / (1.0 - 4.0 * pts[i].t);
        CHECK(pts[i].value == doctest::Approx(expect).epsilon(1e-12));
        if (i > 0) {
            CHECK(pts[i].t > pts[i - 1].t);
            CHECK(pts[i].value >= pts[i - 1].value);
        }
    }
    // Divergence proxy: the last maximum reaches half the ceiling (in R units
    // the sphere has R = sqrt(3) |Rm|).
    CHECK(pts.back().value >= cfg.curvature_ceiling / 2.0);

    auto one = curvature_maximizing_sequence(traj, 1, TrackQuantity::RiemannNorm);
    REQUIRE(one.size() == 1);
    CHECK(one[0].value >= cfg.curvature_ceiling);

    FlowConfig stop;
    stop.t_max = 0.05;
    auto nonsing = run_flow(make_round_sphere(3, 1.0, 0.0), stop);
    CHECK_THROWS_AS(curvature_maximizing_sequence(nonsing, 3, TrackQuantity::ScalarCurvature),
                    not_applicable_error);
}

TEST_CASE("warped round-profile run estimates the maximal time within 1%") {
    FlowConfig cfg;
    cfg.dt_initial = 1.0;
    cfg.safety = 0.5;
    cfg.curvature_ceiling = 2e4;
    cfg.t_max = 10.0;
    cfg.output_stride = 50;
    auto traj = run_flow(round_profile(3, 256), cfg);
    CHECK(traj.singular);
    REQUIRE(traj.T_hat.has_value());
    CHECK(std::abs(*traj.T_hat - 0.25) / 0.25 <= 0.01);
}

TEST_CASE("dumbbell flow concentrates curvature at the neck") {
    FlowConfig cfg;
    cfg.dt_initial = 1.0;
    cfg.safety = 0.4;
    cfg.curvature_ceiling = 400.0;
    cfg.t_max = 1.0;
    cfg.output_stride = 25;
    auto traj = run_flow(dumbbell_profile(128, 0.9), cfg);
    CHECK(traj.singular);
    auto pts = curvature_maximizing_sequence(traj, 3, TrackQuantity::RiemannNorm);
    REQUIRE(!pts.empty());
    // The final maximizer sits near the equatorial neck, not at the poles.
    const int m = 128;
    CHECK(pts.back().node > m / 4);
    CHECK(pts.back().node < 3 * m / 4);
}
