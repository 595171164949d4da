#include "doctest.h"

#include "ricci/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace ricci;

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

// Constant-sectional-curvature Riemann tensor R_ijkl = K (d_ik d_jl - d_il d_jk)
// contracted by brute force. Answers: R = n(n-1)K, Ric = (n-1)K, |Rm|^2.
struct SpaceFormOracle {
    double scalar = 0.0;
    double ricci_eig = 0.0;
    double rm_norm = 0.0;
};

SpaceFormOracle contract_space_form(int n, double K) {
    auto riem = [&](int i, int j, int k, int l) {
        const double dik = i == k ? 1.0 : 0.0;
        const double djl = j == l ? 1.0 : 0.0;
        const double dil = i == l ? 1.0 : 0.0;
        const double djk = j == k ? 1.0 : 0.0;
        return K * (dik * djl - dil * djk);
    };
    SpaceFormOracle o;
    double rm2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) rm2 += riem(i, j, k, l) * riem(i, j, k, l);
    o.rm_norm = std::sqrt(rm2);
    double ric = 0.0;
    for (int k = 0; k < n; ++k) ric += riem(k, 0, k, 0);  // Ric_00
    o.ricci_eig = ric;
    double scal = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) scal += riem(k, i, k, i);
    o.scalar = scal;
    return o;
}

// Unit-sphere measure by the recursion alpha(k) = 2 pi alpha(k-2) / (k-1).
double sphere_measure_oracle(int k) {
    if (k == 1) return 2.0 * kPi;
    if (k == 2) return 4.0 * kPi;
    return 2.0 * kPi * sphere_measure_oracle(k - 2) / (k - 1);
}

MetricState round_warped_profile(int n, int m, double c = 1.0) {
    std::vector<double> psi(m + 1), phi(m + 1, std::sqrt(c));
    for (int j = 0; j <= m; ++j) psi[j] = std::sqrt(c) * std::sin(kPi * j / m);
    return make_warped(n, psi, phi, 0.0);
}

double max_abs_diff(const std::vector<double>& a, double ref) {
    double e = 0.0;
    for (double v : a) e = std::max(e, std::abs(v - ref));
    return e;
}

}  // namespace

TEST_CASE("round sphere states and their curvature") {
    auto s = make_round_sphere(3, 1.0, 0.0);
    auto cf = curvature(s);
    const auto oracle = contract_space_form(3, 1.0);
    CHECK(cf.R[0] == doctest::Approx(oracle.scalar).epsilon(1e-14));        // 6
    CHECK(cf.ric_radial[0] == doctest::Approx(oracle.ricci_eig).epsilon(1e-14));
    CHECK(cf.ric_sphere[0] == doctest::Approx(oracle.ricci_eig).epsilon(1e-14));
    CHECK(cf.rm_norm[0] == doctest::Approx(oracle.rm_norm).epsilon(1e-14));  // 2 sqrt(3)
    CHECK(cf.rm_norm[0] == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-14));
    CHECK(cf.nu_min[0] == doctest::Approx(1.0));

    CHECK(curvature(make_round_sphere(3, 0.5, 0.7)).R[0] == doctest::Approx(12.0));
    CHECK(curvature(make_round_sphere(2, 1.0, 0.0)).R[0] == doctest::Approx(2.0));

    // Example 2.1 route: c = 1 - 4t at t = 3/16 gives R = n/(2(T-t)), T = 1/4.
    const double t = 3.0 / 16.0;
    auto late = make_round_sphere(3, 1.0 - 4.0 * t, t);
    CHECK(curvature(late).R[0] == doctest::Approx(3.0 / (2.0 * (0.25 - t))).epsilon(1e-14));
    CHECK(curvature(late).R[0] == doctest::Approx(24.0).epsilon(1e-14));

    CHECK_THROWS_AS(make_round_sphere(3, -1.0, 0.0), invalid_parameter_error);
    CHECK_THROWS_AS(make_round_sphere(3, 0.0, 0.0), invalid_parameter_error);
    CHECK_THROWS_AS(make_round_sphere(1, 1.0, 0.0), invalid_parameter_error);
}

TEST_CASE("riemann scalar factor across dimensions") {
    for (int n : {2, 3, 4, 6}) {
        const auto oracle = contract_space_form(n, 1.7);
        CHECK(riemann_scalar_factor(n) ==
              doctest::Approx(oracle.rm_norm / oracle.scalar).epsilon(1e-14));
    }
    CHECK(riemann_scalar_factor(3) == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(riemann_scalar_factor(2) == doctest::Approx(1.0));
    CHECK(riemann_scalar_factor(4) == doctest::Approx(std::sqrt(1.0 / 6.0)));
}

TEST_CASE("warped profile validation") {
    const int m = 64;
    CHECK_NOTHROW(round_warped_profile(3, m));

    // Dumbbell-like profile stays valid.
    std::vector<double> psi(m + 1), phi(m + 1, 1.0);
    for (int j = 0; j <= m; ++j) {
        const double x = kPi * j / m;
        psi[j] = std::sin(x) * (1.0 - 0.3 * std::sin(x) * std::sin(x));
    }
    CHECK_NOTHROW(make_warped(3, psi, phi, 0.0));

    // Interior sign violation.
    auto bad = psi;
    bad[m / 2] = -0.1;
    CHECK_THROWS_AS(make_warped(3, bad, phi, 0.0), invalid_profile_error);

    // Pole regularity violation: psi ~ sin(2x)/2 has slope 1 at x=0 but the
    // profile collapses mid-interval; use a scaled sin that breaks |psi_s|=1.
    std::vector<double> flat(m + 1);
    for (int j = 0; j <= m; ++j) flat[j] = 0.5 * std::sin(kPi * j / m);
    CHECK_THROWS_AS(make_warped(3, flat, phi, 0.0), invalid_profile_error);

    // phi must be positive.
    auto zphi = phi;
    zphi[3] = 0.0;
    CHECK_THROWS_AS(make_warped(3, psi, zphi, 0.0), invalid_profile_error);
}

TEST_CASE("warped round profile reproduces round curvature, order >= 1.8") {
    // Grid refinement study on psi = sin x, phi = 1, n = 3.
    std::vector<double> errs;
    for (int m : {32, 64, 128}) {
        auto cf = curvature(round_warped_profile(3, m));
        double e = 0.0;
        e = std::max(e, max_abs_diff(cf.R, 6.0));
        e = std::max(e, max_abs_diff(cf.ric_radial, 2.0));
        e = std::max(e, max_abs_diff(cf.ric_sphere, 2.0));
        e = std::max(e, max_abs_diff(cf.rm_norm, 2.0 * std::sqrt(3.0)));
        errs.push_back(e);
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 >= 1.8);
    CHECK(order2 >= 1.8);

    // Identity R = ric_radial + (n-1) ric_sphere holds exactly at all samples.
    auto cf = curvature(round_warped_profile(3, 48));
    for (int j = 0; j < cf.samples(); ++j)
        CHECK(cf.R[j] == doctest::Approx(cf.ric_radial[j] + 2.0 * cf.ric_sphere[j])
                             .epsilon(1e-15));

    CHECK_THROWS_AS(curvature(round_warped_profile(3, 6)), resolution_error);
}

TEST_CASE("curvature identity holds on dumbbell profiles too") {
    // phi(pole) = 1.1 at both ends, so psi is scaled to keep |d psi/ds| = 1.
    const int m = 96;
    std::vector<double> psi(m + 1), phi(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double x = kPi * j / m;
        psi[j] = 1.1 * std::sin(x) * (1.0 - 0.3 * std::sin(x) * std::sin(x));
        phi[j] = 1.0 + 0.1 * std::cos(2.0 * x);
    }
    auto state = make_warped(4, psi, phi, 0.0);
    auto cf = curvature(state);
    for (int j = 0; j < cf.samples(); ++j) {
        CHECK(cf.R[j] ==
              doctest::Approx(cf.ric_radial[j] + 3.0 * cf.ric_sphere[j]).epsilon(1e-13));
        CHECK(cf.rm_norm[j] >= 0.0);
    }
    CHECK(cf.ric_inf <= cf.ric_radial[m / 2]);
}

TEST_CASE("total volume") {
    CHECK(total_volume(make_round_sphere(3, 1.0, 0.0)) ==
          doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
    CHECK(total_volume(make_round_sphere(3, 0.25, 0.0)) ==
          doctest::Approx(kPi * kPi / 4.0).epsilon(1e-14));
    for (int k : {1, 2, 3, 4, 5})
        CHECK(sphere_measure(k) == doctest::Approx(sphere_measure_oracle(k)).epsilon(1e-13));

    // Warped round profile converges to 2 pi^2.
    CHECK(total_volume(round_warped_profile(3, 128)) ==
          doctest::Approx(2.0 * kPi * kPi).epsilon(1e-6));
}

TEST_CASE("ball volume ratios") {
    auto s3 = make_round_sphere(3, 1.0, 0.0);

    // Small-radius limit: Euclidean ball constant 4 pi / 3.
    auto rep = ball_volume_ratio(s3, 0, 0.05);
    CHECK(rep.ratio == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.02));

    // Full sphere.
    auto full = ball_volume_ratio(s3, 0, kPi);
    CHECK(full.volume == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
    CHECK(full.ratio == doctest::Approx(2.0 * kPi * kPi / std::pow(kPi, 3)).epsilon(1e-12));
    CHECK(full.clamped);

    // Collapsing limit (pi sqrt(c) < r, ball clamps to the whole manifold):
    // ratio -> 2 pi^2 c^{3/2} / r^3 -> 0.
    const double r = 0.3;
    for (double c : {5e-3, 1e-4, 1e-6}) {
        auto rc = ball_volume_ratio(make_round_sphere(3, c, 0.0), 0, r);
        CHECK(rc.ratio ==
              doctest::Approx(2.0 * kPi * kPi * std::pow(c, 1.5) / std::pow(r, 3))
                  .epsilon(1e-10));
    }

    // Pole-centered warped ball agrees with the round closed form.
    auto w = round_warped_profile(3, 256);
    auto wrep = ball_volume_ratio(w, 0, 0.8);
    CHECK(wrep.volume == doctest::Approx(round_ball_volume(3, 1.0, 0.8)).epsilon(1e-4));

    // total_volume and ball_volume_ratio agree once r >= diameter.
    auto wfull = ball_volume_ratio(w, 0, 4.0);
    CHECK(wfull.clamped);
    CHECK(wfull.volume == doctest::Approx(total_volume(w)).epsilon(1e-14));
}

TEST_CASE("diameter") {
    CHECK(diameter(make_round_sphere(3, 1.0, 0.0)) == doctest::Approx(kPi));
    CHECK(diameter(make_round_sphere(3, 0.25, 0.0)) == doctest::Approx(kPi / 2.0));
    auto w = round_warped_profile(3, 64);
    CHECK(diameter(w) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(diameter_report(w).exact);
}

TEST_CASE("pointwise |Ric|^2 inequality (eq. of the Rhat chain)") {
    auto rep = rhat_inequality_check({2.0, 2.0, 2.0}, 0.0);
    CHECK(rep.lhs == doctest::Approx(12.0));
    CHECK(rep.rhs == doctest::Approx(36.0));
    CHECK(rep.holds);
    CHECK(rep.hypothesis_ok);

    // Boundary case lambda_i = -B: equality with Rhat = 0.
    const double B = 0.8;
    auto eq = rhat_inequality_check({-B, -B, -B, -B}, B);
    CHECK(eq.lhs == doctest::Approx(4.0 * B * B));
    CHECK(eq.rhs == doctest::Approx(4.0 * B * B));
    CHECK(eq.holds);

    // Hypothesis violation is reported, not thrown.
    auto bad = rhat_inequality_check({-2.0, 1.0}, 1.0);
    CHECK_FALSE(bad.hypothesis_ok);

    // Property: random admissible tuples always satisfy the bound.
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> bdist(0.0, 3.0);
    std::uniform_int_distribution<int> ndist(2, 6);
    int failures = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const double b = bdist(rng);
        const int n = ndist(rng);
        std::uniform_real_distribution<double> lam(-b, 10.0);
        std::vector<double> ev(n);
        for (auto& v : ev) v = lam(rng);
        auto r = rhat_inequality_check(ev, b);
        if (!r.holds || !r.hypothesis_ok) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("laplacian and slice integrals on warped states") {
    const int m = 128;
    auto w = round_warped_profile(3, m);

    // f = R is constant on the round profile: Delta f ~ 0 away from the
    // poles. Differencing a sampled curvature field is not second-order at
    // the pole-adjacent nodes, so those are excluded here.
    auto cf = curvature(w);
    auto lap = laplacian(w, cf.R);
    for (int j = 0; j <= m; ++j) {
        const double x = kPi * j / m;
        if (x < 0.15 || x > kPi - 0.15) continue;
        CHECK(std::abs(lap[j]) <= 1e-3);
    }

    // f = cos x on the unit round profile: Delta f = -n f (spherical harmonic).
    std::vector<double> f(m + 1);
    for (int j = 0; j <= m; ++j) f[j] = std::cos(kPi * j / m);
    auto lf = laplacian(w, f);
    double err = 0.0;
    for (int j = 0; j <= m; ++j) err = std::max(err, std::abs(lf[j] + 3.0 * f[j]));
    CHECK(err <= 5e-3);

    // Signed slice integral of the constant 1 recovers the volume.
    std::vector<double> ones(m + 1, 1.0);
    CHECK(slice_integral(w, ones) == doctest::Approx(total_volume(w)).epsilon(1e-13));
}
