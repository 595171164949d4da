#include "ricci/acceptance.hpp"

#include "ricci/constants.hpp"
#include "ricci/flow.hpp"
#include "ricci/io.hpp"
#include "ricci/norms.hpp"
#include "ricci/rescaling.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace ricci::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) { return io::format_double(v); }

MetricState round_profile(int n, int m, double c = 1.0) {
    std::vector<double> psi(m + 1), phi(m + 1, std::sqrt(c));
    for (int j = 0; j <= m; ++j) psi[j] = std::sqrt(c) * std::sin(kPi * j / m);
    return make_warped(n, psi, phi, 0.0);
}

FlowTrajectory sphere_run(int n, double ceiling, double dt = 1e-3, double t_max = 10.0) {
    FlowConfig cfg;
    cfg.dt_initial = dt;
    cfg.curvature_ceiling = ceiling;
    cfg.t_max = t_max;
    return run_flow(make_round_sphere(n, 1.0, 0.0), cfg);
}

// 1. Shrinking-sphere exactness.
CriterionResult sphere_exactness() {
    CriterionResult r;
    r.id = "sphere-exactness";
    r.name = "unit S^3: c(t) = 1 - 4t to 1e-12 and T_hat within 1e-6 of 1/4";
    auto traj = sphere_run(3, 1e6);
    double worst_c = 0.0;
    for (int i = 0; i < traj.snapshot_count(); ++i)
        worst_c = std::max(worst_c,
                           std::abs(traj.states[i].scale() - (1.0 - 4.0 * traj.time(i))));
    const double t_err = traj.T_hat ? std::abs(*traj.T_hat - 0.25) : 1.0;
    r.pass = traj.singular && worst_c <= 1e-12 && t_err <= 1e-6;
    r.details = "max |c - (1-4t)| = " + num(worst_c) + ", |T_hat - 0.25| = " + num(t_err);
    return r;
}

// 2. Closed-form critical norm.
CriterionResult sphere_closed_form() {
    CriterionResult r;
    r.id = "sphere-closed-form";
    r.name = "||R||_2 over [0, 1/4 - 1e-6) within 0.5% of 6 pi";
    auto traj = sphere_run(3, 1e8);
    NormQuery q{Quantity::Scalar, 2.0, Region::whole(), 0.0, 0.25 - 1e-6};
    const double norm = spacetime_norm(traj, q);
    const double rel = std::abs(norm - 6.0 * kPi) / (6.0 * kPi);
    r.pass = rel <= 0.005;
    r.details = "norm = " + num(norm) + ", 6 pi = " + num(6.0 * kPi) +
                ", rel err = " + num(rel);
    return r;
}

// 3. Threshold reproduction.
CriterionResult threshold_scan() {
    CriterionResult r;
    r.id = "threshold-scan";
    r.name = "alpha scan on S^3: 2 finite, 5/2 log, 3 power with exponent 1/2";
    auto traj = sphere_run(3, 1e11, 2e-3);
    std::vector<double> eps;
    for (int k = 0; k <= 14; ++k) eps.push_back(1e-2 * std::pow(4.0, -k));
    auto rows = alpha_threshold_scan(traj, Quantity::Scalar, {2.0, 2.5, 3.0}, eps);
    const bool finite_ok = rows[0].classification == Divergence::Finite;
    const bool log_ok = rows[1].classification == Divergence::LogDivergent;
    const bool power_ok = rows[2].classification == Divergence::PowerDivergent;
    const double exp_rel = std::abs(rows[2].exponent - 0.5) / 0.5;
    r.pass = finite_ok && log_ok && power_ok && exp_rel <= 0.05;
    r.details = "alpha=2: " + divergence_name(rows[0].classification) +
                ", alpha=5/2: " + divergence_name(rows[1].classification) +
                ", alpha=3: " + divergence_name(rows[2].classification) +
                " exponent " + num(rows[2].exponent) + " (rel err " + num(exp_rel) + ")";
    return r;
}

// 4. Scale invariance of the critical integral.
CriterionResult scale_invariance() {
    CriterionResult r;
    r.id = "scale-invariance";
    r.name = "int int |Rm|^{5/2} invariant to 1e-10; alpha=2 ratio = Q^{1/2} to 1e-8";
    auto traj = sphere_run(3, 1e8);
    double worst_inv = 0.0, worst_power = 0.0;
    for (double Q : {1e-3, 1e3}) {
        RescaleSpec spec{Q, 0.1, 0};
        auto rep = critical_integral_invariance(traj, spec, 0.0, 0.05 * Q);
        worst_inv = std::max(worst_inv, rep.relative_diff);
        const double ratio = rescaled_power_ratio(traj, spec, 0.0, 0.05 * Q, 2.0);
        worst_power = std::max(worst_power, std::abs(ratio / std::sqrt(Q) - 1.0));
    }
    r.pass = worst_inv <= 1e-10 && worst_power <= 1e-8;
    r.details = "critical rel diff = " + num(worst_inv) +
                ", alpha=2 power mismatch = " + num(worst_power);
    return r;
}

// 5. Evolution identities.
CriterionResult evolution_identities() {
    CriterionResult r;
    r.id = "evolution-identities";
    r.name = "scalar/volume residuals: order >= 1.8 over m in {64,128,256}; "
                      "exact-sphere residuals <= 1e-6";
    std::vector<double> scalar_err, volume_err;
    for (int m : {64, 128, 256}) {
        FlowConfig cfg;
        cfg.dt_initial = 1.0;
        cfg.safety = 0.4;
        cfg.t_max = 0.01;
        cfg.output_stride = 1;
        auto traj = run_flow(round_profile(3, m), cfg);
        const int mid = traj.snapshot_count() / 2;
        scalar_err.push_back(
            residual_summary(traj.states[mid], scalar_evolution_residual(traj, mid)));
        volume_err.push_back(volume_evolution_residual(traj, mid));
    }
    const double so1 = std::log2(scalar_err[0] / scalar_err[1]);
    const double so2 = std::log2(scalar_err[1] / scalar_err[2]);
    const double vo1 = std::log2(volume_err[0] / volume_err[1]);
    const double vo2 = std::log2(volume_err[1] / volume_err[2]);

    FlowConfig exact;
    exact.dt_initial = 1e-5;
    exact.t_max = 1e-3;
    auto sphere = run_flow(make_round_sphere(3, 1.0, 0.0), exact);
    const int mid = sphere.snapshot_count() / 2;
    const double sres =
        residual_summary(sphere.states[mid], scalar_evolution_residual(sphere, mid));
    const double rint = std::abs(slice_integral(sphere.states[mid], sphere.curvatures[mid].R));
    const double vres = volume_evolution_residual(sphere, mid) / rint;

    r.pass = so1 >= 1.8 && so2 >= 1.8 && vo1 >= 1.8 && vo2 >= 1.8 && sres <= 1e-6 &&
             vres <= 1e-6;
    r.details = "scalar orders " + num(so1) + ", " + num(so2) + "; volume orders " +
                num(vo1) + ", " + num(vo2) + "; exact-sphere residuals " + num(sres) +
                " / " + num(vres);
    return r;
}

// 6. Space-form norm relation.
CriterionResult space_form_relation() {
    CriterionResult r;
    r.id = "space-form-relation";
    r.name = "||Rm||_alpha = (1/sqrt 3) ||R||_alpha on S^3 to 1e-8";
    auto traj = sphere_run(3, 1e8);
    double worst = 0.0;
    for (double alpha : {1.0, 2.0, 2.5}) {
        NormQuery qr{Quantity::Scalar, alpha, Region::whole(), 0.0, 0.2};
        NormQuery qm{Quantity::RiemannNorm, alpha, Region::whole(), 0.0, 0.2};
        const double want = riemann_scalar_factor(3) * spacetime_norm(traj, qr);
        const double got = spacetime_norm(traj, qm);
        worst = std::max(worst, std::abs(got - want) / want);
    }
    r.pass = worst <= 1e-8;
    r.details = "worst relative mismatch = " + num(worst);
    return r;
}

// 7. Constant chain.
CriterionResult constant_chain() {
    CriterionResult r;
    r.id = "constant-chain";
    r.name = "C1(2)=pi, C2(2)=2pi; r(kappa) residual <= 1e-12; sigma power law "
                      "to 1e-10; Lambda(2)=12; delta_b recomputed to 1e-12";
    std::ostringstream d;
    bool ok = true;

    const auto croke = croke_constants(2);
    ok = ok && std::abs(croke.C1 - kPi) <= 1e-12 && std::abs(croke.C2 - 2.0 * kPi) <= 1e-12;
    d << "C1(2)-pi = " << num(croke.C1 - kPi) << ", C2(2)-2pi = " << num(croke.C2 - 2.0 * kPi);

    double worst_res = 0.0;
    for (double kappa : {1e-3, 1e-1, 1.0}) {
        const double rr = r_kappa(3, kappa);
        const double target = kappa / (2.0 * sphere_measure(2) * std::exp(12.0));
        worst_res = std::max(worst_res,
                             std::abs(sinh_power_integral(2, rr) - target));
    }
    ok = ok && worst_res <= 1e-12;
    d << "; r(kappa) residual = " << num(worst_res);

    double worst_power = 0.0;
    for (int n : {3, 4, 5}) {
        const double got =
            sobolev_sigma(n, 1e-3).sigma.log() - sobolev_sigma(n, 1e-2).sigma.log();
        const double want = 2.0 * (n + 1) * std::log(10.0);
        worst_power = std::max(worst_power, std::abs(got - want) / want);
    }
    ok = ok && worst_power <= 1e-10;
    d << "; sigma power-law rel err = " << num(worst_power);

    const auto sigma = sobolev_sigma(3, 0.01).sigma;
    const auto mc = moser_constants(3, 4.0, sigma, 0.1, 0.0, 2.0);
    ok = ok && mc.Lambda == 12.0;
    const double want_db = -(std::log(4.0) + 0.6 * sigma.log() + std::log(12.0));
    const double db_err = std::abs(mc.delta_b.log() - want_db);
    ok = ok && db_err <= 1e-12 * std::abs(want_db);
    d << "; Lambda(2) = " << num(mc.Lambda) << "; delta_b log err = " << num(db_err);

    r.pass = ok;
    r.details = d.str();
    return r;
}

// 8. Pointwise Ricci inequality.
CriterionResult ricci_pinch(unsigned seed) {
    CriterionResult r;
    r.id = "ricci-pinch";
    r.name = "10^4 random eigenvalue tuples satisfy |Ric|^2 <= Rhat^2 - 2B Rhat + nB^2";
    std::mt19937 rng(seed == 0 ? 20260808u : seed);
    std::uniform_real_distribution<double> bdist(0.0, 3.0);
    std::uniform_int_distribution<int> ndist(2, 6);
    int failures = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const double B = bdist(rng);
        const int n = ndist(rng);
        std::uniform_real_distribution<double> lam(-B, 10.0);
        std::vector<double> ev(n);
        for (auto& v : ev) v = lam(rng);
        auto rep = rhat_inequality_check(ev, B);
        if (!rep.holds || !rep.hypothesis_ok) ++failures;
    }
    r.pass = failures == 0;
    r.details = "failures = " + std::to_string(failures) + " / 10000";
    return r;
}

// 9. Moser ladder.
CriterionResult moser_ladder() {
    CriterionResult r;
    r.id = "moser-ladder";
    r.name = "measured ||v||_{l^k, D_k} <= bound for k <= 12; l^k norm -> sup within 2%";
    FlowConfig cfg;
    cfg.dt_initial = 5e-3;
    cfg.t_max = 1.0;
    auto traj = run_flow(make_round_sphere(3, 8.0, 0.0), cfg);
    const double kappa = ball_volume_ratio(traj.states.back(), 0, 1.0).volume;
    const auto sigma = sobolev_sigma(3, kappa).sigma;
    MoserProblem prob;
    prob.B = 0.0;
    prob.q = 25.0 / 6.0;
    auto trace = moser_iteration_trace(traj, 0, moser_domains(1.0, 12), prob, sigma);
    const double sup_err =
        std::abs(trace.rungs.back().norm - trace.sup_Dprime) / trace.sup_Dprime;
    r.pass = trace.hypothesis_ok && trace.all_hold && sup_err <= 0.02;
    r.details = std::string("all rungs hold = ") + (trace.all_hold ? "yes" : "no") +
                ", |norm_12 - sup|/sup = " + num(sup_err);
    return r;
}

// 10. Epsilon-regularity.
CriterionResult eps_regularity() {
    CriterionResult r;
    r.id = "eps-regularity";
    r.name = "near-flat window: gate satisfied and sup bound holds; sphere "
                      "blow-up windows: gate correctly fails";
    const int m = 128;
    const double c = 1e80;
    std::vector<double> psi(m + 1), phi(m + 1, std::sqrt(c));
    for (int j = 0; j <= m; ++j) psi[j] = std::sqrt(c) * std::sin(kPi * j / m);
    FlowConfig cfg;
    cfg.dt_initial = 2e-2;
    cfg.t_max = 1.0;
    cfg.output_stride = 2;
    auto flat = run_flow(make_warped(3, psi, phi, 0.0), cfg);
    auto flat_rep = epsilon_regularity_check(flat, 0, 0.0);

    auto traj = sphere_run(3, 1e8);
    auto seq = blowup_sequence(traj, 3, TrackQuantity::ScalarCurvature);
    bool gates_fail = !seq.elements.empty();
    for (const auto& el : seq.elements) {
        auto rep = epsilon_regularity_check(el.trajectory, el.anchor.node, 0.0);
        bool gate = false;
        for (const auto& reason : rep.reasons) gate |= reason == "gate";
        gates_fail = gates_fail && !rep.applicable && gate;
    }
    r.pass = flat_rep.applicable && flat_rep.holds && gates_fail;
    r.details = std::string("near-flat applicable = ") +
                (flat_rep.applicable ? "yes" : "no") + ", holds = " +
                (flat_rep.holds ? "yes" : "no") + ", sphere windows gate-fail = " +
                (gates_fail ? "yes" : "no");
    return r;
}

// 11. Hamilton-Ivey monitor.
CriterionResult hamilton_ivey() {
    CriterionResult r;
    r.id = "hamilton-ivey";
    r.name = "pinching inequality holds at every sample of the normalized S^3 flow";
    FlowConfig cfg;
    cfg.dt_initial = 1e-3;
    cfg.curvature_ceiling = 1e4;
    cfg.t_max = 10.0;
    auto traj = run_flow(make_round_sphere(3, 1.0, 0.0), cfg);
    auto rep = hamilton_ivey_check(traj);
    r.pass = rep.all_hold;
    r.details = "samples checked = " + std::to_string(rep.checked_samples) +
                std::string(", all hold = ") + (rep.all_hold ? "yes" : "no");
    return r;
}

// 12. Non-collapsing measurement.
CriterionResult non_collapsing() {
    CriterionResult r;
    r.id = "non-collapsing";
    r.name = "Vol(B(p,0.05))/0.05^3 within 2% of 4pi/3; blow-up kappa bounded below";
    auto ball = ball_volume_ratio(make_round_sphere(3, 1.0, 0.0), 0, 0.05);
    const double rel = std::abs(ball.ratio - 4.0 * kPi / 3.0) / (4.0 * kPi / 3.0);

    auto traj = sphere_run(3, 1e8);
    auto seq = blowup_sequence(traj, 4, TrackQuantity::ScalarCurvature);
    double kappa_min = std::numeric_limits<double>::infinity();
    for (const auto& el : seq.elements) {
        const double k =
            ball_volume_ratio(el.trajectory.states.back(), el.anchor.node, 1.0).ratio;
        kappa_min = std::min(kappa_min, k);
    }
    r.pass = rel <= 0.02 && !seq.elements.empty() && kappa_min >= 1.0;
    r.details = "small-ball rel err = " + num(rel) +
                ", min kappa over the sequence = " + num(kappa_min);
    return r;
}

// 13. Extension-verdict consistency over the singular suite.
CriterionResult extension_consistency() {
    CriterionResult r;
    r.id = "extension-consistency";
    r.name = "every singular trajectory fails a hypothesis of each extension theorem";
    std::vector<FlowTrajectory> suite;
    suite.push_back(sphere_run(3, 1e8));
    suite.push_back(sphere_run(2, 1e8));
    {
        FlowConfig cfg;
        cfg.dt_initial = 1.0;
        cfg.safety = 0.5;
        cfg.curvature_ceiling = 2e4;
        cfg.t_max = 10.0;
        cfg.output_stride = 50;
        suite.push_back(run_flow(round_profile(3, 128), cfg));
    }
    bool ok = true;
    std::ostringstream d;
    for (const auto& traj : suite) {
        const double alpha_crit = 0.5 * (traj.dimension() + 2);
        for (double alpha : {alpha_crit, 2.0}) {
            auto v = extension_verdict(traj, alpha);
            ok = ok && traj.singular && v.consistent;
            d << "[n=" << traj.dimension() << " a=" << num(alpha) << ": " << v.conclusion
              << "] ";
        }
    }
    r.pass = ok;
    r.details = d.str();
    return r;
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"sphere-exactness", "sphere-closed-form", "threshold-scan",
            "scale-invariance", "evolution-identities", "space-form-relation",
            "constant-chain", "ricci-pinch", "moser-ladder", "eps-regularity",
            "hamilton-ivey", "non-collapsing", "extension-consistency"};
}

bool is_suite(const std::string& name) {
    if (name == "all") return true;
    for (const auto& s : suite_names())
        if (s == name) return true;
    return false;
}

std::vector<CriterionResult> run_suite(const std::string& name, unsigned seed) {
    std::vector<CriterionResult> out;
    auto want = [&](const std::string& id) { return name == "all" || name == id; };
    if (want("sphere-exactness")) out.push_back(sphere_exactness());
    if (want("sphere-closed-form")) out.push_back(sphere_closed_form());
    if (want("threshold-scan")) out.push_back(threshold_scan());
    if (want("scale-invariance")) out.push_back(scale_invariance());
    if (want("evolution-identities")) out.push_back(evolution_identities());
    if (want("space-form-relation")) out.push_back(space_form_relation());
    if (want("constant-chain")) out.push_back(constant_chain());
    if (want("ricci-pinch")) out.push_back(ricci_pinch(seed));
    if (want("moser-ladder")) out.push_back(moser_ladder());
    if (want("eps-regularity")) out.push_back(eps_regularity());
    if (want("hamilton-ivey")) out.push_back(hamilton_ivey());
    if (want("non-collapsing")) out.push_back(non_collapsing());
    if (want("extension-consistency")) out.push_back(extension_consistency());
    return out;
}

}  // namespace ricci::acceptance
