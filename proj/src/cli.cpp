#include "ricci/cli.hpp"

#include "ricci/acceptance.hpp"
#include "ricci/constants.hpp"
#include "ricci/io.hpp"
#include "ricci/norms.hpp"
#include "ricci/rescaling.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

namespace ricci::cli {

namespace fs = std::filesystem;

namespace {

// Wraps a command body with the exit-code policy: configuration and input
// problems exit 2, everything else propagates.
template <typename F>
int guarded(std::ostream& log, F&& body) {
    try {
        return body();
    } catch (const not_applicable_error& e) {
        log << "not applicable: " << e.what() << "\n";
        return kExitOk;
    } catch (const error& e) {
        log << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace

int cmd_simulate(const SimulateConfig& cfg, std::ostream& log) {
    return guarded(log, [&]() {
        if (cfg.out_dir.empty()) {
            log << "error: --out directory is required\n";
            return kExitUsage;
        }
        MetricState initial =
            cfg.c0 ? make_round_sphere(cfg.n, *cfg.c0, 0.0)
                   : io::state_from_profile(cfg.n, io::read_profile(cfg.profile_path), 0.0);
        FlowTrajectory traj = run_flow(initial, cfg.flow);
        io::export_trajectory(traj, cfg.out_dir);
        log << "snapshots " << traj.snapshot_count() << "\n";
        log << "t_end " << io::format_double(traj.t_end) << "\n";
        log << "singular " << (traj.singular ? 1 : 0) << "\n";
        if (traj.T_hat) log << "T_hat " << io::format_double(*traj.T_hat) << "\n";
        if (traj.numerical_blowup) {
            log << "numerical blow-up: partial artifacts written to " << cfg.out_dir
                << "\n";
            return kExitNumerical;
        }
        return kExitOk;
    });
}

int cmd_norms(const NormsConfig& cfg, std::ostream& log) {
    return guarded(log, [&]() {
        FlowTrajectory traj = io::import_trajectory(cfg.traj_dir);
        const Quantity quantity = quantity_from_name(cfg.quantity);

        std::ofstream file;
        std::ostream* os = &log;
        if (!cfg.out_csv.empty()) {
            file.open(cfg.out_csv);
            if (!file) {
                log << "error: cannot write " << cfg.out_csv << "\n";
                return kExitUsage;
            }
            os = &file;
        }

        if (!cfg.eps_seq.empty()) {
            auto rows = alpha_threshold_scan(traj, quantity, cfg.alphas, cfg.eps_seq);
            io::write_scan_csv(*os, rows);
            return kExitOk;
        }

        // Plain per-alpha norms over a fixed interval.
        const double a = cfg.interval ? cfg.interval->first : traj.t_start;
        const double b = cfg.interval ? cfg.interval->second
                                      : traj.time(traj.snapshot_count() - 1);
        *os << "alpha,interval_begin,interval_end,norm\n";
        for (double alpha : cfg.alphas) {
            NormQuery q{quantity, alpha, Region::whole(), a, b};
            *os << (std::isinf(alpha) ? "inf" : io::format_double(alpha)) << ','
                << io::format_double(a) << ',' << io::format_double(b) << ','
                << io::format_double(spacetime_norm(traj, q)) << '\n';
        }
        return kExitOk;
    });
}

int cmd_rescale(const RescaleCmdConfig& cfg, std::ostream& log) {
    return guarded(log, [&]() {
        if (cfg.out_dir.empty()) {
            log << "error: --out directory is required\n";
            return kExitUsage;
        }
        FlowTrajectory traj = io::import_trajectory(cfg.traj_dir);
        fs::create_directories(cfg.out_dir);

        if (cfg.blowup_count > 0) {
            const TrackQuantity tq = cfg.quantity == "Rm" ? TrackQuantity::RiemannNorm
                                                          : TrackQuantity::ScalarCurvature;
            auto seq = blowup_sequence(traj, cfg.blowup_count, tq);
            std::ofstream rep(fs::path(cfg.out_dir) / "blowup_report.txt");
            rep << "# normalized blow-up sequence (" << seq.elements.size()
                << " elements, complete " << (seq.complete ? 1 : 0) << ")\n";
            rep << "# idx anchor_t anchor_node Q normalized_value quantity_max "
                   "ric_lower critical_ball_integral\n";
            for (std::size_t i = 0; i < seq.elements.size(); ++i) {
                const auto& el = seq.elements[i];
                char name[32];
                std::snprintf(name, sizeof(name), "element_%02zu", i);
                io::export_trajectory(el.trajectory, (fs::path(cfg.out_dir) / name).string());
                rep << i << ' ' << io::format_double(el.anchor.t) << ' ' << el.anchor.node
                    << ' ' << io::format_double(el.anchor.value) << ' '
                    << io::format_double(el.normalized_value) << ' '
                    << io::format_double(el.quantity_max) << ' '
                    << io::format_double(el.ric_lower) << ' '
                    << io::format_double(el.critical_ball_integral) << '\n';
            }
            log << "elements " << seq.elements.size() << " complete "
                << (seq.complete ? 1 : 0) << "\n";
            if (!seq.complete)
                log << "warning: fewer usable anchors than requested\n";
            return kExitOk;
        }

        RescaleSpec spec{cfg.Q, cfg.t_center, 0};
        auto scaled = parabolic_rescale(traj, spec, cfg.a, cfg.b);
        io::export_trajectory(scaled, cfg.out_dir);
        auto inv = critical_integral_invariance(traj, spec, cfg.a, cfg.b);
        std::ofstream rep(fs::path(cfg.out_dir) / "rescale_report.txt");
        rep << "# parabolic rescale report\n";
        rep << "Q " << io::format_double(cfg.Q) << "\n";
        rep << "t_center " << io::format_double(cfg.t_center) << "\n";
        rep << "window " << io::format_double(cfg.a) << " " << io::format_double(cfg.b)
            << "\n";
        rep << "critical_integral_before " << io::format_double(inv.before) << "\n";
        rep << "critical_integral_after " << io::format_double(inv.after) << "\n";
        rep << "relative_diff " << io::format_double(inv.relative_diff) << "\n";
        log << "relative_diff " << io::format_double(inv.relative_diff) << "\n";
        return kExitOk;
    });
}

int cmd_constants(const ConstantsCmdConfig& cfg, std::ostream& log) {
    return guarded(log, [&]() {
        if (!(cfg.kappa > 0.0)) {
            log << "error: kappa must be positive\n";
            return kExitUsage;
        }
        const double q = cfg.q > 0.0
                             ? cfg.q
                             : (cfg.n + 2.0) * (cfg.n + 2.0) / (2.0 * cfg.n);
        auto ledger = build_constant_ledger(cfg.n, cfg.kappa, cfg.r, q, cfg.beta, cfg.B);
        io::write_ledger_report(log, ledger);
        if (!cfg.out_path.empty()) {
            std::ofstream out(cfg.out_path);
            if (!out) {
                log << "error: cannot write " << cfg.out_path << "\n";
                return kExitUsage;
            }
            io::write_ledger_report(out, ledger);
        }
        return kExitOk;
    });
}

int cmd_verify(const std::string& suite, unsigned seed, std::ostream& log) {
    if (!acceptance::is_suite(suite)) {
        log << "error: unknown suite '" << suite << "'. Available:";
        for (const auto& s : acceptance::suite_names()) log << ' ' << s;
        log << " all\n";
        return kExitUsage;
    }
    const auto results = acceptance::run_suite(suite, seed);
    int failures = 0;
    for (const auto& r : results) {
        log << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ": " << r.name << "\n";
        log << "       " << r.details << "\n";
        if (!r.pass) ++failures;
    }
    log << results.size() - failures << "/" << results.size() << " criteria passed\n";
    return failures == 0 ? kExitOk : 1;
}

int cmd_report(const std::string& traj_dir, std::ostream& log) {
    return guarded(log, [&]() {
        FlowTrajectory traj = io::import_trajectory(traj_dir);
        log << "trajectory " << traj_dir << "\n";
        log << "  n " << traj.dimension() << ", form "
            << (traj.is_round() ? "sphere" : "warped") << "\n";
        log << "  window [" << io::format_double(traj.t_start) << ", "
            << io::format_double(traj.t_end) << "], snapshots " << traj.snapshot_count()
            << "\n";
        log << "  singular " << (traj.singular ? 1 : 0);
        if (traj.T_hat) log << ", T_hat " << io::format_double(*traj.T_hat);
        log << "\n";
        const auto& track = traj.max_curvature_track.back();
        log << "  max |Rm| " << io::format_double(track.value) << " at t "
            << io::format_double(track.t) << ", node " << track.node << "\n";
        auto verdict = extension_verdict(traj, 0.5 * (traj.dimension() + 2));
        log << "  extension verdict at alpha=(n+2)/2: " << verdict.conclusion
            << " (A = " << io::format_double(verdict.A) << ")\n";
        return kExitOk;
    });
}

}  // namespace ricci::cli
