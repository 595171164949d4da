#include "CLI11.hpp"

#include "ricci/cli.hpp"

#include <iostream>
#include <limits>

int main(int argc, char** argv) {
    using namespace ricci;

    CLI::App app{"Numerical laboratory for closed Ricci flow on symmetry-reduced "
                 "geometries"};
    app.require_subcommand(1);

    // simulate -------------------------------------------------------------
    cli::SimulateConfig sim_cfg;
    double c0 = 0.0;
    auto* sim = app.add_subcommand("simulate", "integrate a flow and export snapshots");
    sim->add_option("--n", sim_cfg.n, "dimension (>= 2)");
    auto* c0_opt = sim->add_option("--c0", c0, "round-sphere scale factor");
    sim->add_option("--profile", sim_cfg.profile_path,
                    "warped profile file (x psi [phi] per line)");
    sim->add_option("--dt", sim_cfg.flow.dt_initial, "initial time step");
    sim->add_option("--safety", sim_cfg.flow.safety, "stability safety factor in (0,1]");
    sim->add_option("--ceiling", sim_cfg.flow.curvature_ceiling,
                    "max |Rm| singularity threshold");
    sim->add_option("--t-max", sim_cfg.flow.t_max, "stop time");
    sim->add_option("--stride", sim_cfg.flow.output_stride, "steps between snapshots");
    sim->add_option("--out", sim_cfg.out_dir, "output directory")->required();

    // norms ------------------------------------------------------------------
    cli::NormsConfig norm_cfg;
    std::vector<double> interval;
    auto* norms = app.add_subcommand("norms", "space-time norms and divergence scans");
    norms->add_option("--traj", norm_cfg.traj_dir, "trajectory directory")->required();
    norms->add_option("--quantity", norm_cfg.quantity, "R, absR, R+, R-, Rm, Ric");
    norms->add_option("--alpha", norm_cfg.alphas, "norm exponents (inf for sup)");
    norms->add_option("--eps-seq", norm_cfg.eps_seq,
                      "decreasing epsilon ladder (enables the scan)");
    norms->add_option("--interval", interval, "fixed interval a b for plain norms")
        ->expected(2);
    norms->add_option("--out", norm_cfg.out_csv, "CSV output path (default stdout)");

    // rescale ----------------------------------------------------------------
    cli::RescaleCmdConfig rs_cfg;
    std::vector<double> window;
    auto* rescale = app.add_subcommand("rescale",
                                       "parabolic rescaling and blow-up sequences");
    rescale->add_option("--traj", rs_cfg.traj_dir, "trajectory directory")->required();
    rescale->add_option("--Q", rs_cfg.Q, "curvature scale factor");
    rescale->add_option("--t-center", rs_cfg.t_center, "source-time anchor");
    rescale->add_option("--window", window, "rescaled window a b")->expected(2);
    rescale->add_option("--blowup", rs_cfg.blowup_count,
                        "build a normalized blow-up sequence of this many elements");
    rescale->add_option("--quantity", rs_cfg.quantity, "anchor quantity: R or Rm");
    rescale->add_option("--out", rs_cfg.out_dir, "output directory")->required();

    // constants ----------------------------------------------------------------
    cli::ConstantsCmdConfig k_cfg;
    auto* consts = app.add_subcommand("constants", "analytic constant ledger");
    consts->add_option("--n", k_cfg.n, "dimension (>= 3)");
    consts->add_option("--kappa", k_cfg.kappa, "non-collapsing constant");
    consts->add_option("--r", k_cfg.r, "Moser base radius");
    consts->add_option("--q", k_cfg.q, "integrability exponent (default (n+2)^2/(2n))");
    consts->add_option("--beta", k_cfg.beta, "iteration exponent (> 1)");
    consts->add_option("--B", k_cfg.B, "Ricci lower-bound magnitude");
    consts->add_option("--out", k_cfg.out_path, "report file (also printed)");

    // verify -------------------------------------------------------------------
    std::string suite = "all";
    unsigned seed = 0;
    auto* verify = app.add_subcommand("verify", "run acceptance criteria");
    verify->add_option("--suite", suite, "criterion id or 'all'");
    verify->add_option("--seed", seed, "seed for randomized property checks");

    // report -------------------------------------------------------------------
    std::string report_dir;
    auto* report = app.add_subcommand("report", "summarize a trajectory directory");
    report->add_option("--traj", report_dir, "trajectory directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitUsage;
    }

    if (sim->parsed()) {
        if (c0_opt->count() > 0) sim_cfg.c0 = c0;
        if (!sim_cfg.c0 && sim_cfg.profile_path.empty()) {
            std::cerr << "error: simulate needs --c0 or --profile\n";
            return cli::kExitUsage;
        }
        return cli::cmd_simulate(sim_cfg, std::cout);
    }
    if (norms->parsed()) {
        if (interval.size() == 2) norm_cfg.interval = {interval[0], interval[1]};
        return cli::cmd_norms(norm_cfg, std::cout);
    }
    if (rescale->parsed()) {
        if (window.size() == 2) {
            rs_cfg.a = window[0];
            rs_cfg.b = window[1];
        }
        return cli::cmd_rescale(rs_cfg, std::cout);
    }
    if (consts->parsed()) return cli::cmd_constants(k_cfg, std::cout);
    if (verify->parsed()) return cli::cmd_verify(suite, seed, std::cout);
    if (report->parsed()) return cli::cmd_report(report_dir, std::cout);
    return cli::kExitUsage;
}
