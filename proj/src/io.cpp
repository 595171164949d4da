#include "ricci/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ricci::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

namespace {

double parse_double(const std::string& tok, const std::string& context) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw invalid_profile_error("bad numeric value '" + tok + "' in " + context);
    return v;
}

std::string snapshot_name(int idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%06d.prof", idx);
    return buf;
}

}  // namespace

Profile read_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_profile_error("cannot open profile file: " + path);
    Profile p;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string xs, ps, fs_;
        if (!(ls >> xs >> ps)) continue;  // blank or comment-only line
        p.x.push_back(parse_double(xs, path));
        p.psi.push_back(parse_double(ps, path));
        if (ls >> fs_)
            p.phi.push_back(parse_double(fs_, path));
        else
            p.phi.push_back(1.0);
    }
    if (p.x.size() < 5) throw invalid_profile_error("profile has too few nodes: " + path);
    return p;
}

void write_profile(const std::string& path, const MetricState& state) {
    if (state.form() != MetricState::Form::Warped)
        throw invalid_parameter_error("write_profile: warped states only");
    std::ofstream out(path);
    if (!out) throw invalid_parameter_error("cannot write profile file: " + path);
    out << "# x psi phi\n";
    for (int j = 0; j <= state.segments(); ++j) {
        out << format_double(state.x(j)) << ' ' << format_double(state.psi()[j]) << ' '
            << format_double(state.phi()[j]) << '\n';
    }
}

MetricState state_from_profile(int n, const Profile& p, double t) {
    const int m = static_cast<int>(p.x.size()) - 1;
    const double h = std::numbers::pi / m;
    for (int j = 0; j <= m; ++j) {
        if (std::abs(p.x[j] - j * h) > 1e-9 * std::numbers::pi)
            throw invalid_profile_error(
                "profile grid must be a uniform partition of [0, pi]");
    }
    return make_warped(n, p.psi, p.phi, t);
}

void export_trajectory(const FlowTrajectory& traj, const std::string& dir) {
    fs::create_directories(dir);
    const bool round = traj.is_round();
    std::ofstream man(fs::path(dir) / "manifest.txt");
    if (!man) throw invalid_parameter_error("cannot write manifest in " + dir);

    man << "# ricci flow trajectory manifest\n";
    man << "format_version 1\n";
    man << "n " << traj.dimension() << '\n';
    man << "form " << (round ? "sphere" : "warped") << '\n';
    man << "t_start " << format_double(traj.t_start) << '\n';
    man << "t_end " << format_double(traj.t_end) << '\n';
    man << "singular " << (traj.singular ? 1 : 0) << '\n';
    man << "numerical_blowup " << (traj.numerical_blowup ? 1 : 0) << '\n';
    man << "T_hat " << (traj.T_hat ? format_double(*traj.T_hat) : std::string("none"))
        << '\n';
    const auto& c = traj.config;
    man << "config dt_initial=" << format_double(c.dt_initial)
        << " safety=" << format_double(c.safety)
        << " curvature_ceiling=" << format_double(c.curvature_ceiling)
        << " t_max=" << format_double(c.t_max) << " output_stride=" << c.output_stride
        << '\n';
    man << "snapshots " << traj.snapshot_count() << '\n';
    if (round) {
        man << "# idx time c\n";
        for (int i = 0; i < traj.snapshot_count(); ++i)
            man << i << ' ' << format_double(traj.time(i)) << ' '
                << format_double(traj.states[i].scale()) << '\n';
    } else {
        man << "# idx time file\n";
        for (int i = 0; i < traj.snapshot_count(); ++i) {
            const std::string name = snapshot_name(i);
            write_profile((fs::path(dir) / name).string(), traj.states[i]);
            man << i << ' ' << format_double(traj.time(i)) << ' ' << name << '\n';
        }
    }
}

FlowTrajectory import_trajectory(const std::string& dir) {
    std::ifstream man(fs::path(dir) / "manifest.txt");
    if (!man) throw invalid_parameter_error("cannot open manifest in " + dir);

    FlowTrajectory traj;
    int n = 0;
    bool round = true;
    int snapshots = 0;
    std::string line;
    while (std::getline(man, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "format_version") {
            int v;
            ls >> v;
            if (v != 1) throw invalid_parameter_error("unsupported manifest version");
        } else if (key == "n") {
            ls >> n;
        } else if (key == "form") {
            std::string f;
            ls >> f;
            round = f == "sphere";
        } else if (key == "t_start") {
            std::string v;
            ls >> v;
            traj.t_start = parse_double(v, "manifest t_start");
        } else if (key == "t_end") {
            std::string v;
            ls >> v;
            traj.t_end = parse_double(v, "manifest t_end");
        } else if (key == "singular") {
            int v;
            ls >> v;
            traj.singular = v != 0;
        } else if (key == "numerical_blowup") {
            int v;
            ls >> v;
            traj.numerical_blowup = v != 0;
        } else if (key == "T_hat") {
            std::string v;
            ls >> v;
            if (v != "none") traj.T_hat = parse_double(v, "manifest T_hat");
        } else if (key == "config") {
            std::string kv;
            while (ls >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const std::string name = kv.substr(0, eq);
                const std::string val = kv.substr(eq + 1);
                if (name == "dt_initial")
                    traj.config.dt_initial = parse_double(val, "config");
                else if (name == "safety")
                    traj.config.safety = parse_double(val, "config");
                else if (name == "curvature_ceiling")
                    traj.config.curvature_ceiling = parse_double(val, "config");
                else if (name == "t_max")
                    traj.config.t_max = parse_double(val, "config");
                else if (name == "output_stride")
                    traj.config.output_stride = static_cast<int>(parse_double(val, "config"));
            }
        } else if (key == "snapshots") {
            ls >> snapshots;
            break;
        }
    }
    if (n < 2 || snapshots < 1)
        throw invalid_parameter_error("manifest is missing n or snapshots");

    TrackPoint best{traj.t_start, 0, -std::numeric_limits<double>::infinity()};
    while (std::getline(man, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int idx;
        std::string time_s, payload;
        if (!(ls >> idx >> time_s >> payload)) continue;
        const double t = parse_double(time_s, "manifest snapshot time");
        MetricState state =
            round ? make_round_sphere(n, parse_double(payload, "manifest c"), t)
                  : state_from_profile(
                        n, read_profile((fs::path(dir) / payload).string()), t);
        CurvatureField cf = curvature(state);
        if (cf.max_rm() >= best.value) best = {t, cf.argmax(true), cf.max_rm()};
        traj.states.push_back(std::move(state));
        traj.curvatures.push_back(std::move(cf));
        traj.max_curvature_track.push_back(best);
    }
    if (traj.snapshot_count() != snapshots)
        throw invalid_parameter_error("manifest snapshot count mismatch");
    traj.validate();
    return traj;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << "alpha,eps,partial_norm,exponent,classification\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.eps.size(); ++k) {
            os << format_double(row.alpha) << ',' << format_double(row.eps[k]) << ','
               << format_double(row.partial_norms[k]) << ','
               << format_double(row.exponent) << ',' << divergence_name(row.classification)
               << '\n';
        }
    }
}

void write_ledger_report(std::ostream& os, const ConstantLedger& led) {
    os << "# analytic constant ledger\n";
    os << "inputs n=" << led.n << " kappa=" << format_double(led.kappa)
       << " r=" << format_double(led.r) << " q=" << format_double(led.q)
       << " beta=" << format_double(led.beta) << " B=" << format_double(led.B) << '\n';
    for (const auto& e : led.entries) {
        os << e.name << " = ";
        const double v = e.value.value();
        if (std::isfinite(v) && v != 0.0) {
            os << format_double(v);
        } else {
            os << "10^" << format_double(e.value.log10());
        }
        os << "  [log10 " << format_double(e.value.log10()) << "]  (" << e.formula
           << ")\n";
    }
}

}  // namespace ricci::io
