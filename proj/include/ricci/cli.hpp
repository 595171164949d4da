#pragma once

#include "ricci/flow.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ricci::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // configuration / parse problems
inline constexpr int kExitNumerical = 3;  // numerical blow-up, partial artifacts kept

struct SimulateConfig {
    int n = 3;
    std::optional<double> c0;  // round sphere when set
    std::string profile_path;  // warped profile file otherwise
    FlowConfig flow;
    std::string out_dir;
};
int cmd_simulate(const SimulateConfig& cfg, std::ostream& log);

struct NormsConfig {
    std::string traj_dir;
    std::string quantity = "R";
    std::vector<double> alphas;
    std::vector<double> eps_seq;  // scan mode when nonempty
    std::optional<std::pair<double, double>> interval;  // plain norms otherwise
    std::string out_csv;  // empty writes to the log stream
};
int cmd_norms(const NormsConfig& cfg, std::ostream& log);

struct RescaleCmdConfig {
    std::string traj_dir;
    double Q = 1.0;
    double t_center = 0.0;
    double a = 0.0, b = 1.0;
    int blowup_count = 0;        // > 0 builds the normalized blow-up sequence
    std::string quantity = "R";  // anchor quantity: R or Rm
    std::string out_dir;
};
int cmd_rescale(const RescaleCmdConfig& cfg, std::ostream& log);

struct ConstantsCmdConfig {
    int n = 3;
    double kappa = 0.01;
    double r = 0.1;
    double q = 0.0;  // <= 0 selects the default (n+2)^2 / (2n)
    double beta = 2.5;
    double B = 0.0;
    std::string out_path;
};
int cmd_constants(const ConstantsCmdConfig& cfg, std::ostream& log);

int cmd_verify(const std::string& suite, unsigned seed, std::ostream& log);

int cmd_report(const std::string& traj_dir, std::ostream& log);

}  // namespace ricci::cli
