#pragma once

#include "ricci/constants.hpp"
#include "ricci/flow.hpp"
#include "ricci/norms.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ricci::io {

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

/// Plain-text profile: "x psi [phi]" per line, '#' starts a comment. A
/// missing third column means phi = 1.
struct Profile {
    std::vector<double> x;
    std::vector<double> psi;
    std::vector<double> phi;
};

Profile read_profile(const std::string& path);
void write_profile(const std::string& path, const MetricState& state);

/// Builds a warped state from a profile read off disk; the grid must be a
/// uniform partition of [0, pi].
MetricState state_from_profile(int n, const Profile& p, double t);

/// Trajectory export: a manifest plus per-snapshot profile files (warped) or
/// inline scale factors (round spheres).
void export_trajectory(const FlowTrajectory& traj, const std::string& dir);
FlowTrajectory import_trajectory(const std::string& dir);

/// Norm-scan table: alpha, eps, partial_norm, exponent, classification.
void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);

/// Structured-text report of every ledger constant.
void write_ledger_report(std::ostream& os, const ConstantLedger& ledger);

}  // namespace ricci::io
