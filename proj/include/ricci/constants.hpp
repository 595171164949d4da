#pragma once

#include "ricci/flow.hpp"
#include "ricci/logspace.hpp"
#include "ricci/norms.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ricci {

// ---------------------------------------------------------------------------
// Closed-form constants
// ---------------------------------------------------------------------------

struct CrokeConstants {
    double C1 = 0.0;  // pi alpha(n) / (2 alpha(n-1))
    double C2 = 0.0;  // 2^{n-1} alpha(n-1)^n / alpha(n)^{n-1}
};
CrokeConstants croke_constants(int n);

struct OmegaTildeBound {
    double value = 0.0;
    bool vacuous = false;  // vol_N2 < vol_N1: the bound degenerates to 0
};
/// (Vol N2 - Vol N1) / (alpha(n-1) int_0^D (sinh(K r)/K)^{n-1} dr);
/// K = 0 uses the limit integrand r^{n-1}.
OmegaTildeBound omega_tilde_lower_bound(double vol_N2, double vol_N1, double D,
                                        double K, int n);

/// C2(n) * omega_tilde^{n+1}.
double isoperimetric_lower_bound(double omega_tilde, int n);

/// int_0^U sinh^k s ds. Series for small U, composite Simpson mid-range, the
/// exact exponential expansion for large U; +inf past the double range.
double sinh_power_integral(int k, double U);
PosReal sinh_power_integral_pos(int k, double U);

/// Root of int_0^r sinh^{n-1} s ds = kappa / (2 alpha(n-1) e^{2n(n-1)}).
double r_kappa(int n, double kappa);

struct SobolevConstants {
    PosReal C3;     // kappa e^{-n(n-1)} / (2 alpha(n-1) int_0^{2e^{n-1}} sinh^{n-1})
    PosReal C4;     // C2 * C3^{n+1}
    PosReal sigma;  // (2(n-1) / (C4 (n-2)))^2
};
/// Uniform Sobolev constant chain; requires n >= 3 (the exponent divides by
/// n - 2).
SobolevConstants sobolev_sigma(int n, double kappa);

struct MoserConstants {
    double Lambda = 0.0;            // 6 max(beta, 2)
    std::optional<double> nu;       // (n+2)/(2q - n - 2); undefined at q = (n+2)/2
    PosReal delta_b;                // 1 / (4 sigma^{n/(n+2)} Lambda)
    PosReal C_b;                    // C9 (4 sigma^{n/(n+2)} Lambda + 1)
    double C8 = 0.0;                // cutoff constant 64 e^{2B} r^{-2} + 16
};
MoserConstants moser_constants(int n, double q, PosReal sigma, double r, double B,
                               double beta);

/// nu = (n+2)/(2q-n-2); throws not_applicable_error when q <= (n+2)/2.
double moser_nu(int n, double q);

/// The iteration ladder constant (C_a): the explicit product over rungs of
/// [C1(n,q,sigma,C0) C8'' Lambda(lambda^j)^{1+nu} 4^j]^{lambda^{-j}}.
PosReal moser_ladder_constant(int n, double q, PosReal sigma, PosReal C0, double r,
                              double B);

/// Per-rung factor of the same product (rung j maps D_j -> D_{j+1}).
PosReal moser_ladder_step(int n, double q, PosReal sigma, PosReal C0, double r,
                          double B, int j);

struct TildeVolume {
    PosReal C10;  // alpha(n-1) int_0^{e^{n-1} r} sinh^{n-1}
    PosReal V;    // max(C10, 1)
};
TildeVolume tilde_volume(int n, double r);

// ---------------------------------------------------------------------------
// Moser nested domains and cutoffs
// ---------------------------------------------------------------------------

/// Nested parabolic family D_k = B(p, r_k) x [t_k, 1] on the unit window:
/// t_k = 1/2 - 2^{-(k+1)}, r_k = (1/2 + 2^{-(k+1)}) r.
class MoserDomains {
public:
    MoserDomains(double r, int k_max);

    double base_radius() const { return r_; }
    int k_max() const { return k_max_; }
    double t_k(int k) const;
    double r_k(int k) const;

    /// Cutoff eta_k(s, t) = gamma_k(t) rho_k(s): 1 on D_k, 0 outside D_{k-1}.
    double eta(int k, double dist, double t) const;
    double eta_dt_bound(int k) const;              // 2^{k+2}
    double eta_grad_bound(int k, double B) const;  // e^B 2^{k+2} / r

private:
    double r_ = 0.0;
    int k_max_ = 0;
};

MoserDomains moser_domains(double r, int k_max);

// ---------------------------------------------------------------------------
// Trajectory checks
// ---------------------------------------------------------------------------

/// A radial test function on the parabolic domain: arguments are the scaled
/// distance s/r in [0, 1] and the scaled time (t - t0)/(t1 - t0) in [0, 1].
/// Must vanish at s/r = 1 for every t.
using RadialTestField = std::function<double(double, double)>;

struct SobolevCheckRow {
    double lhs = 0.0;        // int_D v^{2(n+2)/n}
    double max_slice = 0.0;  // max_t ||v(.,t)||_{2,Omega}
    double grad = 0.0;       // int_D |grad v|^2
    PosReal rhs;             // sigma * max_slice^{4/n} * grad
    bool holds = false;
};

struct SobolevCheckReport {
    double kappa = 0.0;
    double r = 0.0;       // r(kappa), the ball radius
    PosReal sigma;
    std::vector<SobolevCheckRow> rows;
    bool all_hold = true;
};

/// Numerical instantiation of the parabolic Sobolev inequality on
/// B(center, r(kappa)) x [t0, t1], with kappa measured from the unit ball
/// at the window-end slice.
SobolevCheckReport parabolic_sobolev_check(const FlowTrajectory& traj, int center,
                                           const std::vector<RadialTestField>& fields);

/// The scalar-curvature Moser problem u = R + nB, f = 2(R + (n-2)B),
/// h = 2nB^2 on a unit parabolic window.
struct MoserProblem {
    double B = 0.0;          // Ricci lower-bound magnitude
    double q = 0.0;          // integrability exponent, > (n+2)/2 for the ladder
    double C0 = 0.0;         // hypothesis bound; <= 0 means "measure and pad"
    double kappa_shift = -1.0;  // < 0 means ||h||_{q,D}
};

struct MoserRung {
    int k = 0;
    double exponent = 0.0;  // lambda^k
    double norm = 0.0;      // measured ||v||_{lambda^k, D_k}
    PosReal bound;          // partial-product analytic bound
    bool holds = false;
};

struct MoserTrace {
    std::vector<MoserRung> rungs;
    double sup_Dprime = 0.0;  // ||v||_{inf, D'}
    double kappa_shift = 0.0;
    PosReal C0_used;
    bool hypothesis_ok = true;  // ||f||_q + ||R_-||_q + 1 <= C0
    bool all_hold = true;
};

/// Measured norm ladder against the analytic bound chain on the nested
/// domains centered at `center`.
MoserTrace moser_iteration_trace(const FlowTrajectory& traj, int center,
                                 const MoserDomains& domains, const MoserProblem& problem,
                                 PosReal sigma);

struct EpsRegularityReport {
    bool applicable = false;
    std::vector<std::string> reasons;  // failed gates / preconditions
    double kappa = 0.0;
    double r = 0.0;
    PosReal sigma;
    PosReal delta;   // delta_b / (3 n V~)
    PosReal C_eps;   // 3n (C_b + 1) C_a V~^{(n+4)/(n+2)}
    double norm_in = 0.0;   // ||R||_{(n+2)/2, D}
    double sup_out = 0.0;   // ||R_+||_{inf, D'}
    bool holds = false;     // sup_out <= C_eps (norm_in + B)
};

/// Epsilon-regularity check on a unit-time window: smallness of the critical
/// norm implies the sup bound. B is the Ricci lower-bound magnitude
/// (hard precondition 0 <= B <= 1).
EpsRegularityReport epsilon_regularity_check(const FlowTrajectory& traj, int center,
                                             double B);

struct HamiltonIveyRow {
    int node = 0;
    double t = 0.0;
    double R = 0.0;
    double nu = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

struct HamiltonIveyReport {
    std::vector<HamiltonIveyRow> worst_rows;  // most binding row per snapshot
    bool all_hold = true;
    int checked_samples = 0;
};

/// Pinching inequality R >= |nu| (log|nu| + log(1+t) - 3) at every sample of
/// a 3-dimensional flow with normalized initial data (inf nu(.,0) >= -1).
HamiltonIveyReport hamilton_ivey_check(const FlowTrajectory& traj);

// ---------------------------------------------------------------------------
// Ledger
// ---------------------------------------------------------------------------

struct LedgerEntry {
    std::string name;
    std::string formula;
    PosReal value;
};

struct ConstantLedger {
    int n = 0;
    double kappa = 0.0, r = 0.0, q = 0.0, beta = 0.0, B = 0.0;
    std::optional<double> nu;
    std::vector<LedgerEntry> entries;

    const LedgerEntry& at(const std::string& name) const;
};

/// Every named constant of the chain, evaluated from (n, kappa, r, q, beta, B).
ConstantLedger build_constant_ledger(int n, double kappa, double r, double q,
                                     double beta, double B);

}  // namespace ricci
