#ifndef PSIM_BRANCHES_HPP
#define PSIM_BRANCHES_HPP

#include "psim/propagators.hpp"

namespace psim {

/// The theta-indexed family of mean-field branches, plus the two pointer
/// branches (theta = 0 and pi/2) whose actions drive the stationary-phase
/// analysis.
struct BranchFamily {
    ThetaProfile profile;
    std::vector<BranchTrajectory> branches; // aligned to profile.nodes
    BranchTrajectory up;                    // theta = 0
    BranchTrajectory down;                  // theta = pi/2
    double hbar = 1.0;
    bool constant_coupling = true;
    std::vector<double> times;

    int node_index(double t) const;
    /// Lambda_up(t) - Lambda_down(t).
    double delta_lambda(double t) const;
};

/// cos(theta)|up> + sin(theta)|down>; raises a validation error when the
/// system Hamiltonian is degenerate (the basis would be ambiguous).
inline StateVector make_theta_state(double theta, const Scenario& s) {
    return theta_system_state(theta, s);
}

/// Evolves the pointer branches, resolves the theta profile (automatic
/// node counts use the accumulated action range), then evolves one branch
/// per profile node. Branch evolutions are independent; `workers` > 1
/// fans them out over threads.
BranchFamily build_branch_family(const Scenario& s, int workers = 1);

/// max over theta nodes of |Lambda_theta(t) - (cos^2 Lambda_up + sin^2 Lambda_down)|.
double action_mixing_residual(const BranchFamily& family, double t);

struct SuperposeResult {
    StateVector state; // unnormalized
    double norm;
};

/// (2/pi) sum_k w_k C_k |Phi_k(t)> under the profile's quadrature.
/// Raises a resolution error (with a node-count suggestion) when the
/// branch phase changes by more than pi/4 between adjacent nodes.
SuperposeResult superpose_branches(const BranchFamily& family, double t);

struct StationaryPoint {
    double theta;
    double lambda_second; // d^2 Lambda_theta / dtheta^2 at the point
    cxd prefactor;        // C_theta* sqrt(2 pi hbar / (i Lambda''))
};

struct StationaryPointReport {
    std::vector<StationaryPoint> points; // theta ascending: 0, pi/2
    // principal sqrt(2 pi hbar / (i L'')) carries the phase exp(-i sgn(L'') pi/4)
    std::string phase_convention = "exp(-i*sgn(lambda_second)*pi/4)";
    // both stationary points sit on the integration boundary; prefactors
    // carry this weight (1 = full Fresnel factor, 0.5 would be the
    // standard half-contribution convention)
    double boundary_weight = 1.0;
};

/// Stationary points of Lambda_theta(t) from the mixing law: theta = 0
/// with Lambda'' = 2(L_down - L_up) and theta = pi/2 with the opposite
/// sign. Degenerate actions (|L_up - L_down| < 10 hbar eps) are an error.
StationaryPointReport stationary_points(const BranchFamily& family, double t);

/// Numeric fallback for perturbed scenarios: golden-section extremum
/// search on theta -> Lambda_theta(t), each evaluation a fresh mean-field
/// run. Tolerance is in theta.
StationaryPointReport stationary_points_numeric(const Scenario& s, double t,
                                                double theta_tol = 1e-8);

/// Two-term pointer superposition (2/pi) sum_* C~ |phi_*(t)>|eps(t)> e^{-i Lambda_*/hbar}.
StateVector saddle_point_state(const BranchFamily& family, double t);

/// Window-averaged overlap (1/T) int <Phi_a|Phi_b> dt by trapezoid rule
/// over grid nodes inside [window.t0, window.t_end].
cxd time_orthogonality(const BranchTrajectory& a, const BranchTrajectory& b,
                       const TimeGrid& window);

} // namespace psim

#endif
