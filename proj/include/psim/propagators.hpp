#ifndef PSIM_PROPAGATORS_HPP
#define PSIM_PROPAGATORS_HPP

#include "psim/model.hpp"

namespace psim {

/// Accumulated action Lambda(t) along a mean-field branch: the running
/// time integral of the interaction energy, trapezoid rule on the grid,
/// stored unwrapped (not reduced mod 2 pi hbar). lambda[0] = 0 at t0.
struct ActionRecord {
    std::vector<double> times;
    std::vector<double> lambda;

    /// Lambda at a grid node (validates t lies on the record's grid).
    double at(double t) const;
    /// Mean slope (Lambda(t_end) - Lambda(t0)) / (t_end - t0); exact for
    /// constant coupling in the non-demolition model.
    double mean_rate() const;
};

/// One mean-field branch: free subsystem evolutions, the accumulated
/// action, and the assembled total states (system (x) environment) *
/// exp(-i Lambda / hbar) per time node.
struct BranchTrajectory {
    double theta = 0.0;
    std::vector<StateVector> states;
    ActionRecord action;
    std::vector<StateVector> system_states;
    std::vector<StateVector> environment_states;
};

/// Full unitary evolution of the total system on the grid.
struct ExactTrajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
};

/// states[k] = exp(-i h (t_k - t0) / hbar) psi0, via per-step propagators
/// from the eigendecomposition of h.
std::vector<StateVector> evolve_subsystem(const StateVector& psi0, const Operator& h,
                                          const TimeGrid& grid, double hbar);

/// Evolves the branch at angle theta: system and environment move under
/// their free Hamiltonians, the interaction enters only through the
/// accumulated phase exp(-i Lambda(t) / hbar).
BranchTrajectory evolve_mean_field(double theta, const Scenario& s);

/// Same branch on a grid refined by an integer factor (convergence checks
/// of the action quadrature).
BranchTrajectory evolve_mean_field_refined(double theta, const Scenario& s, int refine);

/// Brute-force oracle: full-Hamiltonian unitary evolution of an arbitrary
/// initial total state on the scenario grid.
ExactTrajectory evolve_exact(const StateVector& phi0_total, const Scenario& s);

/// err[k] = 1 - |<exact(t_k)|mean-field(t_k)>|, both runs starting from
/// the branch's initial product state.
std::vector<double> mean_field_error(double theta, const Scenario& s);

} // namespace psim

#endif
