#include "psim/propagators.hpp"

#include <cmath>

namespace psim {

double ActionRecord::at(double t) const {
    if (times.size() < 2) raise_validation("action record needs at least two nodes");
    double dt = times[1] - times[0];
    double x = (t - times.front()) / dt;
    int k = static_cast<int>(std::lround(x));
    if (k < 0 || k >= static_cast<int>(times.size()) || std::abs(times[k] - t) > 1e-9)
        raise_validation("time " + std::to_string(t) + " is not on the action grid");
    return lambda[k];
}

double ActionRecord::mean_rate() const {
    if (times.size() < 2) raise_validation("action record needs at least two nodes");
    return (lambda.back() - lambda.front()) / (times.back() - times.front());
}

std::vector<StateVector> evolve_subsystem(const StateVector& psi0, const Operator& h,
                                          const TimeGrid& grid, double hbar) {
    if (!h.hermitian) raise_validation("subsystem Hamiltonian must be Hermitian");
    if (h.total_dim() != psi0.total_dim())
        raise_validation("subsystem Hamiltonian/state dimension mismatch");
    Operator u = hermitian_propagator(h, grid.dt(), hbar);
    std::vector<StateVector> states;
    states.reserve(grid.node_count());
    states.push_back(psi0);
    for (int k = 1; k < grid.node_count(); ++k)
        states.push_back(apply(u, states.back()));
    return states;
}

namespace {

// interaction operators with the off-diagonal perturbation folded in
Matrix perturbed_system_operator(const Scenario& s) {
    Matrix a = s.interaction.system_operator.entries;
    if (s.interaction.off_diagonal_perturbation != 0.0) {
        const SystemBasis& b = s.nondegenerate_basis();
        a += s.interaction.off_diagonal_perturbation *
             (b.up * b.down.adjoint() + b.down * b.up.adjoint());
    }
    return a;
}

double real_expectation(const Matrix& op, const Vector& v) {
    return cxd(v.dot(op * v)).real();
}

} // namespace

BranchTrajectory evolve_mean_field(double theta, const Scenario& s) {
    return evolve_mean_field_refined(theta, s, 1);
}

BranchTrajectory evolve_mean_field_refined(double theta, const Scenario& s, int refine) {
    if (refine < 1) raise_validation("refinement factor must be >= 1");
    TimeGrid grid = s.time_grid;
    grid.steps *= refine;

    BranchTrajectory branch;
    branch.theta = theta;
    StateVector phi0 = theta_system_state(theta, s);
    branch.system_states = evolve_subsystem(phi0, s.system_hamiltonian, grid, s.hbar);
    branch.environment_states =
        evolve_subsystem(s.initial_environment, s.environment_hamiltonian, grid, s.hbar);

    Matrix a = perturbed_system_operator(s);
    const Matrix& b = s.interaction.environment_operator.entries;

    // interaction energy <phi|A'|phi> <eps|B|eps>, coupling applied per
    // interval so piecewise-constant g integrates exactly
    int n = grid.node_count();
    std::vector<double> m(n);
    for (int k = 0; k < n; ++k)
        m[k] = real_expectation(a, branch.system_states[k].amplitudes) *
               real_expectation(b, branch.environment_states[k].amplitudes);

    branch.action.times = grid.times();
    branch.action.lambda.assign(n, 0.0);
    double dt = grid.dt();
    for (int k = 1; k < n; ++k) {
        double g = s.interaction.coupling.at(grid.time_at(k - 1) + 0.5 * dt);
        branch.action.lambda[k] =
            branch.action.lambda[k - 1] + 0.5 * dt * g * (m[k - 1] + m[k]);
    }

    branch.states.reserve(n);
    for (int k = 0; k < n; ++k) {
        StateVector total = tensor_product(branch.system_states[k], branch.environment_states[k]);
        cxd phase = std::exp(cxd(0.0, -branch.action.lambda[k] / s.hbar));
        total.amplitudes *= phase;
        branch.states.push_back(std::move(total));
    }
    return branch;
}

ExactTrajectory evolve_exact(const StateVector& phi0_total, const Scenario& s) {
    if (phi0_total.total_dim() != s.total_dim())
        raise_validation("initial state dimension does not match the scenario");
    ExactTrajectory traj;
    traj.times = s.time_grid.times();
    traj.states.reserve(s.time_grid.node_count());
    traj.states.push_back(phi0_total);

    double dt = s.time_grid.dt();
    // one propagator per coupling piece; rebuilt only when g changes
    double g_current = std::nan("");
    Operator u = Operator::identity({2, s.environment_dim()});
    for (int k = 1; k < s.time_grid.node_count(); ++k) {
        double t_mid = s.time_grid.time_at(k - 1) + 0.5 * dt;
        double g = s.interaction.coupling.at(t_mid);
        if (g != g_current) {
            u = hermitian_propagator(build_total_hamiltonian(s, t_mid), dt, s.hbar);
            g_current = g;
        }
        traj.states.push_back(apply(u, traj.states.back()));
    }
    return traj;
}

std::vector<double> mean_field_error(double theta, const Scenario& s) {
    BranchTrajectory mf = evolve_mean_field(theta, s);
    StateVector phi0 = tensor_product(theta_system_state(theta, s), s.initial_environment);
    ExactTrajectory exact = evolve_exact(phi0, s);
    std::vector<double> err(mf.states.size());
    for (size_t k = 0; k < mf.states.size(); ++k)
        err[k] = 1.0 - std::abs(inner_product(exact.states[k], mf.states[k]));
    return err;
}

} // namespace psim
