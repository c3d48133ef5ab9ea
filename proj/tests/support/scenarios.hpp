// Canned scenarios for the unit suites.
#ifndef PSIM_TEST_SCENARIOS_HPP
#define PSIM_TEST_SCENARIOS_HPP

#include <cstdlib>
#include <string>

#include "psim/scenario_io.hpp"

namespace psim::test {

inline std::string scenario_dir() {
    const char* env = std::getenv("PSIM_SCENARIO_DIR");
    return env ? env : "scenarios";
}

/// diag(0.5,-0.5) system, sigma_z interaction, trivial (d=1) environment,
/// constant coupling g: action rates are exactly +-g.
inline Scenario minimal_phase_scenario(double g = 1.0, double t_end = 4.0, int steps = 160) {
    Scenario s;
    s.hbar = 1.0;
    Matrix h_sys(2, 2);
    h_sys << 0.5, 0, 0, -0.5;
    s.system_hamiltonian = Operator::create({2}, h_sys);
    s.environment_hamiltonian = Operator::create({1}, Matrix::Zero(1, 1));
    Matrix a(2, 2);
    a << 1, 0, 0, -1;
    s.interaction.mode = InteractionMode::phase;
    s.interaction.system_operator = Operator::create({2}, a);
    s.interaction.environment_operator = Operator::identity({1});
    s.interaction.coupling = CouplingProfile::constant(g);
    s.time_grid = TimeGrid{0.0, t_end, steps};
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    s.initial_system = StateVector::create({2}, psi0);
    Vector eps0(1);
    eps0 << 1.0;
    s.initial_environment = StateVector::create({1}, eps0);
    s.finalize();
    return s;
}

/// Three-qubit bath with sigma_x splittings and a sigma_z interaction
/// operator, so [h_env, B] != 0 and the mean-field branch is approximate.
inline Scenario bath_scenario(double g = 0.1, double t_end = 6.0, int steps = 240) {
    std::string doc = read_file(scenario_dir() + "/bath_3qubit.json");
    std::string patched = apply_overrides(
        doc, {"interaction.coupling=" + std::to_string(g),
              "time_grid.t_end=" + std::to_string(t_end),
              "time_grid.steps=" + std::to_string(steps)});
    return load_scenario(patched);
}

} // namespace psim::test

#endif
