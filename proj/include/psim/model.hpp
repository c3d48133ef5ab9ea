#ifndef PSIM_MODEL_HPP
#define PSIM_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "psim/linalg.hpp"
#include "psim/quadrature.hpp"

namespace psim {

/// Piecewise-constant coupling g(t). Each piece holds from its start time
/// (inclusive) until the next piece begins; times before the first piece
/// use the first value.
struct CouplingProfile {
    struct Piece {
        double from;
        double value;
    };
    std::vector<Piece> pieces;

    static CouplingProfile constant(double g) { return CouplingProfile{{Piece{0.0, g}}}; }

    double at(double t) const;
    bool is_constant() const { return pieces.size() == 1; }
    double max_magnitude() const;
};

enum class InteractionMode { phase, bath };

/// Interaction term g(t) * (A + eps_od * sigma_x) (x) B, where A is the
/// system operator (diagonal in the system eigenbasis for the unperturbed
/// model), B the environment operator (identity in phase mode), and the
/// sigma_x term is built in the system eigenbasis.
struct InteractionSpec {
    InteractionMode mode = InteractionMode::phase;
    Operator system_operator;      // dim 2
    Operator environment_operator; // dim d; identity in phase mode
    CouplingProfile coupling;
    double off_diagonal_perturbation = 0.0;
};

struct TimeGrid {
    double t0 = 0.0;
    double t_end = 1.0;
    int steps = 1; // uniform spacing; steps+1 nodes including both ends

    double dt() const { return (t_end - t0) / steps; }
    int node_count() const { return steps + 1; }
    double time_at(int k) const { return t0 + k * dt(); }
    std::vector<double> times() const;
    /// Index of the node matching t, or an error when t is off-grid.
    int node_index(double t) const;
};

enum class ThetaQuadrature { gauss_legendre, trapezoid };

/// Resolved theta-grid: nodes in [0, pi/2], branch weights C_theta and the
/// integration weights of the declared rule. Normalization convention:
/// (2/pi) * sum_k w_k |C_k|^2 = 1 within 1e-8.
struct ThetaProfile {
    enum class Kind { uniform, delta, explicit_list };

    ThetaQuadrature quadrature = ThetaQuadrature::gauss_legendre;
    Kind kind = Kind::uniform;
    std::vector<double> nodes;
    std::vector<cxd> weights;      // C_theta
    std::vector<double> quad_weights;

    double normalization() const;
    void validate() const;
    /// C_theta evaluated off-grid: the common value for uniform profiles,
    /// zero away from a delta node, linear interpolation otherwise.
    cxd weight_at(double theta) const;
};

/// Declarative profile request from the scenario document. A zero node
/// count means "resolve automatically from the accumulated action range"
/// (N = max(64, ceil(8 * dLambda_max / hbar))).
struct ThetaProfileSpec {
    ThetaQuadrature quadrature = ThetaQuadrature::gauss_legendre;
    int node_count = 0; // 0 = auto

    enum class WeightKind { uniform, delta, explicit_list };
    WeightKind kind = WeightKind::uniform;
    double delta_theta = 0.0; // single-node profile at this angle
    std::vector<double> explicit_nodes;
    std::vector<cxd> explicit_weights;
};

/// Eigenbasis of the system Hamiltonian, ordered by descending eigenvalue
/// ("up" first). Eigenvector phases are fixed so the largest-magnitude
/// component is real and positive.
struct SystemBasis {
    bool degenerate = false;
    double energy_up = 0.0;
    double energy_down = 0.0;
    Vector up;   // dim 2
    Vector down; // dim 2
};

/// Full experiment description. Immutable after load/finalize.
struct Scenario {
    double hbar = 1.0;
    Operator system_hamiltonian;      // dim 2
    Operator environment_hamiltonian; // dim d
    InteractionSpec interaction;
    TimeGrid time_grid;
    ThetaProfileSpec theta_profile;
    StateVector initial_system;      // dim 2
    StateVector initial_environment; // dim d

    SystemBasis basis; // computed by finalize()

    int environment_dim() const { return environment_hamiltonian.total_dim(); }
    int total_dim() const { return 2 * environment_dim(); }

    /// Validates every invariant and computes the system eigenbasis.
    /// Raises a validation error with the offending field in the message.
    void finalize();

    const SystemBasis& nondegenerate_basis() const;
};

/// H(t) = h_sys (x) I + I (x) h_env + g(t) * ((A + eps_od sigma_x) (x) B).
Operator build_total_hamiltonian(const Scenario& s, double t);

/// The interaction as seen by the system at coupling g: V = g <e0|B|e0> (A + eps_od sigma_x).
Operator induced_system_operator(const Scenario& s, double g);

struct NonDemolitionReport {
    double commutator_norm = 0.0;  // max|[h_sys, V]|
    double offdiag_up_down = 0.0;  // |<up|V|down>|
    double offdiag_down_up = 0.0;  // |<down|V|up>|
    bool pass = false;             // all residuals <= 1e-12
};

/// Checks [h_sys, V] = 0 and vanishing off-diagonal elements of V in the
/// system eigenbasis, with V evaluated at the largest coupling magnitude.
NonDemolitionReport validate_non_demolition(const Scenario& s);

/// cos(theta)|up> + sin(theta)|down> in the system eigenbasis.
StateVector theta_system_state(double theta, const Scenario& s);

/// Resolves a profile request into a concrete theta grid. The automatic
/// node-count rule needs the maximal action gap |Lambda_up - Lambda_down|
/// reached on the time grid.
ThetaProfile resolve_theta_profile(const ThetaProfileSpec& spec, double delta_lambda_max,
                                   double hbar);

} // namespace psim

#endif
