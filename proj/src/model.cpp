#include "psim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace psim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
} // namespace

double CouplingProfile::at(double t) const {
    if (pieces.empty()) raise_validation("coupling profile has no pieces");
    double v = pieces.front().value;
    for (const auto& p : pieces) {
        if (t + 1e-12 >= p.from) v = p.value;
        else break;
    }
    return v;
}

double CouplingProfile::max_magnitude() const {
    double m = 0.0;
    for (const auto& p : pieces) m = std::max(m, std::abs(p.value));
    return m;
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> ts(node_count());
    for (int k = 0; k < node_count(); ++k) ts[k] = time_at(k);
    return ts;
}

int TimeGrid::node_index(double t) const {
    double span = t_end - t0;
    double x = (t - t0) / span * steps;
    int k = static_cast<int>(std::lround(x));
    if (k < 0 || k > steps || std::abs(time_at(k) - t) > 1e-9 * std::max(1.0, std::abs(span)))
        raise_validation("time " + std::to_string(t) + " is not a grid node");
    return k;
}

double ThetaProfile::normalization() const {
    double acc = 0.0;
    for (size_t k = 0; k < nodes.size(); ++k)
        acc += quad_weights[k] * std::norm(weights[k]);
    return acc * 2.0 / kPi;
}

void ThetaProfile::validate() const {
    if (nodes.empty() || nodes.size() != weights.size() || nodes.size() != quad_weights.size())
        raise_validation("theta profile arrays must be non-empty and aligned");
    for (size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k] < -1e-12 || nodes[k] > kHalfPi + 1e-12)
            raise_validation("theta node outside [0, pi/2]");
        if (k > 0 && nodes[k] <= nodes[k - 1])
            raise_validation("theta nodes must be strictly ascending");
    }
    double n = normalization();
    if (std::abs(n - 1.0) > 1e-8)
        raise_validation("theta profile normalization (2/pi) int |C|^2 dtheta = " +
                         std::to_string(n) + ", expected 1 within 1e-8");
}

cxd ThetaProfile::weight_at(double theta) const {
    switch (kind) {
    case Kind::uniform:
        return weights.front();
    case Kind::delta:
        return std::abs(theta - nodes.front()) <= 1e-9 ? weights.front() : cxd(0.0, 0.0);
    case Kind::explicit_list: {
        if (theta <= nodes.front()) return weights.front();
        if (theta >= nodes.back()) return weights.back();
        size_t hi = 1;
        while (nodes[hi] < theta) ++hi;
        double f = (theta - nodes[hi - 1]) / (nodes[hi] - nodes[hi - 1]);
        return weights[hi - 1] * (1.0 - f) + weights[hi] * f;
    }
    }
    return cxd(0.0, 0.0);
}

ThetaProfile resolve_theta_profile(const ThetaProfileSpec& spec, double delta_lambda_max,
                                   double hbar) {
    ThetaProfile profile;
    profile.quadrature = spec.quadrature;

    if (spec.kind == ThetaProfileSpec::WeightKind::delta) {
        // single-branch profile: one node carrying the full interval weight
        profile.kind = ThetaProfile::Kind::delta;
        profile.nodes = {spec.delta_theta};
        profile.quad_weights = {kHalfPi};
        profile.weights = {cxd(1.0, 0.0)};
        profile.validate();
        return profile;
    }

    if (spec.kind == ThetaProfileSpec::WeightKind::explicit_list) {
        if (spec.quadrature != ThetaQuadrature::trapezoid)
            raise_validation("explicit theta nodes require the trapezoid quadrature");
        profile.kind = ThetaProfile::Kind::explicit_list;
        QuadratureRule rule = trapezoid_on_nodes(spec.explicit_nodes, 0.0, kHalfPi);
        profile.nodes = rule.nodes;
        profile.quad_weights = rule.weights;
        profile.weights = spec.explicit_weights;
        profile.validate();
        return profile;
    }

    // uniform |C| over the declared quadrature grid
    int n = spec.node_count;
    if (n <= 0)
        n = std::max(64, static_cast<int>(std::ceil(8.0 * std::abs(delta_lambda_max) / hbar)));
    QuadratureRule rule = spec.quadrature == ThetaQuadrature::gauss_legendre
                              ? gauss_legendre(n, 0.0, kHalfPi)
                              : trapezoid_uniform(n, 0.0, kHalfPi);
    profile.nodes = rule.nodes;
    profile.quad_weights = rule.weights;
    double total = 0.0;
    for (double w : rule.weights) total += w;
    double c = std::sqrt(kPi / (2.0 * total)); // makes (2/pi) sum w |C|^2 = 1
    profile.weights.assign(n, cxd(c, 0.0));
    profile.validate();
    return profile;
}

namespace {

SystemBasis compute_basis(const Operator& h_sys) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h_sys.entries);
    SystemBasis basis;
    // ascending order from Eigen; "up" is the larger eigenvalue
    basis.energy_down = es.eigenvalues()(0);
    basis.energy_up = es.eigenvalues()(1);
    basis.down = es.eigenvectors().col(0);
    basis.up = es.eigenvectors().col(1);
    double scale = std::max({1.0, std::abs(basis.energy_up), std::abs(basis.energy_down)});
    basis.degenerate = std::abs(basis.energy_up - basis.energy_down) < 1e-10 * scale;
    // fix the gauge: largest-magnitude component real and positive
    for (Vector* v : {&basis.up, &basis.down}) {
        int imax = 0;
        double best = 0.0;
        for (int i = 0; i < v->size(); ++i)
            if (std::abs((*v)(i)) > best) {
                best = std::abs((*v)(i));
                imax = i;
            }
        cxd ph = (*v)(imax) / std::abs((*v)(imax));
        *v /= ph;
    }
    return basis;
}

Matrix sigma_x_in_basis(const SystemBasis& b) {
    return b.up * b.down.adjoint() + b.down * b.up.adjoint();
}

} // namespace

void Scenario::finalize() {
    if (hbar <= 0.0) raise_validation("hbar: must be positive");
    if (system_hamiltonian.total_dim() != 2)
        raise_validation("system.hamiltonian: system must be two-level");
    if (!system_hamiltonian.hermitian)
        raise_validation("system.hamiltonian: not Hermitian within 1e-12");
    if (!environment_hamiltonian.hermitian)
        raise_validation("environment.hamiltonian: not Hermitian within 1e-12");
    if (!interaction.system_operator.hermitian)
        raise_validation("interaction.system_operator: not Hermitian within 1e-12");
    if (interaction.system_operator.total_dim() != 2)
        raise_validation("interaction.system_operator: must be 2x2");
    if (!interaction.environment_operator.hermitian)
        raise_validation("interaction.environment_operator: not Hermitian within 1e-12");
    if (interaction.environment_operator.total_dim() != environment_dim())
        raise_validation("interaction.environment_operator: dimension mismatch with environment");
    if (interaction.off_diagonal_perturbation < 0.0)
        raise_validation("interaction.off_diagonal_perturbation: must be >= 0");
    if (interaction.mode == InteractionMode::phase) {
        Matrix id = Matrix::Identity(environment_dim(), environment_dim());
        if (max_abs(interaction.environment_operator.entries - id) > 1e-12)
            raise_validation(
                "interaction.environment_operator: phase mode requires the identity");
    }
    if (interaction.coupling.pieces.empty())
        raise_validation("interaction.coupling: empty profile");
    if (time_grid.steps < 1) raise_validation("time_grid.steps: must be >= 1");
    if (!(time_grid.t_end > time_grid.t0))
        raise_validation("time_grid: t_end must exceed t0");
    for (size_t i = 1; i < interaction.coupling.pieces.size(); ++i)
        if (interaction.coupling.pieces[i].from <= interaction.coupling.pieces[i - 1].from)
            raise_validation("interaction.coupling.pieces: start times must ascend");
    // piece boundaries inside the grid must land on grid nodes, so the
    // per-interval action quadrature sees a single coupling value
    for (const auto& p : interaction.coupling.pieces) {
        if (p.from <= time_grid.t0 || p.from >= time_grid.t_end) continue;
        double x = (p.from - time_grid.t0) / time_grid.dt();
        if (std::abs(x - std::lround(x)) > 1e-9)
            raise_validation("interaction.coupling.pieces: boundary at " +
                             std::to_string(p.from) + " is not a time-grid node");
    }
    if (initial_system.total_dim() != 2)
        raise_validation("system.initial_state: must have dimension 2");
    if (std::abs(initial_system.norm() - 1.0) > 1e-8)
        raise_validation("system.initial_state: norm is " +
                         std::to_string(initial_system.norm()) + ", expected 1");
    if (initial_environment.total_dim() != environment_dim())
        raise_validation("environment.initial_state: dimension mismatch");
    if (std::abs(initial_environment.norm() - 1.0) > 1e-8)
        raise_validation("environment.initial_state: norm is " +
                         std::to_string(initial_environment.norm()) + ", expected 1");
    if (theta_profile.kind == ThetaProfileSpec::WeightKind::delta) {
        if (theta_profile.delta_theta < 0.0 || theta_profile.delta_theta > kHalfPi)
            raise_validation("theta_profile.delta: node outside [0, pi/2]");
    }
    if (theta_profile.kind == ThetaProfileSpec::WeightKind::explicit_list) {
        for (double th : theta_profile.explicit_nodes)
            if (th < 0.0 || th > kHalfPi)
                raise_validation("theta_profile.nodes: node outside [0, pi/2]");
        // normalization is checked when the profile is resolved
        resolve_theta_profile(theta_profile, 0.0, hbar);
    }
    product_dim({2, environment_dim()}); // capacity check
    basis = compute_basis(system_hamiltonian);
}

const SystemBasis& Scenario::nondegenerate_basis() const {
    if (basis.degenerate)
        raise_validation("system Hamiltonian is degenerate; the up/down basis is ambiguous");
    return basis;
}

Operator build_total_hamiltonian(const Scenario& s, double t) {
    int d = s.environment_dim();
    Operator id_sys = Operator::identity({2});
    Operator id_env = Operator::identity({d});
    Matrix h = tensor_product(s.system_hamiltonian, id_env).entries +
               tensor_product(id_sys, s.environment_hamiltonian).entries;
    double g = s.interaction.coupling.at(t);
    Matrix a = s.interaction.system_operator.entries;
    if (s.interaction.off_diagonal_perturbation != 0.0)
        a += s.interaction.off_diagonal_perturbation * sigma_x_in_basis(s.nondegenerate_basis());
    Operator coupled = Operator::create({2}, a);
    h += g * tensor_product(coupled, s.interaction.environment_operator).entries;
    Operator out = Operator::create({2, d}, std::move(h));
    if (!out.hermitian)
        raise_validation("total Hamiltonian failed the Hermiticity check");
    return out;
}

Operator induced_system_operator(const Scenario& s, double g) {
    const auto& b = s.interaction.environment_operator.entries;
    cxd b_exp = s.initial_environment.amplitudes.dot(b * s.initial_environment.amplitudes);
    Matrix a = s.interaction.system_operator.entries;
    if (s.interaction.off_diagonal_perturbation != 0.0)
        a += s.interaction.off_diagonal_perturbation * sigma_x_in_basis(s.nondegenerate_basis());
    return Operator::create({2}, g * b_exp.real() * a);
}

NonDemolitionReport validate_non_demolition(const Scenario& s) {
    Operator v = induced_system_operator(s, s.interaction.coupling.max_magnitude());
    const SystemBasis& b = s.nondegenerate_basis();
    NonDemolitionReport report;
    Matrix comm = s.system_hamiltonian.entries * v.entries - v.entries * s.system_hamiltonian.entries;
    report.commutator_norm = max_abs(comm);
    report.offdiag_up_down = std::abs(cxd(b.up.dot(v.entries * b.down)));
    report.offdiag_down_up = std::abs(cxd(b.down.dot(v.entries * b.up)));
    report.pass = report.commutator_norm <= 1e-12 && report.offdiag_up_down <= 1e-12 &&
                  report.offdiag_down_up <= 1e-12;
    return report;
}

StateVector theta_system_state(double theta, const Scenario& s) {
    if (theta < -1e-12 || theta > kHalfPi + 1e-12)
        raise_validation("theta outside [0, pi/2]");
    const SystemBasis& b = s.nondegenerate_basis();
    Vector amps = std::cos(theta) * b.up + std::sin(theta) * b.down;
    return StateVector::create({2}, std::move(amps));
}

} // namespace psim
