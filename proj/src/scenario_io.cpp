#include "psim/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace psim {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    raise_validation(path + ": " + what);
}

const json& require(const json& j, const std::string& path, const char* key) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

cxd parse_complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(path, "expected a [re, im] pair");
    return cxd(j[0].get<double>(), j[1].get<double>());
}

Vector parse_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of [re, im] pairs");
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        v(static_cast<int>(i)) = parse_complex(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

Matrix parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
    size_t n = j.size();
    Matrix m(n, n);
    for (size_t r = 0; r < n; ++r) {
        const json& row = j[r];
        std::string rp = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.size() != n)
            fail(rp, "expected a row of " + std::to_string(n) + " [re, im] pairs");
        for (size_t c = 0; c < n; ++c)
            m(static_cast<int>(r), static_cast<int>(c)) =
                parse_complex(row[c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

// state given either as an amplitude list or as "basis:<k>"
Vector parse_state(const json& j, const std::string& path, int dim) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s.rfind("basis:", 0) == 0) {
            int k = -1;
            try {
                k = std::stoi(s.substr(6));
            } catch (...) {
                fail(path, "malformed basis state '" + s + "'");
            }
            if (k < 0 || k >= dim) fail(path, "basis index out of range");
            Vector v = Vector::Zero(dim);
            v(k) = 1.0;
            return v;
        }
        fail(path, "unknown state shorthand '" + s + "'");
    }
    Vector v = parse_vector(j, path);
    if (v.size() != dim)
        fail(path, "expected " + std::to_string(dim) + " amplitudes, got " +
                       std::to_string(v.size()));
    return v;
}

// Pauli matrices acting on qubit q of an n-qubit register (qubit 0 slowest)
Matrix pauli_on_qubit(int n_qubits, int q, const Matrix& p) {
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < n_qubits; ++k) {
        const Matrix& factor = (k == q) ? p : Matrix::Identity(2, 2);
        Matrix next(out.rows() * 2, out.cols() * 2);
        for (int i = 0; i < out.rows(); ++i)
            for (int j = 0; j < out.cols(); ++j)
                next.block(i * 2, j * 2, 2, 2) = out(i, j) * factor;
        out = std::move(next);
    }
    return out;
}

Matrix qubit_bath_operator(const json& j, const std::string& path, int n_qubits) {
    int dim = 1 << n_qubits;
    Matrix sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    Matrix out = Matrix::Zero(dim, dim);
    auto add_terms = [&](const char* key, const Matrix& p) {
        if (!j.contains(key)) return;
        const json& coeffs = j[key];
        std::string cp = path + "." + key;
        if (!coeffs.is_array() || coeffs.size() != static_cast<size_t>(n_qubits))
            fail(cp, "expected " + std::to_string(n_qubits) + " coefficients");
        for (int q = 0; q < n_qubits; ++q)
            out += as_number(coeffs[q], cp + "[" + std::to_string(q) + "]") *
                   pauli_on_qubit(n_qubits, q, p);
    };
    add_terms("sigma_x", sx);
    add_terms("sigma_z", sz);
    return out;
}

CouplingProfile parse_coupling(const json& j, const std::string& path) {
    CouplingProfile profile;
    if (j.is_number()) {
        profile = CouplingProfile::constant(j.get<double>());
        return profile;
    }
    if (j.is_object() && j.contains("pieces")) {
        const json& pieces = j["pieces"];
        std::string pp = path + ".pieces";
        if (!pieces.is_array() || pieces.empty()) fail(pp, "expected a non-empty array");
        for (size_t i = 0; i < pieces.size(); ++i) {
            std::string ip = pp + "[" + std::to_string(i) + "]";
            const json& p = pieces[i];
            profile.pieces.push_back(CouplingProfile::Piece{
                as_number(require(p, ip, "from"), ip + ".from"),
                as_number(require(p, ip, "value"), ip + ".value")});
        }
        return profile;
    }
    fail(path, "expected a number or {\"pieces\": [...]}");
}

ThetaProfileSpec parse_theta_profile(const json& j, const std::string& path) {
    ThetaProfileSpec spec;
    if (j.is_null()) return spec; // defaults: gauss-legendre, auto, uniform
    if (!j.is_object()) fail(path, "expected an object");
    if (j.contains("quadrature")) {
        std::string q = j["quadrature"].get<std::string>();
        if (q == "gauss-legendre") spec.quadrature = ThetaQuadrature::gauss_legendre;
        else if (q == "trapezoid") spec.quadrature = ThetaQuadrature::trapezoid;
        else fail(path + ".quadrature", "unknown quadrature '" + q + "'");
    }
    if (j.contains("node_count")) {
        const json& nc = j["node_count"];
        if (nc.is_string() && nc.get<std::string>() == "auto") spec.node_count = 0;
        else {
            spec.node_count = as_int(nc, path + ".node_count");
            if (spec.node_count < 1) fail(path + ".node_count", "must be >= 1 or \"auto\"");
        }
    }
    if (j.contains("weights")) {
        const json& w = j["weights"];
        if (w.is_string() && w.get<std::string>() == "uniform") {
            spec.kind = ThetaProfileSpec::WeightKind::uniform;
        } else if (w.is_object() && w.contains("delta")) {
            spec.kind = ThetaProfileSpec::WeightKind::delta;
            spec.delta_theta = as_number(w["delta"], path + ".weights.delta");
        } else if (w.is_object() && w.contains("nodes") && w.contains("values")) {
            spec.kind = ThetaProfileSpec::WeightKind::explicit_list;
            const json& nodes = w["nodes"];
            const json& values = w["values"];
            std::string np = path + ".weights.nodes";
            if (!nodes.is_array() || nodes.empty()) fail(np, "expected a non-empty array");
            for (size_t i = 0; i < nodes.size(); ++i)
                spec.explicit_nodes.push_back(
                    as_number(nodes[i], np + "[" + std::to_string(i) + "]"));
            Vector v = parse_vector(values, path + ".weights.values");
            if (v.size() != static_cast<int>(nodes.size()))
                fail(path + ".weights.values", "length must match nodes");
            spec.explicit_weights.assign(v.data(), v.data() + v.size());
        } else {
            fail(path + ".weights",
                 "expected \"uniform\", {\"delta\": theta} or {\"nodes\":[...],\"values\":[...]}");
        }
    }
    return spec;
}

json complex_to_json(const cxd& z) { return json::array({z.real(), z.imag()}); }

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace

Scenario load_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise_validation(std::string("document: not valid JSON (") + e.what() + ")");
    }
    if (!doc.is_object()) raise_validation("document: expected a JSON object");

    Scenario s;
    if (doc.contains("hbar")) s.hbar = as_number(doc["hbar"], "hbar");

    const json& sys = require(doc, "document", "system");
    s.system_hamiltonian =
        Operator::create({2}, parse_matrix(require(sys, "system", "hamiltonian"),
                                           "system.hamiltonian"));
    if (s.system_hamiltonian.total_dim() != 2)
        fail("system.hamiltonian", "must be 2x2");

    const json& env = require(doc, "document", "environment");
    Matrix h_env;
    int d = 0;
    if (env.contains("qubit_bath")) {
        const json& qb = env["qubit_bath"];
        int n_qubits = as_int(require(qb, "environment.qubit_bath", "qubits"),
                              "environment.qubit_bath.qubits");
        if (n_qubits < 1 || n_qubits > 12)
            fail("environment.qubit_bath.qubits", "must be in [1, 12]");
        d = 1 << n_qubits;
        h_env = qubit_bath_operator(qb, "environment.qubit_bath", n_qubits);
    } else {
        h_env = parse_matrix(require(env, "environment", "hamiltonian"),
                             "environment.hamiltonian");
        d = static_cast<int>(h_env.rows());
    }
    try {
        s.environment_hamiltonian = Operator::create({d}, std::move(h_env));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::capacity) throw;
        fail("environment.hamiltonian", e.what());
    }

    const json& inter = require(doc, "document", "interaction");
    std::string mode = require(inter, "interaction", "mode").get<std::string>();
    if (mode == "phase") s.interaction.mode = InteractionMode::phase;
    else if (mode == "bath") s.interaction.mode = InteractionMode::bath;
    else fail("interaction.mode", "expected \"phase\" or \"bath\"");
    s.interaction.system_operator =
        Operator::create({2}, parse_matrix(require(inter, "interaction", "system_operator"),
                                           "interaction.system_operator"));
    if (inter.contains("environment_operator")) {
        Matrix b = parse_matrix(inter["environment_operator"], "interaction.environment_operator");
        if (b.rows() != d) fail("interaction.environment_operator", "dimension mismatch");
        s.interaction.environment_operator = Operator::create({d}, std::move(b));
    } else if (inter.contains("bath_sigma_z")) {
        if (!env.contains("qubit_bath"))
            fail("interaction.bath_sigma_z", "requires environment.qubit_bath");
        int n_qubits = 0;
        while ((1 << n_qubits) < d) ++n_qubits;
        json shorthand = {{"sigma_z", inter["bath_sigma_z"]}};
        s.interaction.environment_operator = Operator::create(
            {d}, qubit_bath_operator(shorthand, "interaction.bath_sigma_z", n_qubits));
    } else {
        if (s.interaction.mode == InteractionMode::bath)
            fail("interaction.environment_operator", "required in bath mode");
        s.interaction.environment_operator = Operator::identity({d});
    }
    s.interaction.coupling =
        parse_coupling(require(inter, "interaction", "coupling"), "interaction.coupling");
    if (inter.contains("off_diagonal_perturbation"))
        s.interaction.off_diagonal_perturbation =
            as_number(inter["off_diagonal_perturbation"],
                      "interaction.off_diagonal_perturbation");

    const json& grid = require(doc, "document", "time_grid");
    s.time_grid.t0 = as_number(require(grid, "time_grid", "t0"), "time_grid.t0");
    s.time_grid.t_end = as_number(require(grid, "time_grid", "t_end"), "time_grid.t_end");
    s.time_grid.steps = as_int(require(grid, "time_grid", "steps"), "time_grid.steps");

    s.theta_profile = parse_theta_profile(doc.contains("theta_profile") ? doc["theta_profile"]
                                                                        : json(nullptr),
                                          "theta_profile");

    s.initial_system = StateVector::create(
        {2}, parse_state(require(sys, "system", "initial_state"), "system.initial_state", 2));
    s.initial_environment = StateVector::create(
        {d}, parse_state(require(env, "environment", "initial_state"),
                         "environment.initial_state", d));

    s.finalize();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    return load_scenario(read_file(path));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string serialize_scenario(const Scenario& s) {
    json doc;
    doc["hbar"] = s.hbar;
    doc["system"] = {{"hamiltonian", matrix_to_json(s.system_hamiltonian.entries)},
                     {"initial_state", vector_to_json(s.initial_system.amplitudes)}};
    doc["environment"] = {{"hamiltonian", matrix_to_json(s.environment_hamiltonian.entries)},
                          {"initial_state", vector_to_json(s.initial_environment.amplitudes)}};
    json inter;
    inter["mode"] = s.interaction.mode == InteractionMode::phase ? "phase" : "bath";
    inter["system_operator"] = matrix_to_json(s.interaction.system_operator.entries);
    inter["environment_operator"] = matrix_to_json(s.interaction.environment_operator.entries);
    if (s.interaction.coupling.is_constant()) {
        inter["coupling"] = s.interaction.coupling.pieces.front().value;
    } else {
        json pieces = json::array();
        for (const auto& p : s.interaction.coupling.pieces)
            pieces.push_back({{"from", p.from}, {"value", p.value}});
        inter["coupling"] = {{"pieces", pieces}};
    }
    inter["off_diagonal_perturbation"] = s.interaction.off_diagonal_perturbation;
    doc["interaction"] = std::move(inter);
    doc["time_grid"] = {{"t0", s.time_grid.t0},
                        {"t_end", s.time_grid.t_end},
                        {"steps", s.time_grid.steps}};
    json prof;
    prof["quadrature"] =
        s.theta_profile.quadrature == ThetaQuadrature::gauss_legendre ? "gauss-legendre"
                                                                      : "trapezoid";
    switch (s.theta_profile.kind) {
    case ThetaProfileSpec::WeightKind::uniform:
        prof["weights"] = "uniform";
        if (s.theta_profile.node_count > 0) prof["node_count"] = s.theta_profile.node_count;
        else prof["node_count"] = "auto";
        break;
    case ThetaProfileSpec::WeightKind::delta:
        prof["weights"] = {{"delta", s.theta_profile.delta_theta}};
        break;
    case ThetaProfileSpec::WeightKind::explicit_list: {
        Vector v(s.theta_profile.explicit_weights.size());
        for (size_t i = 0; i < s.theta_profile.explicit_weights.size(); ++i)
            v(static_cast<int>(i)) = s.theta_profile.explicit_weights[i];
        prof["weights"] = {{"nodes", s.theta_profile.explicit_nodes},
                           {"values", vector_to_json(v)}};
        break;
    }
    }
    doc["theta_profile"] = std::move(prof);
    return doc.dump(2);
}

std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides) {
    if (overrides.empty()) return text;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise_validation(std::string("document: not valid JSON (") + e.what() + ")");
    }
    for (const std::string& spec : overrides) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            raise_validation("override '" + spec + "': expected path=value");
        std::string path = spec.substr(0, eq);
        std::string value = spec.substr(eq + 1);
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            parsed = value; // bare strings are allowed unquoted
        }
        // walk the dotted path; every segment must already exist
        json* node = &doc;
        size_t pos = 0;
        std::string walked;
        while (true) {
            size_t dot = path.find('.', pos);
            std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
            walked = walked.empty() ? key : walked + "." + key;
            if (!node->is_object() || !node->contains(key))
                raise_validation("override path '" + walked + "' does not exist in the document");
            node = &(*node)[key];
            if (dot == std::string::npos) break;
            pos = dot + 1;
        }
        *node = parsed;
    }
    return doc.dump();
}

} // namespace psim
