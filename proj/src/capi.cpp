#include "pointer_sim.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <numbers>
#include <string>

#include "psim/experiments.hpp"
#include "psim/output.hpp"
#include "psim/scenario_io.hpp"

using namespace psim;

namespace {

thread_local std::string t_last_error;

ps_status status_from(const Error& e) { return static_cast<ps_status>(e.code()); }

template <typename Fn>
ps_status guarded(Fn&& fn) {
    try {
        fn();
        return PS_OK;
    } catch (const Error& e) {
        t_last_error = e.what();
        return status_from(e);
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return PS_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return PS_ERR_INTERNAL;
    }
}

ps_status invalid_argument(const char* what) {
    t_last_error = what;
    return PS_ERR_VALIDATION;
}

std::vector<std::string> collect(const char* const* items, size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.emplace_back(items[i]);
    return out;
}

// interleave amplitudes as [re, im, re, im, ...]
const double* interleaved(const Vector& v) {
    // std::complex<double> is layout-compatible with double[2]
    return reinterpret_cast<const double*>(v.data());
}

ps_status fill_buffer(const std::vector<double>& src, double* out, size_t capacity,
                      size_t* n) {
    if (!n) return invalid_argument("size pointer is null");
    *n = src.size();
    if (capacity == 0) return PS_OK;
    if (!out) return invalid_argument("output buffer is null");
    if (capacity < src.size()) return invalid_argument("output buffer too small");
    std::memcpy(out, src.data(), src.size() * sizeof(double));
    return PS_OK;
}

ps_status fill_state(const StateVector& state, double* reim, size_t capacity, size_t* n) {
    if (!n) return invalid_argument("size pointer is null");
    *n = static_cast<size_t>(state.total_dim());
    if (capacity == 0) return PS_OK;
    if (!reim) return invalid_argument("output buffer is null");
    if (capacity < *n) return invalid_argument("output buffer too small");
    std::memcpy(reim, interleaved(state.amplitudes), *n * 2 * sizeof(double));
    return PS_OK;
}

RunOptions to_options(const ps_run_options* options) {
    RunOptions opt;
    if (options) {
        opt.workers = options->workers > 0 ? options->workers : 1;
        opt.seed = options->seed;
    }
    return opt;
}

} // namespace

struct ps_scenario {
    Scenario scenario;
    std::string document; // effective document after overrides
};

struct ps_branch {
    BranchTrajectory branch;
};

struct ps_exact {
    ExactTrajectory trajectory;
};

struct ps_family {
    BranchFamily family;
    std::vector<double> thetas;
};

extern "C" {

const char* ps_version(void) { return kToolVersion; }

const char* ps_last_error(void) { return t_last_error.c_str(); }

ps_status ps_scenario_load_string(const char* text, const char* const* overrides,
                                  size_t n_overrides, ps_scenario** out) {
    if (!text || !out) return invalid_argument("null argument");
    if (n_overrides > 0 && !overrides) return invalid_argument("null overrides");
    return guarded([&] {
        std::string doc = apply_overrides(text, collect(overrides, n_overrides));
        auto handle = std::make_unique<ps_scenario>();
        handle->scenario = load_scenario(doc);
        handle->document = doc;
        *out = handle.release();
    });
}

ps_status ps_scenario_load_file(const char* path, const char* const* overrides,
                                size_t n_overrides, ps_scenario** out) {
    if (!path || !out) return invalid_argument("null argument");
    std::string text;
    ps_status st = guarded([&] { text = read_file(path); });
    if (st != PS_OK) return st;
    return ps_scenario_load_string(text.c_str(), overrides, n_overrides, out);
}

void ps_scenario_free(ps_scenario* s) { delete s; }

ps_status ps_scenario_to_json(const ps_scenario* s, char** out_json) {
    if (!s || !out_json) return invalid_argument("null argument");
    return guarded([&] {
        std::string text = serialize_scenario(s->scenario);
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (!buf) raise(ErrorCode::internal, "out of memory");
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out_json = buf;
    });
}

void ps_string_free(char* s) { std::free(s); }

ps_status ps_scenario_dims(const ps_scenario* s, int32_t* system_dim,
                           int32_t* environment_dim) {
    if (!s || !system_dim || !environment_dim) return invalid_argument("null argument");
    *system_dim = 2;
    *environment_dim = s->scenario.environment_dim();
    return PS_OK;
}

ps_status ps_validate_non_demolition(const ps_scenario* s, ps_nondemolition_report* out) {
    if (!s || !out) return invalid_argument("null argument");
    return guarded([&] {
        NonDemolitionReport r = validate_non_demolition(s->scenario);
        out->commutator_norm = r.commutator_norm;
        out->offdiag_up_down = r.offdiag_up_down;
        out->offdiag_down_up = r.offdiag_down_up;
        out->pass = r.pass ? 1 : 0;
    });
}

ps_status ps_evolve_branch(const ps_scenario* s, double theta, ps_branch** out) {
    if (!s || !out) return invalid_argument("null argument");
    return guarded([&] {
        auto handle = std::make_unique<ps_branch>();
        handle->branch = evolve_mean_field(theta, s->scenario);
        *out = handle.release();
    });
}

void ps_branch_free(ps_branch* b) { delete b; }

ps_status ps_branch_node_count(const ps_branch* b, size_t* out) {
    if (!b || !out) return invalid_argument("null argument");
    *out = b->branch.action.times.size();
    return PS_OK;
}

ps_status ps_branch_times(const ps_branch* b, const double** data, size_t* n) {
    if (!b || !data || !n) return invalid_argument("null argument");
    *data = b->branch.action.times.data();
    *n = b->branch.action.times.size();
    return PS_OK;
}

ps_status ps_branch_action(const ps_branch* b, const double** data, size_t* n) {
    if (!b || !data || !n) return invalid_argument("null argument");
    *data = b->branch.action.lambda.data();
    *n = b->branch.action.lambda.size();
    return PS_OK;
}

ps_status ps_branch_state(const ps_branch* b, size_t node, const double** reim, size_t* n) {
    if (!b || !reim || !n) return invalid_argument("null argument");
    if (node >= b->branch.states.size()) return invalid_argument("node out of range");
    *reim = interleaved(b->branch.states[node].amplitudes);
    *n = static_cast<size_t>(b->branch.states[node].total_dim());
    return PS_OK;
}

ps_status ps_evolve_exact(const ps_scenario* s, ps_exact** out) {
    if (!s || !out) return invalid_argument("null argument");
    return guarded([&] {
        auto handle = std::make_unique<ps_exact>();
        StateVector phi0 =
            tensor_product(s->scenario.initial_system, s->scenario.initial_environment);
        handle->trajectory = evolve_exact(phi0, s->scenario);
        *out = handle.release();
    });
}

void ps_exact_free(ps_exact* e) { delete e; }

ps_status ps_exact_node_count(const ps_exact* e, size_t* out) {
    if (!e || !out) return invalid_argument("null argument");
    *out = e->trajectory.times.size();
    return PS_OK;
}

ps_status ps_exact_times(const ps_exact* e, const double** data, size_t* n) {
    if (!e || !data || !n) return invalid_argument("null argument");
    *data = e->trajectory.times.data();
    *n = e->trajectory.times.size();
    return PS_OK;
}

ps_status ps_exact_state(const ps_exact* e, size_t node, const double** reim, size_t* n) {
    if (!e || !reim || !n) return invalid_argument("null argument");
    if (node >= e->trajectory.states.size()) return invalid_argument("node out of range");
    *reim = interleaved(e->trajectory.states[node].amplitudes);
    *n = static_cast<size_t>(e->trajectory.states[node].total_dim());
    return PS_OK;
}

ps_status ps_mean_field_error(const ps_scenario* s, double theta, double* out,
                              size_t capacity, size_t* n) {
    if (!s) return invalid_argument("null argument");
    std::vector<double> err;
    ps_status st = guarded([&] { err = mean_field_error(theta, s->scenario); });
    if (st != PS_OK) return st;
    return fill_buffer(err, out, capacity, n);
}

ps_status ps_build_family(const ps_scenario* s, int32_t workers, ps_family** out) {
    if (!s || !out) return invalid_argument("null argument");
    return guarded([&] {
        auto handle = std::make_unique<ps_family>();
        handle->family = build_branch_family(s->scenario, workers > 0 ? workers : 1);
        handle->thetas = handle->family.profile.nodes;
        *out = handle.release();
    });
}

void ps_family_free(ps_family* f) { delete f; }

ps_status ps_family_node_count(const ps_family* f, size_t* out) {
    if (!f || !out) return invalid_argument("null argument");
    *out = f->thetas.size();
    return PS_OK;
}

ps_status ps_family_thetas(const ps_family* f, double* out, size_t capacity, size_t* n) {
    if (!f) return invalid_argument("null argument");
    return fill_buffer(f->thetas, out, capacity, n);
}

ps_status ps_family_times(const ps_family* f, const double** data, size_t* n) {
    if (!f || !data || !n) return invalid_argument("null argument");
    *data = f->family.times.data();
    *n = f->family.times.size();
    return PS_OK;
}

ps_status ps_family_lambda_up(const ps_family* f, const double** data, size_t* n) {
    if (!f || !data || !n) return invalid_argument("null argument");
    *data = f->family.up.action.lambda.data();
    *n = f->family.up.action.lambda.size();
    return PS_OK;
}

ps_status ps_family_lambda_down(const ps_family* f, const double** data, size_t* n) {
    if (!f || !data || !n) return invalid_argument("null argument");
    *data = f->family.down.action.lambda.data();
    *n = f->family.down.action.lambda.size();
    return PS_OK;
}

ps_status ps_action_mixing_residual(const ps_family* f, double t, double* out) {
    if (!f || !out) return invalid_argument("null argument");
    return guarded([&] { *out = action_mixing_residual(f->family, t); });
}

ps_status ps_stationary_points(const ps_family* f, double t, ps_saddle_point out[2]) {
    if (!f || !out) return invalid_argument("null argument");
    return guarded([&] {
        StationaryPointReport report = stationary_points(f->family, t);
        for (int i = 0; i < 2; ++i) {
            out[i].theta = report.points[i].theta;
            out[i].lambda_second = report.points[i].lambda_second;
            out[i].prefactor_re = report.points[i].prefactor.real();
            out[i].prefactor_im = report.points[i].prefactor.imag();
        }
    });
}

ps_status ps_saddle_state(const ps_family* f, double t, double* reim, size_t capacity,
                          size_t* n) {
    if (!f) return invalid_argument("null argument");
    StateVector state{{1}, Vector::Zero(1)};
    ps_status st = guarded([&] { state = saddle_point_state(f->family, t); });
    if (st != PS_OK) return st;
    return fill_state(state, reim, capacity, n);
}

ps_status ps_superpose(const ps_family* f, double t, double* reim, size_t capacity,
                       size_t* n, double* norm_out) {
    if (!f) return invalid_argument("null argument");
    SuperposeResult result{StateVector{{1}, Vector::Zero(1)}, 0.0};
    ps_status st = guarded([&] { result = superpose_branches(f->family, t); });
    if (st != PS_OK) return st;
    if (norm_out) *norm_out = result.norm;
    return fill_state(result.state, reim, capacity, n);
}

ps_status ps_time_orthogonality(const ps_scenario* s, double theta_a, double theta_b,
                                double t_start, double t_end, double* re, double* im) {
    if (!s || !re || !im) return invalid_argument("null argument");
    return guarded([&] {
        BranchTrajectory a = evolve_mean_field(theta_a, s->scenario);
        BranchTrajectory b = evolve_mean_field(theta_b, s->scenario);
        TimeGrid window{t_start, t_end, 1};
        cxd overlap = time_orthogonality(a, b, window);
        *re = overlap.real();
        *im = overlap.imag();
    });
}

ps_status ps_decoherence_factor(const ps_family* f, double t, double* re, double* im) {
    if (!f || !re || !im) return invalid_argument("null argument");
    return guarded([&] {
        cxd r = decoherence_factor(f->family, t);
        *re = r.real();
        *im = r.imag();
    });
}

ps_status ps_decoherence_time(const ps_family* f, double* tau_estimate, double* tau_single_rate,
                              double* tau_measured) {
    if (!f) return invalid_argument("null argument");
    return guarded([&] {
        DecoherenceTimes taus = decoherence_time(f->family);
        if (tau_estimate) *tau_estimate = taus.tau_estimate;
        if (tau_single_rate) *tau_single_rate = taus.tau_single_rate;
        if (tau_measured) *tau_measured = taus.tau_measured;
    });
}

ps_status ps_fidelity(const double* a_reim, size_t n_a, const double* b_reim, size_t n_b,
                      int32_t normalize, double* out) {
    if (!a_reim || !b_reim || !out) return invalid_argument("null argument");
    if (n_a != n_b || n_a == 0) return invalid_argument("amplitude buffers must match");
    return guarded([&] {
        Vector a(n_a), b(n_b);
        for (size_t i = 0; i < n_a; ++i) {
            a(static_cast<int>(i)) = cxd(a_reim[2 * i], a_reim[2 * i + 1]);
            b(static_cast<int>(i)) = cxd(b_reim[2 * i], b_reim[2 * i + 1]);
        }
        StateVector sa = StateVector::create({static_cast<int>(n_a)}, std::move(a));
        StateVector sb = StateVector::create({static_cast<int>(n_b)}, std::move(b));
        *out = fidelity(sa, sb, normalize != 0);
    });
}

ps_status ps_cmd_run(const ps_scenario* s, const ps_run_options* options,
                     const char* out_dir) {
    if (!s || !out_dir) return invalid_argument("null argument");
    return guarded([&] { cmd_run(s->scenario, to_options(options), out_dir); });
}

ps_status ps_cmd_branches(const ps_scenario* s, const ps_run_options* options,
                          const char* out_dir) {
    if (!s || !out_dir) return invalid_argument("null argument");
    return guarded([&] { cmd_branches(s->scenario, to_options(options), out_dir); });
}

ps_status ps_cmd_saddle_compare(const ps_scenario* s, const ps_run_options* options,
                                const char* out_dir) {
    if (!s || !out_dir) return invalid_argument("null argument");
    return guarded([&] { cmd_saddle_compare(s->scenario, to_options(options), out_dir); });
}

ps_status ps_cmd_orthogonality(const ps_scenario* s, const ps_run_options* options,
                               const char* out_dir) {
    if (!s || !out_dir) return invalid_argument("null argument");
    return guarded([&] { cmd_orthogonality(s->scenario, to_options(options), out_dir); });
}

ps_status ps_cmd_decoherence(const ps_scenario* s, const ps_run_options* options,
                             const char* out_dir) {
    if (!s || !out_dir) return invalid_argument("null argument");
    return guarded([&] { cmd_decoherence(s->scenario, to_options(options), out_dir); });
}

ps_status ps_cmd_validate(const ps_scenario* s, const ps_run_options* options,
                          const char* out_dir) {
    if (!s || !out_dir) return invalid_argument("null argument");
    return guarded([&] { cmd_validate(s->scenario, to_options(options), out_dir); });
}

ps_status ps_cmd_sweep(const ps_scenario* s, const char* const* grid_specs, size_t n_specs,
                       const ps_run_options* options, const char* out_dir) {
    if (!s || !out_dir) return invalid_argument("null argument");
    if (n_specs > 0 && !grid_specs) return invalid_argument("null grid specs");
    return guarded([&] {
        cmd_sweep(s->document, collect(grid_specs, n_specs), to_options(options), out_dir);
    });
}

} // extern "C"
