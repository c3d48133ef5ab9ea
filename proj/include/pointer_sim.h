/* pointer_sim.h - C interface to the pointer-basis decoherence laboratory.
 *
 * All functions return ps_status; PS_OK is 0 and every failure leaves a
 * human-readable message in ps_last_error() (thread-local). Handles are
 * opaque and owned by the caller via the matching *_free function. Array
 * getters either expose handle-owned storage (valid until the handle is
 * freed) or fill caller buffers with a size query protocol: call with
 * capacity 0 to receive the required length.
 *
 * Complex amplitudes cross the boundary as interleaved doubles
 * [re0, im0, re1, im1, ...].
 */
#ifndef POINTER_SIM_H
#define POINTER_SIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ps_status {
    PS_OK = 0,
    PS_ERR_VALIDATION = 2, /* malformed scenario or argument */
    PS_ERR_CAPACITY = 3,   /* Hilbert-space dimension above the cap */
    PS_ERR_RESOLUTION = 4, /* theta quadrature under-resolved */
    PS_ERR_SWEEP_FAILED = 5,
    PS_ERR_DEGENERACY = 6, /* equal branch actions */
    PS_ERR_UNSUPPORTED = 7,
    PS_ERR_IO = 8,
    PS_ERR_INTERNAL = 9
} ps_status;

typedef struct ps_scenario ps_scenario; /* immutable experiment description */
typedef struct ps_branch ps_branch;     /* one mean-field branch trajectory */
typedef struct ps_exact ps_exact;       /* exact unitary trajectory */
typedef struct ps_family ps_family;     /* theta-indexed branch family */

const char* ps_version(void);

/* Message for the most recent failing call on this thread. */
const char* ps_last_error(void);

/* ---- scenario ------------------------------------------------------- */

/* Loads a scenario document (JSON), applying "path=value" overrides
 * first. `overrides` may be NULL when n_overrides is 0. */
ps_status ps_scenario_load_file(const char* path, const char* const* overrides,
                                size_t n_overrides, ps_scenario** out);
ps_status ps_scenario_load_string(const char* text, const char* const* overrides,
                                  size_t n_overrides, ps_scenario** out);
void ps_scenario_free(ps_scenario* s);

/* Canonical serialized form; free with ps_string_free. */
ps_status ps_scenario_to_json(const ps_scenario* s, char** out_json);
void ps_string_free(char* s);

ps_status ps_scenario_dims(const ps_scenario* s, int32_t* system_dim,
                           int32_t* environment_dim);

typedef struct ps_nondemolition_report {
    double commutator_norm;
    double offdiag_up_down;
    double offdiag_down_up;
    int32_t pass;
} ps_nondemolition_report;

ps_status ps_validate_non_demolition(const ps_scenario* s, ps_nondemolition_report* out);

/* ---- trajectories ---------------------------------------------------- */

/* Mean-field branch at superposition angle theta (radians in [0, pi/2]). */
ps_status ps_evolve_branch(const ps_scenario* s, double theta, ps_branch** out);
void ps_branch_free(ps_branch* b);
ps_status ps_branch_node_count(const ps_branch* b, size_t* out);
ps_status ps_branch_times(const ps_branch* b, const double** data, size_t* n);
ps_status ps_branch_action(const ps_branch* b, const double** data, size_t* n);
/* Interleaved amplitudes of the total state at a time node. */
ps_status ps_branch_state(const ps_branch* b, size_t node, const double** reim, size_t* n);

/* Exact unitary evolution from the scenario's initial product state. */
ps_status ps_evolve_exact(const ps_scenario* s, ps_exact** out);
void ps_exact_free(ps_exact* e);
ps_status ps_exact_node_count(const ps_exact* e, size_t* out);
ps_status ps_exact_times(const ps_exact* e, const double** data, size_t* n);
ps_status ps_exact_state(const ps_exact* e, size_t node, const double** reim, size_t* n);

/* err[k] = 1 - |<exact|mean-field>| per node; caller-buffer protocol. */
ps_status ps_mean_field_error(const ps_scenario* s, double theta, double* out,
                              size_t capacity, size_t* n);

/* ---- branch family and stationary phase ------------------------------ */

ps_status ps_build_family(const ps_scenario* s, int32_t workers, ps_family** out);
void ps_family_free(ps_family* f);
ps_status ps_family_node_count(const ps_family* f, size_t* out);
ps_status ps_family_thetas(const ps_family* f, double* out, size_t capacity, size_t* n);
ps_status ps_family_times(const ps_family* f, const double** data, size_t* n);
ps_status ps_family_lambda_up(const ps_family* f, const double** data, size_t* n);
ps_status ps_family_lambda_down(const ps_family* f, const double** data, size_t* n);

/* max_theta |Lambda_theta(t) - (cos^2 Lambda_up + sin^2 Lambda_down)| */
ps_status ps_action_mixing_residual(const ps_family* f, double t, double* out);

typedef struct ps_saddle_point {
    double theta;
    double lambda_second;
    double prefactor_re;
    double prefactor_im;
} ps_saddle_point;

/* Fills out[0] (theta = 0) and out[1] (theta = pi/2). */
ps_status ps_stationary_points(const ps_family* f, double t, ps_saddle_point out[2]);

/* Unnormalized states; caller-buffer protocol on interleaved doubles. */
ps_status ps_saddle_state(const ps_family* f, double t, double* reim, size_t capacity,
                          size_t* n);
ps_status ps_superpose(const ps_family* f, double t, double* reim, size_t capacity,
                       size_t* n, double* norm_out);

/* Window-averaged overlap of two branches over [t_start, t_end]. */
ps_status ps_time_orthogonality(const ps_scenario* s, double theta_a, double theta_b,
                                double t_start, double t_end, double* re, double* im);

/* r(t) = exp(i (Lambda_up - Lambda_down)/hbar) at a grid node. */
ps_status ps_decoherence_factor(const ps_family* f, double t, double* re, double* im);

/* tau_estimate = hbar/|rate difference|, tau_single_rate = hbar/max rate,
 * tau_measured = first |running avg r| <= 1/2 crossing (interpolated). */
ps_status ps_decoherence_time(const ps_family* f, double* tau_estimate, double* tau_single_rate,
                              double* tau_measured);

/* |<a|b>| over interleaved buffers of equal length; normalize != 0
 * normalizes both first. */
ps_status ps_fidelity(const double* a_reim, size_t n_a, const double* b_reim, size_t n_b,
                      int32_t normalize, double* out);

/* ---- experiment commands --------------------------------------------- */

typedef struct ps_run_options {
    int32_t workers; /* <= 0 means 1 */
    int64_t seed;    /* < 0 means unset; recorded in output metadata */
} ps_run_options;

/* Each command writes its data files into out_dir (created if missing).
 * options may be NULL. */
ps_status ps_cmd_run(const ps_scenario* s, const ps_run_options* options,
                     const char* out_dir);
ps_status ps_cmd_branches(const ps_scenario* s, const ps_run_options* options,
                          const char* out_dir);
ps_status ps_cmd_saddle_compare(const ps_scenario* s, const ps_run_options* options,
                                const char* out_dir);
ps_status ps_cmd_orthogonality(const ps_scenario* s, const ps_run_options* options,
                               const char* out_dir);
ps_status ps_cmd_decoherence(const ps_scenario* s, const ps_run_options* options,
                             const char* out_dir);
ps_status ps_cmd_validate(const ps_scenario* s, const ps_run_options* options,
                          const char* out_dir);

/* Cartesian sweep over the scenario's effective document. Grid specs look
 * like "interaction.coupling=0.5,1,2". Fails with PS_ERR_SWEEP_FAILED only
 * when every row fails; per-row failures are recorded in sweep.csv. */
ps_status ps_cmd_sweep(const ps_scenario* s, const char* const* grid_specs,
                       size_t n_specs, const ps_run_options* options, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POINTER_SIM_H */
