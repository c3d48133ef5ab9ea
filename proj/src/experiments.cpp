#include "psim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "psim/output.hpp"
#include "psim/scenario_io.hpp"

namespace psim {

using nlohmann::json;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::string scenario_hash(const Scenario& s) { return sha256_hex(serialize_scenario(s)); }

json metadata(const Scenario& s, const RunOptions& opt) {
    json meta;
    meta["generator"] = {{"name", kToolName}, {"version", kToolVersion}};
    meta["input_sha256"] = scenario_hash(s);
    if (opt.seed >= 0) meta["seed"] = opt.seed;
    else meta["seed"] = nullptr;
    return meta;
}

json report_to_json(const NonDemolitionReport& r) {
    return json{{"commutator_norm", r.commutator_norm},
                {"offdiag_up_down", r.offdiag_up_down},
                {"offdiag_down_up", r.offdiag_down_up},
                {"pass", r.pass}};
}

void write_summary(const std::string& out_dir, const json& summary) {
    atomic_write_file(out_dir + "/summary.json", summary.dump(2) + "\n");
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

} // namespace

void cmd_run(const Scenario& s, const RunOptions& opt, const std::string& out_dir) {
    ensure_directory(out_dir);
    std::string hash = scenario_hash(s);

    BranchTrajectory up = evolve_mean_field(0.0, s);
    BranchTrajectory down = evolve_mean_field(kHalfPi, s);
    StateVector phi0 = tensor_product(s.initial_system, s.initial_environment);
    ExactTrajectory exact = evolve_exact(phi0, s);

    int n_amp = std::min(s.total_dim(), 16);
    std::vector<std::string> cols = {"t", "lambda_up", "lambda_down"};
    for (int i = 0; i < n_amp; ++i) {
        cols.push_back("amp" + std::to_string(i) + "_re");
        cols.push_back("amp" + std::to_string(i) + "_im");
    }
    cols.push_back("norm");

    CsvWriter csv(cols, hash);
    for (int k = 0; k < s.time_grid.node_count(); ++k) {
        csv.begin_row();
        csv.add(exact.times[k]);
        csv.add(up.action.lambda[k]);
        csv.add(down.action.lambda[k]);
        for (int i = 0; i < n_amp; ++i) csv.add(cxd(exact.states[k].amplitudes(i)));
        csv.add(exact.states[k].norm());
        csv.end_row();
    }

    std::vector<double> err_up = mean_field_error(0.0, s);
    std::vector<double> err_down = mean_field_error(kHalfPi, s);

    json summary;
    summary["metadata"] = metadata(s, opt);
    summary["lambda_up_final"] = up.action.lambda.back();
    summary["lambda_down_final"] = down.action.lambda.back();
    summary["exact_norm_final"] = exact.states.back().norm();
    summary["branch_norm_final"] = up.states.back().norm();
    summary["non_demolition"] = report_to_json(validate_non_demolition(s));
    summary["mean_field_error_max_up"] = *std::max_element(err_up.begin(), err_up.end());
    summary["mean_field_error_max_down"] = *std::max_element(err_down.begin(), err_down.end());

    atomic_write_file(out_dir + "/timeseries.csv", csv.str());
    write_summary(out_dir, summary);
}

void cmd_branches(const Scenario& s, const RunOptions& opt, const std::string& out_dir) {
    ensure_directory(out_dir);
    std::string hash = scenario_hash(s);
    BranchFamily family = build_branch_family(s, opt.workers);

    CsvWriter csv({"theta", "c_re", "c_im", "quad_weight", "lambda_final", "action_rate"},
                  hash);
    for (size_t i = 0; i < family.branches.size(); ++i) {
        const BranchTrajectory& b = family.branches[i];
        csv.begin_row();
        csv.add(b.theta);
        csv.add(family.profile.weights[i]);
        csv.add(family.profile.quad_weights[i]);
        csv.add(b.action.lambda.back());
        csv.add(b.action.mean_rate());
        csv.end_row();
    }

    json summary;
    summary["metadata"] = metadata(s, opt);
    summary["node_count"] = family.profile.nodes.size();
    summary["quadrature"] = family.profile.quadrature == ThetaQuadrature::gauss_legendre
                                ? "gauss-legendre"
                                : "trapezoid";
    summary["lambda_up_final"] = family.up.action.lambda.back();
    summary["lambda_down_final"] = family.down.action.lambda.back();
    summary["mixing_residual_final"] =
        action_mixing_residual(family, family.times.back());
    summary["non_demolition"] = report_to_json(validate_non_demolition(s));

    atomic_write_file(out_dir + "/branches.csv", csv.str());
    write_summary(out_dir, summary);
}

void cmd_saddle_compare(const Scenario& s, const RunOptions& opt,
                        const std::string& out_dir) {
    ensure_directory(out_dir);
    std::string hash = scenario_hash(s);
    BranchFamily family = build_branch_family(s, opt.workers);

    CsvWriter csv({"t", "dlambda_over_hbar", "fidelity", "norm_ratio", "weight_up_saddle",
                   "weight_up_quadrature", "weight_down_saddle", "weight_down_quadrature",
                   "flag"},
                  hash);

    double degeneracy_floor = 10.0 * s.hbar * std::numeric_limits<double>::epsilon();
    double fidelity_final = std::nan("");
    for (size_t k = 0; k < family.times.size(); ++k) {
        double t = family.times[k];
        double dl = family.delta_lambda(t);
        csv.begin_row();
        csv.add(t);
        csv.add(dl / s.hbar);
        if (std::abs(dl) < degeneracy_floor) {
            for (int c = 0; c < 6; ++c) csv.add("nan");
            csv.add("pre-asymptotic");
            csv.end_row();
            continue;
        }
        SuperposeResult quad = superpose_branches(family, t);
        StateVector saddle = saddle_point_state(family, t);
        double fid = fidelity(saddle, quad.state, true);
        double norm_ratio = saddle.norm() / quad.norm;
        // weights of the normalized states on the two pointer branches
        auto weights = [&](const StateVector& psi) {
            double nn = psi.norm();
            double wu = std::norm(inner_product(family.up.states[k], psi)) / (nn * nn);
            double wd = std::norm(inner_product(family.down.states[k], psi)) / (nn * nn);
            return std::pair<double, double>{wu, wd};
        };
        auto [wu_s, wd_s] = weights(saddle);
        auto [wu_q, wd_q] = weights(quad.state);
        csv.add(fid);
        csv.add(norm_ratio);
        csv.add(wu_s);
        csv.add(wu_q);
        csv.add(wd_s);
        csv.add(wd_q);
        csv.add(std::abs(dl) / s.hbar < 1.0 ? std::string("pre-asymptotic") : std::string(""));
        csv.end_row();
        if (k + 1 == family.times.size()) fidelity_final = fid;
    }

    json summary;
    summary["metadata"] = metadata(s, opt);
    summary["node_count"] = family.profile.nodes.size();
    summary["delta_lambda_final_over_hbar"] =
        family.delta_lambda(family.times.back()) / s.hbar;
    if (std::isfinite(fidelity_final)) summary["fidelity_final"] = fidelity_final;
    else summary["fidelity_final"] = nullptr;

    atomic_write_file(out_dir + "/saddle_vs_quadrature.csv", csv.str());
    write_summary(out_dir, summary);
}

void cmd_orthogonality(const Scenario& s, const RunOptions& opt,
                       const std::string& out_dir) {
    ensure_directory(out_dir);
    std::string hash = scenario_hash(s);

    const std::vector<double> thetas = {0.0, kHalfPi / 4.0, kHalfPi / 2.0,
                                        3.0 * kHalfPi / 4.0, kHalfPi};
    std::vector<BranchTrajectory> trajs;
    trajs.reserve(thetas.size());
    for (double th : thetas) trajs.push_back(evolve_mean_field(th, s));

    CsvWriter csv({"theta_a", "theta_b", "T", "abs_overlap_at_T", "abs_running_average",
                   "sinc_prediction", "abs_difference"},
                  hash);

    int steps = s.time_grid.steps;
    int stride = std::max(1, steps / 64);
    double max_diff = 0.0;
    for (size_t i = 0; i < thetas.size(); ++i) {
        for (size_t j = i + 1; j < thetas.size(); ++j) {
            const BranchTrajectory& a = trajs[i];
            const BranchTrajectory& b = trajs[j];
            double cosd = std::cos(a.theta - b.theta);
            double dlam = a.action.mean_rate() - b.action.mean_rate();
            // running average of the instantaneous overlap
            std::vector<cxd> overlap(a.states.size());
            for (size_t k = 0; k < a.states.size(); ++k)
                overlap[k] = inner_product(a.states[k], b.states[k]);
            std::vector<cxd> avg = time_average(overlap, a.action.times);
            for (int k = stride; k <= steps; k += stride) {
                double T = a.action.times[k] - a.action.times[0];
                double measured = std::abs(avg[k]);
                double predicted = std::abs(cosd * sinc(dlam * T / (2.0 * s.hbar)));
                double diff = std::abs(measured - predicted);
                max_diff = std::max(max_diff, diff);
                csv.begin_row();
                csv.add(a.theta);
                csv.add(b.theta);
                csv.add(T);
                csv.add(std::abs(overlap[k]));
                csv.add(measured);
                csv.add(predicted);
                csv.add(diff);
                csv.end_row();
            }
        }
    }

    json summary;
    summary["metadata"] = metadata(s, opt);
    summary["max_abs_difference"] = max_diff;
    summary["theta_nodes"] = thetas;

    atomic_write_file(out_dir + "/overlap.csv", csv.str());
    write_summary(out_dir, summary);
}

void cmd_decoherence(const Scenario& s, const RunOptions& opt, const std::string& out_dir) {
    ensure_directory(out_dir);
    std::string hash = scenario_hash(s);
    BranchFamily family = build_branch_family(s, opt.workers);
    DecoherenceReport report = decoherence_report(family, s);

    CsvWriter csv({"t", "r_re", "r_im", "abs_r", "avg_re", "avg_im", "abs_avg",
                   "coherence_magnitude"},
                  hash);
    for (size_t k = 0; k < report.times.size(); ++k) {
        csv.begin_row();
        csv.add(report.times[k]);
        csv.add(report.factor[k]);
        csv.add(std::abs(report.factor[k]));
        csv.add(report.averaged_factor[k]);
        csv.add(std::abs(report.averaged_factor[k]));
        csv.add(report.coherence_magnitude[k]);
        csv.end_row();
    }

    json summary;
    summary["metadata"] = metadata(s, opt);
    auto tau_or_null = [](double v) {
        return std::isfinite(v) ? json(v) : json(nullptr);
    };
    summary["tau_estimate"] = tau_or_null(report.taus.tau_estimate);
    summary["tau_single_rate"] = tau_or_null(report.taus.tau_single_rate);
    summary["tau_measured"] = tau_or_null(report.taus.tau_measured);
    summary["half_crossing_threshold"] = 0.5;

    atomic_write_file(out_dir + "/decoherence.csv", csv.str());
    write_summary(out_dir, summary);
}

void cmd_validate(const Scenario& s, const RunOptions& opt, const std::string& out_dir) {
    ensure_directory(out_dir);
    json summary;
    summary["metadata"] = metadata(s, opt);
    summary["non_demolition"] = report_to_json(validate_non_demolition(s));
    summary["system_dim"] = 2;
    summary["environment_dim"] = s.environment_dim();
    summary["mode"] = s.interaction.mode == InteractionMode::phase ? "phase" : "bath";
    summary["hbar"] = s.hbar;
    write_summary(out_dir, summary);
}

namespace {

struct SweepRow {
    std::vector<std::string> values; // one per grid key, rendered
    std::vector<std::string> overrides;
    double tau_estimate = std::nan("");
    double tau_measured = std::nan("");
    double mf_error_max = std::nan("");
    double saddle_fidelity_final = std::nan("");
    std::string status = "ok";
    std::string message;
};

void run_sweep_row(const std::string& base_document, SweepRow& row) {
    try {
        std::string doc = apply_overrides(base_document, row.overrides);
        Scenario s = load_scenario(doc);
        BranchFamily family = build_branch_family(s, 1);
        try {
            DecoherenceTimes taus = decoherence_time(family);
            row.tau_estimate = taus.tau_estimate;
            row.tau_measured = taus.tau_measured;
        } catch (const Error&) {
            // leave taus as nan (no crossing or degenerate rates)
        }
        std::vector<double> err_up = mean_field_error(0.0, s);
        std::vector<double> err_down = mean_field_error(kHalfPi, s);
        row.mf_error_max = std::max(*std::max_element(err_up.begin(), err_up.end()),
                                    *std::max_element(err_down.begin(), err_down.end()));
        try {
            double t_end = family.times.back();
            StateVector saddle = saddle_point_state(family, t_end);
            SuperposeResult quad = superpose_branches(family, t_end);
            row.saddle_fidelity_final = fidelity(saddle, quad.state, true);
        } catch (const Error&) {
        }
    } catch (const Error& e) {
        row.status = "error:" + std::to_string(static_cast<int>(e.code()));
        row.message = e.what();
    } catch (const std::exception& e) {
        row.status = "error:9";
        row.message = e.what();
    }
}

} // namespace

SweepOutcome cmd_sweep(const std::string& base_document,
                       const std::vector<std::string>& grid_specs, const RunOptions& opt,
                       const std::string& out_dir) {
    if (grid_specs.empty())
        raise_validation("sweep requires at least one --grid path=v1,v2,...");

    std::vector<std::string> keys;
    std::vector<std::vector<std::string>> values;
    for (const std::string& spec : grid_specs) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            raise_validation("grid spec '" + spec + "': expected path=v1,v2,...");
        keys.push_back(spec.substr(0, eq));
        std::vector<std::string> vs;
        std::string rest = spec.substr(eq + 1);
        size_t pos = 0;
        while (pos <= rest.size()) {
            size_t comma = rest.find(',', pos);
            std::string v = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
            if (v.empty()) raise_validation("grid spec '" + spec + "': empty value");
            vs.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        values.push_back(std::move(vs));
    }

    // cartesian product, first key slowest
    size_t total = 1;
    for (const auto& vs : values) total *= vs.size();
    std::vector<SweepRow> rows;
    rows.reserve(total);
    for (size_t r = 0; r < total; ++r) {
        SweepRow row;
        size_t block = total;
        for (size_t k = 0; k < keys.size(); ++k) {
            block /= values[k].size();
            size_t pick = (r / block) % values[k].size();
            row.values.push_back(values[k][pick]);
            row.overrides.push_back(keys[k] + "=" + values[k][pick]);
        }
        rows.push_back(std::move(row));
    }

    int nw = std::max(1, opt.workers);
    if (nw == 1 || rows.size() < 2) {
        for (SweepRow& row : rows) run_sweep_row(base_document, row);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                for (size_t k = next.fetch_add(1); k < rows.size(); k = next.fetch_add(1))
                    run_sweep_row(base_document, rows[k]);
            });
        for (auto& th : pool) th.join();
    }

    ensure_directory(out_dir);
    std::string hash = sha256_hex(base_document);
    std::vector<std::string> cols = {"index"};
    for (const std::string& k : keys) cols.push_back(k);
    cols.insert(cols.end(), {"tau_estimate", "tau_measured", "mean_field_error_max",
                             "saddle_fidelity_final", "status"});
    CsvWriter csv(cols, hash);
    SweepOutcome outcome;
    json messages = json::array();
    for (size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& row = rows[i];
        csv.begin_row();
        csv.add(static_cast<double>(i));
        for (const std::string& v : row.values) csv.add(v);
        csv.add(row.tau_estimate);
        csv.add(row.tau_measured);
        csv.add(row.mf_error_max);
        csv.add(row.saddle_fidelity_final);
        csv.add(row.status);
        csv.end_row();
        if (row.status == "ok") ++outcome.rows_ok;
        else {
            ++outcome.rows_failed;
            messages.push_back({{"index", i}, {"status", row.status}, {"message", row.message}});
        }
    }

    json summary;
    summary["metadata"] = {{"generator", {{"name", kToolName}, {"version", kToolVersion}}},
                           {"input_sha256", hash}};
    if (opt.seed >= 0) summary["metadata"]["seed"] = opt.seed;
    else summary["metadata"]["seed"] = nullptr;
    summary["rows_total"] = rows.size();
    summary["rows_ok"] = outcome.rows_ok;
    summary["rows_failed"] = outcome.rows_failed;
    summary["failures"] = messages;

    atomic_write_file(out_dir + "/sweep.csv", csv.str());
    write_summary(out_dir, summary);

    if (outcome.rows_ok == 0)
        raise(ErrorCode::sweep_failed, "every sweep grid point failed");
    return outcome;
}

} // namespace psim
