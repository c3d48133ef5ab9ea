// pointer-sim: scenario-driven experiments on mean-field branch dynamics,
// stationary-phase pointer selection and decoherence observables.
//
// Usage: pointer-sim <command> --scenario <path> --out <dir>
//                    [--set key=value]... [--workers N] [--seed S]
//        pointer-sim sweep ... --grid path=v1,v2,...

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pointer_sim.h"

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    int workers = 1;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario document (JSON)")
        ->required();
    cmd->add_option("--out", args.out_dir, "Output directory")->required();
    cmd->add_option("--set", args.overrides,
                    "Override a scenario field, e.g. --set interaction.coupling=2");
    cmd->add_option("--workers", args.workers, "Worker threads for independent subtasks");
    cmd->add_option("--seed", args.seed, "Seed recorded in output metadata");
}

int fail(ps_status status) {
    std::fprintf(stderr, "pointer-sim: error: %s\n", ps_last_error());
    return static_cast<int>(status);
}

std::vector<const char*> c_strings(const std::vector<std::string>& items) {
    std::vector<const char*> out;
    out.reserve(items.size());
    for (const auto& s : items) out.push_back(s.c_str());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"state-vector decoherence laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ps_version()));

    CommonArgs args;
    std::vector<std::string> grid_specs;

    CLI::App* cmd_run = app.add_subcommand("run", "Pointer-branch and exact time series");
    CLI::App* cmd_branches =
        app.add_subcommand("branches", "Per-branch actions across the theta grid");
    CLI::App* cmd_saddle = app.add_subcommand(
        "saddle-compare", "Stationary-phase state vs direct theta quadrature");
    CLI::App* cmd_orth =
        app.add_subcommand("orthogonality", "Windowed branch overlaps vs the sinc law");
    CLI::App* cmd_deco =
        app.add_subcommand("decoherence", "Decoherence factor, running average, taus");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "Parameter grid of scenario runs");
    CLI::App* cmd_validate =
        app.add_subcommand("validate", "Non-demolition checks, report only");
    for (CLI::App* cmd :
         {cmd_run, cmd_branches, cmd_saddle, cmd_orth, cmd_deco, cmd_sweep, cmd_validate})
        add_common(cmd, args);
    cmd_sweep->add_option("--grid", grid_specs,
                          "Grid axis as path=v1,v2,... (repeat for a cartesian product)");

    CLI11_PARSE(app, argc, argv);

    ps_scenario* scenario = nullptr;
    auto overrides = c_strings(args.overrides);
    ps_status st = ps_scenario_load_file(args.scenario_path.c_str(),
                                         overrides.empty() ? nullptr : overrides.data(),
                                         overrides.size(), &scenario);
    if (st != PS_OK) return fail(st);

    ps_run_options options{};
    options.workers = args.workers;
    options.seed = args.seed;

    if (cmd_validate->parsed()) {
        ps_nondemolition_report report{};
        st = ps_validate_non_demolition(scenario, &report);
        if (st == PS_OK) {
            std::printf("non-demolition: %s\n", report.pass ? "pass" : "fail");
            std::printf("  commutator_norm  = %.6g\n", report.commutator_norm);
            std::printf("  offdiag_up_down  = %.6g\n", report.offdiag_up_down);
            std::printf("  offdiag_down_up  = %.6g\n", report.offdiag_down_up);
            st = ps_cmd_validate(scenario, &options, args.out_dir.c_str());
        }
    } else if (cmd_run->parsed()) {
        st = ps_cmd_run(scenario, &options, args.out_dir.c_str());
    } else if (cmd_branches->parsed()) {
        st = ps_cmd_branches(scenario, &options, args.out_dir.c_str());
    } else if (cmd_saddle->parsed()) {
        st = ps_cmd_saddle_compare(scenario, &options, args.out_dir.c_str());
    } else if (cmd_orth->parsed()) {
        st = ps_cmd_orthogonality(scenario, &options, args.out_dir.c_str());
    } else if (cmd_deco->parsed()) {
        st = ps_cmd_decoherence(scenario, &options, args.out_dir.c_str());
    } else if (cmd_sweep->parsed()) {
        auto grids = c_strings(grid_specs);
        st = ps_cmd_sweep(scenario, grids.empty() ? nullptr : grids.data(), grids.size(),
                          &options, args.out_dir.c_str());
    }

    ps_scenario_free(scenario);
    if (st != PS_OK) return fail(st);
    return 0;
}
