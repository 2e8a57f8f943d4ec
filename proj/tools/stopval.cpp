#include <CLI11.hpp>

#include "stopval/cli.hpp"
#include "stopval/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Solver for Bayesian sequential stopping problems with costly information"};
    app.set_version_flag("--version", stopval::kLibraryVersion);
    app.require_subcommand(1);

    std::string config_path, config_t_path, out_path, example_id, out_dir = ".";
    stopval::cli::Overrides overrides;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::uint64_t trials = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--tol", tol, "override the solver tolerance");
    };
    auto collect = [&](CLI::App* cmd) {
        if (cmd->count("--seed")) overrides.seed = seed;
        if (cmd->count("--tol")) overrides.tol = tol;
        if (cmd->count("--trials")) overrides.trials = trials;
    };

    CLI::App* solve = app.add_subcommand("solve", "value functions, thresholds and policy");
    solve->add_option("--config", config_path, "problem config (JSON)")->required();
    solve->add_option("--out", out_path, "output CSV path")->required();
    add_common(solve);

    CLI::App* voi = app.add_subcommand("value-of-info",
                                       "upfront value of the information structure");
    voi->add_option("--config", config_path, "problem config (JSON)")->required();
    add_common(voi);

    CLI::App* compare = app.add_subcommand("compare",
                                           "rank two structures and compare policies");
    compare->add_option("--config", config_path, "first problem config")->required();
    compare->add_option("--config-t", config_t_path, "second problem config")->required();
    compare->add_option("--out", out_path, "optional CSV path for the threshold table");
    add_common(compare);

    CLI::App* stime = app.add_subcommand("stopping-time",
                                         "stopping-time distribution under the optimal policy");
    stime->add_option("--config", config_path, "problem config (JSON)")->required();
    stime->add_option("--out", out_path, "output CSV path")->required();
    stime->add_option("--trials", trials, "Monte Carlo trials (0 = exact only)");
    add_common(stime);

    CLI::App* repro = app.add_subcommand("reproduce", "run a bundled scenario end to end");
    repro->add_option("id", example_id, "example1|example2|example4|example5")->required();
    repro->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) {
        collect(solve);
        return stopval::cli::cmd_solve(config_path, out_path, overrides);
    }
    if (voi->parsed()) {
        collect(voi);
        return stopval::cli::cmd_value_of_info(config_path, overrides);
    }
    if (compare->parsed()) {
        collect(compare);
        return stopval::cli::cmd_compare(config_path, config_t_path, out_path, overrides);
    }
    if (stime->parsed()) {
        collect(stime);
        return stopval::cli::cmd_stopping_time(config_path, out_path, overrides);
    }
    if (repro->parsed()) return stopval::cli::cmd_reproduce(example_id, out_dir);
    return 1;
}
