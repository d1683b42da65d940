// fuelctl: command-line front end for the finite-fuel control solver.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fuelctl/pipeline.hpp"

using namespace fuelctl;

namespace {

constexpr int kConfigError = 1;
constexpr int kTimeout = 2;

struct Overrides {
    std::string output_dir;
    std::optional<std::int64_t> max_iterations;
    std::optional<double> epsilon;
};

ProblemFile load(const std::string& path, const Overrides& o) {
    auto file = load_problem_file(path);
    if (!o.output_dir.empty()) file.output_dir = o.output_dir;
    if (o.max_iterations) {
        if (*o.max_iterations < 1) throw ConfigError(0, "max_iterations", "must be >= 1");
        file.max_iterations = *o.max_iterations;
    }
    if (o.epsilon) {
        if (!(*o.epsilon > 0.0)) throw ConfigError(0, "epsilon", "must be positive");
        file.epsilon = *o.epsilon;
    }
    return file;
}

void add_common(CLI::App* cmd, std::string& path, Overrides& o) {
    cmd->add_option("problem-file", path, "key = value problem description")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output-dir", o.output_dir, "override output_dir");
    cmd->add_option("--max-iterations", o.max_iterations, "override max_iterations");
    cmd->add_option("--epsilon", o.epsilon, "override the relative stopping tolerance");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-fuel exit-time control: monotone HJB solver, policies and Monte-Carlo checks"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "no progress or summaries");

    std::string path;
    Overrides overrides;

    auto* solve_cmd = app.add_subcommand("solve", "psi -> g -> solve -> policy -> regions -> CSV export");
    add_common(solve_cmd, path, overrides);

    auto* psi_cmd = app.add_subcommand("psi", "no-fuel boundary data only");
    add_common(psi_cmd, path, overrides);

    auto* inf_cmd = app.add_subcommand("infinite-fuel", "infinite-fuel companion problem");
    add_common(inf_cmd, path, overrides);

    auto* validate_cmd = app.add_subcommand("validate", "Monte-Carlo comparison of v_h with simulated rewards");
    add_common(validate_cmd, path, overrides);
    std::optional<std::int64_t> paths;
    std::optional<double> dt;
    std::optional<double> t_max;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> starts;
    validate_cmd->add_option("--paths", paths, "paths per start point");
    validate_cmd->add_option("--dt", dt, "Euler-Maruyama time step");
    validate_cmd->add_option("--seed", seed, "random seed");
    validate_cmd->add_option("--t-max", t_max, "horizon cap");
    validate_cmd->add_option("--start", starts, "start point 'x:y' (tracking 'x1,x2:y'); repeatable");

    auto* repro_cmd = app.add_subcommand("reproduce", "emit the CSVs behind a figure (fig1..fig7)");
    std::string figure;
    std::string repro_dir = "reproduce";
    bool desk = false;
    bool paper = false;
    repro_cmd->add_option("figure", figure, "fig1..fig7")->required();
    repro_cmd->add_flag("--desk-scale", desk, "desk-scale grids (default)");
    repro_cmd->add_flag("--paper-scale", paper, "the paper's grids (slow)");
    repro_cmd->add_option("-o,--output-dir", repro_dir, "output root");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kConfigError;
    }

    RunContext ctx;
    ctx.log = quiet ? nullptr : &std::cout;
    ctx.progress = !quiet;

    try {
        if (*solve_cmd) return command_solve(load(path, overrides), ctx);
        if (*psi_cmd) return command_psi(load(path, overrides), ctx);
        if (*inf_cmd) return command_infinite_fuel(load(path, overrides), ctx);
        if (*validate_cmd) {
            auto file = load(path, overrides);
            if (paths) file.mc.paths = *paths;
            if (dt) file.mc.dt = *dt;
            if (t_max) file.mc.t_max = *t_max;
            if (seed) file.mc.seed = *seed;
            if (!starts.empty()) {
                std::string joined;
                for (const auto& s : starts) joined += s + ";";
                // Re-parse through the problem-file reader for identical validation.
                const auto extra = parse_problem_file(std::string("family = ") +
                                                      (file.family == Family::tracking ? "tracking" : "correction") +
                                                      "\nmc_starts = " + joined + "\n");
                file.mc.starts = extra.mc.starts;
            }
            return command_validate(file, ctx);
        }
        if (*repro_cmd) {
            if (desk && paper) throw ConfigError(0, "scale", "choose one of --desk-scale and --paper-scale");
            return command_reproduce(figure, paper ? Scale::paper : Scale::desk, repro_dir, ctx);
        }
    } catch (const TimeoutError& e) {
        std::cerr << "fuelctl: timeout: " << e.what() << " (partial results exported)\n";
        return kTimeout;
    } catch (const std::exception& e) {
        std::cerr << "fuelctl: error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}
