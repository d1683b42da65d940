#include "fuelctl/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace fuelctl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Shortest round-trip form, for log lines and labels (CSV output keeps 17 digits).
std::string brief(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

SolveOptions options_for(const ProblemFile& file, const RunContext& ctx, const char* label) {
    auto opts = file.solve_options();
    if (ctx.progress && ctx.log != nullptr) {
        std::ostream* log = ctx.log;
        opts.progress = [log, label](std::int64_t it, double gap) {
            *log << "  [" << label << "] iteration " << it << "  gap " << gap << "\n" << std::flush;
        };
    }
    return opts;
}

void say(const RunContext& ctx, const std::string& text) {
    if (ctx.log != nullptr) *ctx.log << text << "\n" << std::flush;
}

json constants_json(const SchemeConstants& c) {
    return {{"K_h", c.K_h}, {"rho", c.rho}, {"gamma", c.gamma}, {"beta_prime", c.beta_prime}};
}

json report_json(const SolveReport& r) {
    return {{"iterations", r.iterations},       {"final_gap", r.final_gap},
            {"converged", r.converged},         {"monotone", r.monotone},
            {"max_violation", r.max_violation}, {"wall_time_s", r.wall_time.count()},
            {"constants", constants_json(r.constants)}};
}

json parameters_json(const ProblemFile& file) {
    json params = json::object();
    const auto text = to_text(file);
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) params[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return params;
}

json grid_json(const Grid2& g) {
    return {{"type", "grid2"}, {"I", g.I()}, {"J", g.J()}, {"h1", g.h1()}, {"h2", g.h2()}, {"nodes", g.size()}};
}

json grid_json(const Grid3& g) {
    return {{"type", "grid3"},        {"m", g.m()},       {"K", g.K()},
            {"h", g.h1()},            {"h3", g.h3()},     {"sum_bound", g.sum_bound()},
            {"rows", g.rows()},       {"nodes", g.size()}, {"active_nodes", g.active_count()}};
}

/// Collects written files and the manifest for one output directory.
class Output {
public:
    Output(fs::path dir, std::string command, const ProblemFile* file) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
        manifest_["command"] = std::move(command);
        if (file != nullptr) {
            manifest_["family"] = file->family == Family::correction ? "correction" : "tracking";
            manifest_["parameters"] = parameters_json(*file);
            manifest_["seed"] = file->mc.seed;
            std::ofstream(dir_ / "problem.txt") << to_text(*file);
            files_.push_back("problem.txt");
        }
    }

    void csv(const std::string& name, const CsvTable& table) {
        write_csv(dir_ / name, table);
        files_.push_back(name);
    }

    json& manifest() { return manifest_; }

    void finish() {
        manifest_["files"] = files_;
        std::ofstream out(dir_ / "manifest.json");
        out << manifest_.dump(2) << "\n";
        if (!out) throw IoError("cannot write " + (dir_ / "manifest.json").string());
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    json manifest_;
    std::vector<std::string> files_;
};

std::string k_label(double k) { return "k" + brief(k); }

/// Keep only the fuel layer nearest `y`.
RegionSet layer_slice(const RegionSet& set, int layer) {
    RegionSet out = set;
    out.slices.clear();
    for (const auto& s : set.slices) {
        if (s.layer == layer) out.slices.push_back(s);
    }
    return out;
}

CsvTable layer_table(const Grid3& grid, std::span<const double> values, int layer, const std::string& name) {
    CsvTable t;
    t.header = {"x1", "x2", "y", "z1", "z2", name};
    const std::size_t begin = static_cast<std::size_t>(layer) * grid.layer_stride();
    for (std::size_t n = begin; n < begin + grid.layer_stride(); ++n) {
        if (grid.kind(n) == NodeKind::inactive) continue;
        const auto [i, j, k] = grid.node(n);
        const double x1 = grid.x1(i);
        const double x2 = grid.x2(j);
        t.rows.push_back({x1, x2, grid.y(k), Grid3::z1(x1, x2), Grid3::z2(x1, x2), values[n]});
    }
    return t;
}

CsvTable validation_table(const std::vector<ValidationRow>& rows, const MCConfig& config, bool tracking) {
    CsvTable t;
    t.header = tracking ? std::vector<std::string>{"start", "x1", "x2", "y"} : std::vector<std::string>{"start", "x", "y"};
    for (const char* c : {"v_h", "mc_mean", "std_error", "tolerance", "exit_fraction", "fuel_exhausted_fraction",
                          "pass", "seed", "paths", "dt", "t_max"}) {
        t.header.emplace_back(c);
    }
    for (std::size_t s = 0; s < rows.size(); ++s) {
        const auto& r = rows[s];
        std::vector<double> row{static_cast<double>(s)};
        row.insert(row.end(), r.start.x.begin(), r.start.x.end());
        row.insert(row.end(), {r.start.y, r.v_h, r.estimate.mean, r.estimate.std_error, r.tolerance,
                               r.estimate.exit_fraction, r.estimate.fuel_exhausted_fraction, r.pass ? 1.0 : 0.0,
                               static_cast<double>(config.seed), static_cast<double>(config.paths), config.dt,
                               config.t_max});
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------

CorrectionRun run_correction(const ProblemFile& file, const RunContext& ctx) {
    CorrectionProblem problem(file.correction);
    const Grid2 grid = file.grid2();
    auto psi = solve_psi_correction(problem, grid);
    auto g = build_boundary_g(psi, grid);
    const LineScheme scheme(problem, grid, g);
    say(ctx, "solving correction problem k=" + brief(problem.k()) + " on " + std::to_string(grid.nx()) + "x" +
                 std::to_string(grid.layers()) + " nodes, K_h=" + brief(scheme.constants().K_h));
    auto report = solve(scheme, options_for(file, ctx, "value"));
    say(ctx, "converged after " + std::to_string(report.iterations) + " iterations, gap " +
                 brief(report.final_gap));
    auto policy = extract_policy(scheme, report);
    auto regions = no_action_regions(policy, grid);
    return {problem, grid, std::move(psi), std::move(g), std::move(report), std::move(policy), std::move(regions)};
}

TrackingRun run_tracking(const ProblemFile& file, const RunContext& ctx) {
    TrackingProblem problem(file.tracking);
    const Grid3 grid = file.grid3();
    say(ctx, "tracking problem k=" + brief(problem.k()) + ": " + std::to_string(grid.active_count()) +
                 " active nodes");
    auto faces = solve_face_data(problem, grid, file.face_data, options_for(file, ctx, "faces"));
    auto psi = solve_psi_tracking(problem, grid);
    auto g = build_boundary_g(psi, grid, faces);
    const TrackingScheme scheme(problem, grid, g);
    auto report = solve(scheme, options_for(file, ctx, "value"));
    say(ctx, "converged after " + std::to_string(report.iterations) + " iterations, gap " +
                 brief(report.final_gap));
    auto policy = extract_policy(scheme, report);
    auto regions = no_action_regions(policy, grid);
    return {problem,         grid,           std::move(psi),    std::move(faces),
            std::move(g),    std::move(report), std::move(policy), std::move(regions)};
}

InfiniteCorrectionRun run_infinite_correction(const ProblemFile& file, const RunContext& ctx) {
    CorrectionProblem problem(file.correction);
    const Grid2 grid = Grid2::spatial(problem.l(), file.grid_x / 2);
    auto report = solve_infinite_fuel(problem, grid, options_for(file, ctx, "infinite fuel"));
    const LineScheme scheme(problem, grid, MeshFunction(grid.size(), 0.0));
    auto policy = extract_policy(scheme, report);
    auto regions = no_action_regions(policy, grid);
    return {grid, std::move(report), std::move(policy), std::move(regions)};
}

InfiniteTrackingRun run_infinite_tracking(const ProblemFile& file, const RunContext& ctx) {
    TrackingProblem problem(file.tracking);
    const Grid3 grid = Grid3::spatial(problem.l(), problem.x_max(), file.grid_across / 2);
    const auto opts = options_for(file, ctx, "infinite fuel");
    auto faces = solve_face_data(problem, grid, file.face_data, opts);
    auto report = solve_infinite_fuel(problem, grid, faces, opts);
    const auto psi = solve_psi_tracking(problem, grid);
    const TrackingScheme scheme(problem, grid, build_boundary_g(psi, grid, faces));
    auto policy = extract_policy(scheme, report);
    auto regions = no_action_regions(policy, grid);
    return {grid, std::move(faces), std::move(report), std::move(policy), std::move(regions)};
}

double value_at(const Grid2& grid, const MeshFunction& v, double x, double y) {
    const int I = grid.I();
    const double u = std::clamp(x / grid.h1() + I, 0.0, static_cast<double>(2 * I));
    const int i0 = std::min(static_cast<int>(std::floor(u)), 2 * I - 1);
    const double wu = u - i0;
    if (!grid.has_fuel_axis()) {
        return (1.0 - wu) * v[static_cast<std::size_t>(i0)] + wu * v[static_cast<std::size_t>(i0 + 1)];
    }
    const double w = std::clamp(y / grid.h2(), 0.0, static_cast<double>(grid.J()));
    const int j0 = std::min(static_cast<int>(std::floor(w)), grid.J() - 1);
    const double ww = w - j0;
    auto at = [&](int di, int dj) { return v[grid.index(i0 + di - I, j0 + dj)]; };
    return (1.0 - ww) * ((1.0 - wu) * at(0, 0) + wu * at(1, 0)) + ww * ((1.0 - wu) * at(0, 1) + wu * at(1, 1));
}

double value_at(const Grid3& grid, const MeshFunction& v, double x1, double x2, double y) {
    const double h = grid.h1();
    const int m = grid.m();
    const int i = static_cast<int>(std::lround(x1 / h));
    const int j = static_cast<int>(std::lround(x2 / h));
    int d = std::clamp(i - j, -m, m);
    const int s = std::clamp(i + j, -grid.sum_bound(), grid.sum_bound());
    if ((s + d) % 2 != 0) d += d > 0 ? -1 : 1;
    int k = 0;
    if (grid.has_fuel_axis()) k = std::clamp(static_cast<int>(std::lround(y / grid.h3())), 0, grid.K());
    return v[grid.index((s + d) / 2, (s - d) / 2, k)];
}

namespace {

template <class Run, class ValueAt>
std::vector<ValidationRow> compare(const Run& run, const MCConfig& config,
                                   const std::vector<MCEstimate>& estimates, ValueAt value) {
    std::vector<ValidationRow> rows;
    const double bias = horizon_bias_bound(run.problem.beta(), config.t_max);
    for (std::size_t s = 0; s < estimates.size(); ++s) {
        ValidationRow r;
        r.start = config.starts[s];
        r.v_h = value(r.start);
        r.estimate = estimates[s];
        r.tolerance = std::max(3.0 * r.estimate.std_error, 0.05 * r.v_h) + bias;
        r.pass = std::abs(r.estimate.mean - r.v_h) <= r.tolerance;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

std::vector<ValidationRow> compare_with_mc(const CorrectionRun& run, const MCConfig& config) {
    const auto estimates = simulate_policy(run.problem, run.grid, run.policy, run.psi, config);
    return compare(run, config, estimates,
                   [&](const StartPoint& s) { return value_at(run.grid, run.report.v_h, s.x[0], s.y); });
}

std::vector<ValidationRow> compare_with_mc(const TrackingRun& run, const MCConfig& config) {
    const auto estimates = simulate_policy(run.problem, run.grid, run.policy, run.psi, config);
    return compare(run, config, estimates,
                   [&](const StartPoint& s) { return value_at(run.grid, run.report.v_h, s.x[0], s.x[1], s.y); });
}

// ---------------------------------------------------------------------------
// Commands

namespace {

/// Export the envelopes of a timed-out solve, then rethrow.
template <class GridT>
[[noreturn]] void export_partial(Output& out, const GridT& grid, const TimeoutError& e) {
    const auto& r = e.report();
    out.csv("value.csv", mesh_table(grid, r.v_h.values()));
    out.csv("lower.csv", mesh_table(grid, r.v_lower.values(), "v_lower"));
    out.csv("upper.csv", mesh_table(grid, r.v_upper.values(), "v_upper"));
    out.manifest()["grid"] = grid_json(grid);
    out.manifest()["solve"] = report_json(r);
    out.manifest()["timeout"] = true;
    out.finish();
    throw e;
}

}  // namespace

int command_solve(const ProblemFile& file, const RunContext& ctx) {
    Output out(file.output_dir, "solve", &file);
    if (file.family == Family::correction) {
        CorrectionRun run = [&] {
            try {
                return run_correction(file, ctx);
            } catch (const TimeoutError& e) {
                export_partial(out, file.grid2(), e);
            }
        }();
        out.csv("psi.csv", psi_table(run.grid, run.psi));
        out.csv("value.csv", mesh_table(run.grid, run.report.v_h.values()));
        out.csv("policy.csv", mesh_table(run.grid, run.policy.a_star, "a_star"));
        out.csv("regions.csv", regions_table(run.regions));
        out.csv("switching.csv", switching_table(run.regions));
        out.manifest()["grid"] = grid_json(run.grid);
        out.manifest()["solve"] = report_json(run.report);
    } else {
        TrackingRun run = [&] {
            try {
                return run_tracking(file, ctx);
            } catch (const TimeoutError& e) {
                export_partial(out, file.grid3(), e);
            }
        }();
        out.csv("psi.csv", psi_table(run.grid, run.psi));
        out.csv("value.csv", mesh_table(run.grid, run.report.v_h.values()));
        out.csv("policy.csv", mesh_table(run.grid, run.policy.a_star, "a_star"));
        out.csv("regions.csv", regions_table(run.regions));
        out.csv("switching.csv", switching_table(switching_curves(run.policy, run.grid, true)));
        out.manifest()["grid"] = grid_json(run.grid);
        out.manifest()["solve"] = report_json(run.report);
        out.manifest()["face_data"] = file.face_data == FaceData::Mode::reduced ? "reduced" : "psi";
    }
    out.finish();
    say(ctx, "wrote " + out.dir().string());
    return 0;
}

int command_psi(const ProblemFile& file, const RunContext& ctx) {
    Output out(file.output_dir, "psi", &file);
    if (file.family == Family::correction) {
        const CorrectionProblem problem(file.correction);
        const auto grid = file.grid2();
        out.csv("psi.csv", psi_table(grid, solve_psi_correction(problem, grid)));
        out.manifest()["grid"] = grid_json(grid);
    } else {
        const TrackingProblem problem(file.tracking);
        const auto grid = file.grid3();
        out.csv("psi.csv", psi_table(grid, solve_psi_tracking(problem, grid)));
        out.manifest()["grid"] = grid_json(grid);
    }
    out.finish();
    say(ctx, "wrote " + out.dir().string());
    return 0;
}

int command_infinite_fuel(const ProblemFile& file, const RunContext& ctx) {
    Output out(file.output_dir, "infinite-fuel", &file);
    if (file.family == Family::correction) {
        const auto run = run_infinite_correction(file, ctx);
        out.csv("value.csv", mesh_table(run.grid, run.report.v_h.values()));
        out.csv("policy.csv", mesh_table(run.grid, run.policy.a_star, "a_star"));
        out.csv("switching.csv", switching_table(run.regions));
        out.manifest()["grid"] = grid_json(run.grid);
        out.manifest()["solve"] = report_json(run.report);
    } else {
        const auto run = run_infinite_tracking(file, ctx);
        out.csv("value.csv", mesh_table(run.grid, run.report.v_h.values()));
        out.csv("policy.csv", mesh_table(run.grid, run.policy.a_star, "a_star"));
        out.csv("switching.csv", switching_table(switching_curves(run.policy, run.grid, true)));
        out.manifest()["grid"] = grid_json(run.grid);
        out.manifest()["solve"] = report_json(run.report);
    }
    out.finish();
    say(ctx, "wrote " + out.dir().string());
    return 0;
}

int command_validate(const ProblemFile& file, const RunContext& ctx) {
    Output out(file.output_dir, "validate", &file);
    std::vector<ValidationRow> rows;
    const bool tracking = file.family == Family::tracking;
    if (tracking) {
        const auto run = run_tracking(file, ctx);
        rows = compare_with_mc(run, file.mc);
        out.manifest()["grid"] = grid_json(run.grid);
        out.manifest()["solve"] = report_json(run.report);
    } else {
        const auto run = run_correction(file, ctx);
        rows = compare_with_mc(run, file.mc);
        out.manifest()["grid"] = grid_json(run.grid);
        out.manifest()["solve"] = report_json(run.report);
    }
    out.csv("mc.csv", validation_table(rows, file.mc, tracking));
    out.manifest()["mc"] = {{"paths", file.mc.paths},
                            {"dt", file.mc.dt},
                            {"t_max", file.mc.t_max},
                            {"seed", file.mc.seed},
                            {"terminal_psi", file.mc.terminal_psi}};
    bool all = true;
    if (ctx.log != nullptr) {
        *ctx.log << "start                v_h         mc_mean     stderr      tolerance   result\n";
    }
    for (const auto& r : rows) {
        all = all && r.pass;
        if (ctx.log == nullptr) continue;
        std::string where = "(";
        for (double c : r.start.x) where += brief(c) + ", ";
        where += brief(r.start.y) + ")";
        char line[160];
        std::snprintf(line, sizeof line, "%-20s %-11.5f %-11.5f %-11.5f %-11.5f %s\n", where.c_str(), r.v_h,
                      r.estimate.mean, r.estimate.std_error, r.tolerance, r.pass ? "pass" : "FAIL");
        *ctx.log << line;
    }
    out.manifest()["validation_passed"] = all;
    out.finish();
    return all ? 0 : 3;
}

int command_reproduce(const std::string& figure, Scale scale, const fs::path& out_dir, const RunContext& ctx) {
    const auto& recipe = figure_recipe(figure);
    Output out(out_dir / recipe.id, "reproduce " + recipe.id, nullptr);
    out.manifest()["figure"] = recipe.id;
    out.manifest()["title"] = recipe.title;
    out.manifest()["scale"] = scale == Scale::desk ? "desk" : "paper";
    json runs = json::array();
    for (double k : recipe.k_values) {
        const std::string tag = k_label(k);
        if (recipe.family == Family::correction) {
            const auto file = correction_preset(k, scale);
            const auto run = run_correction(file, ctx);
            if (recipe.value_mesh) out.csv("value_" + tag + ".csv", mesh_table(run.grid, run.report.v_h.values()));
            if (recipe.switching) {
                out.csv("policy_" + tag + ".csv", mesh_table(run.grid, run.policy.a_star, "a_star"));
                out.csv("regions_" + tag + ".csv", regions_table(run.regions));
                out.csv("switching_" + tag + ".csv", switching_table(run.regions));
            }
            runs.push_back({{"k", k}, {"parameters", parameters_json(file)}, {"grid", grid_json(run.grid)},
                            {"solve", report_json(run.report)}});
        } else {
            const auto file = tracking_preset(k, scale);
            const auto run = run_tracking(file, ctx);
            const int layer = std::clamp(static_cast<int>(std::lround(recipe.slice_y / run.grid.h3())), 1,
                                         run.grid.K());
            if (recipe.value_mesh) {
                out.csv("value_" + tag + ".csv", layer_table(run.grid, run.report.v_h.values(), layer, "v"));
            }
            json entry{{"k", k},
                       {"parameters", parameters_json(file)},
                       {"grid", grid_json(run.grid)},
                       {"solve", report_json(run.report)},
                       {"layer_y", run.grid.y(layer)}};
            if (recipe.switching) {
                const auto curves = layer_slice(switching_curves(run.policy, run.grid, true), layer);
                out.csv("policy_" + tag + ".csv", layer_table(run.grid, run.policy.a_star, layer, "a_star"));
                out.csv("regions_" + tag + ".csv", regions_table(curves));
                out.csv("switching_" + tag + ".csv", switching_table(curves));
            }
            if (recipe.infinite_fuel) {
                const auto inf = run_infinite_tracking(file, ctx);
                out.csv("switching_infinite_" + tag + ".csv",
                        switching_table(switching_curves(inf.policy, inf.grid, true)));
                entry["infinite_fuel"] = report_json(inf.report);
            }
            runs.push_back(entry);
        }
    }
    out.manifest()["runs"] = runs;
    out.finish();
    say(ctx, "wrote " + out.dir().string());
    return 0;
}

}  // namespace fuelctl
