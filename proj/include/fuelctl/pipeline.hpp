#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fuelctl/io.hpp"
#include "fuelctl/policy.hpp"
#include "fuelctl/presets.hpp"
#include "fuelctl/solver.hpp"
#include "fuelctl/validate.hpp"

namespace fuelctl {

struct RunContext {
    std::ostream* log = nullptr;  // progress and summaries; nullptr = silent
    bool progress = false;
};

struct CorrectionRun {
    CorrectionProblem problem;
    Grid2 grid;
    NoFuelSolution psi;
    MeshFunction g;
    SolveReport report;
    Policy policy;
    RegionSet regions;
};

struct TrackingRun {
    TrackingProblem problem;
    Grid3 grid;
    NoFuelSolution psi;
    FaceData faces;
    MeshFunction g;
    SolveReport report;
    Policy policy;
    RegionSet regions;
};

struct InfiniteCorrectionRun {
    Grid2 grid;
    SolveReport report;
    Policy policy;
    RegionSet regions;
};

struct InfiniteTrackingRun {
    Grid3 grid;
    FaceData faces;
    SolveReport report;
    Policy policy;
    RegionSet regions;
};

/// psi -> g -> sandwich solve -> policy -> regions. TimeoutError propagates.
CorrectionRun run_correction(const ProblemFile& file, const RunContext& ctx = {});
TrackingRun run_tracking(const ProblemFile& file, const RunContext& ctx = {});
InfiniteCorrectionRun run_infinite_correction(const ProblemFile& file, const RunContext& ctx = {});
InfiniteTrackingRun run_infinite_tracking(const ProblemFile& file, const RunContext& ctx = {});

/// Value of a mesh at a point: bilinear on Grid2, nearest interior node on Grid3.
double value_at(const Grid2& grid, const MeshFunction& v, double x, double y);
double value_at(const Grid3& grid, const MeshFunction& v, double x1, double x2, double y);

struct ValidationRow {
    StartPoint start;
    double v_h = 0.0;
    MCEstimate estimate;
    double tolerance = 0.0;
    bool pass = false;
};

/// |MC mean - v_h| <= max(3 stderr, 5% v_h) + e^{-beta t_max}/beta at every start.
std::vector<ValidationRow> compare_with_mc(const CorrectionRun& run, const MCConfig& config);
std::vector<ValidationRow> compare_with_mc(const TrackingRun& run, const MCConfig& config);

/// CLI commands. They write into file.output_dir (or `out_dir`) and return the
/// process exit code; a solve timeout exports the partial envelopes and
/// rethrows the TimeoutError.
int command_solve(const ProblemFile& file, const RunContext& ctx);
int command_psi(const ProblemFile& file, const RunContext& ctx);
int command_infinite_fuel(const ProblemFile& file, const RunContext& ctx);
int command_validate(const ProblemFile& file, const RunContext& ctx);
int command_reproduce(const std::string& figure, Scale scale, const std::filesystem::path& out_dir,
                      const RunContext& ctx);

}  // namespace fuelctl
