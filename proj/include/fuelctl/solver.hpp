#pragma once

#include <chrono>
#include <cstdint>
#include <functional>

#include "fuelctl/errors.hpp"
#include "fuelctl/grid.hpp"
#include "fuelctl/problems.hpp"
#include "fuelctl/psi.hpp"
#include "fuelctl/scheme.hpp"

namespace fuelctl {

enum class IterationMode { jacobi, gauss_seidel };

struct SolveOptions {
    double epsilon = 0.01;
    std::int64_t max_iterations = 5'000'000;
    IterationMode mode = IterationMode::jacobi;
    /// Called every `progress_every` iterations with (iteration, relative gap).
    std::function<void(std::int64_t, double)> progress;
    std::int64_t progress_every = 10'000;
    /// Allowed envelope backtracking, relative to 1/beta (round-off only).
    double monotonicity_tolerance = 1e-12;
};

struct SolveReport {
    MeshFunction v_lower;
    MeshFunction v_upper;
    MeshFunction v_h;
    std::int64_t iterations = 0;
    double final_gap = 0.0;
    SchemeConstants constants;
    std::chrono::duration<double> wall_time{0.0};
    bool converged = false;
    /// Largest observed decrease of the lower envelope, increase of the upper
    /// one or lower-above-upper crossing over the whole run.
    double max_violation = 0.0;
    double min_gap = 0.0;
    bool monotone = true;
};

/// max_iterations reached; `report()` holds the envelopes at that point.
class TimeoutError : public Error {
public:
    TimeoutError(const std::string& message, SolveReport report) : Error(message), report_(std::move(report)) {}
    const SolveReport& report() const noexcept { return report_; }

private:
    SolveReport report_;
};

/// v - rho F[v] with rho from the scheme constants (Jacobi). Throws DivergenceError on non-finite output.
MeshFunction euler_step(const Scheme& scheme, const MeshFunction& v);

/// Sandwich iteration from the constant sub/super-solutions until
/// max (upper - lower) / max(lower, 1e-8/beta) <= epsilon.
SolveReport solve(const Scheme& scheme, const SolveOptions& options = {});

SolveReport solve(const CorrectionProblem& problem, const Grid2& grid, const MeshFunction& g,
                  const SolveOptions& options = {});
SolveReport solve(const TrackingProblem& problem, const Grid3& grid, const MeshFunction& g,
                  const SolveOptions& options = {});

/// Infinite-fuel companion on a spatial grid, zero data on the lateral faces.
SolveReport solve_infinite_fuel(const CorrectionProblem& problem, const Grid2& spatial,
                                const SolveOptions& options = {});
/// Tracking variant; `faces` supplies the artificial-face data (single layer).
SolveReport solve_infinite_fuel(const TrackingProblem& problem, const Grid3& spatial, const FaceData& faces,
                                const SolveOptions& options = {});

/// Dirichlet data on |x1 + x2| = x_max. In reduced mode each face solves the
/// 2-D constant-drift problem in (x1 - x2, y) with mu = -+k b_sat, to a tenth
/// of `options.epsilon`; psi mode returns an empty FaceData (g falls back to psi).
FaceData solve_face_data(const TrackingProblem& problem, const Grid3& grid, FaceData::Mode mode,
                         const SolveOptions& options = {});

/// The reduced one-face problem, exposed for tests. `sign` = +1 for x1 + x2 = +x_max.
CorrectionProblem reduced_face_problem(const TrackingProblem& problem, int sign);

}  // namespace fuelctl
