#include "fuelctl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fuelctl {

namespace {

MeshFunction initial_mesh(const Scheme& scheme, double value) {
    MeshFunction v(scheme.size(), value);
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (scheme.kind(n) == NodeKind::inactive) v[n] = 0.0;
    }
    return v;
}

/// Envelope statistics for the Gauss-Seidel mode, where both sweeps run in place.
SandwichStats compare(const Scheme& scheme, const MeshFunction& lo_prev, const MeshFunction& hi_prev,
                      const MeshFunction& lo, const MeshFunction& hi, double floor) {
    SandwichStats stats;
    stats.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < lo.size(); ++n) {
        if (scheme.kind(n) == NodeKind::inactive) continue;
        const double gap = hi[n] - lo[n];
        stats.min_gap = std::min(stats.min_gap, gap);
        stats.max_relative_gap = std::max(stats.max_relative_gap, gap / std::max(lo[n], floor));
        stats.max_violation = std::max({stats.max_violation, lo_prev[n] - lo[n], hi[n] - hi_prev[n], -gap});
        if (!std::isfinite(lo[n]) || !std::isfinite(hi[n])) {
            stats.max_violation = std::numeric_limits<double>::infinity();
        }
    }
    return stats;
}

void finish(SolveReport& report, const Scheme& scheme) {
    report.v_h = MeshFunction(report.v_lower.size());
    for (std::size_t n = 0; n < report.v_h.size(); ++n) {
        report.v_h[n] = 0.5 * (report.v_lower[n] + report.v_upper[n]);
    }
    report.constants = scheme.constants();
}

}  // namespace

MeshFunction euler_step(const Scheme& scheme, const MeshFunction& v) {
    if (v.size() != scheme.size()) throw InvalidParameter("v", "size does not match the scheme");
    MeshFunction out(v.size());
    scheme.euler_step(v.values(), out.values(), scheme.constants().rho);
    if (!out.all_finite()) throw DivergenceError("non-finite value after an Euler step");
    return out;
}

SolveReport solve(const Scheme& scheme, const SolveOptions& options) {
    if (!(options.epsilon > 0.0)) throw InvalidParameter("epsilon", "must be positive");
    if (options.max_iterations < 1) throw InvalidParameter("max_iterations", "must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const double rho = scheme.constants().rho;
    const double floor = 1e-8 / scheme.beta();
    const double tolerance = options.monotonicity_tolerance / scheme.beta();

    SolveReport report;
    report.constants = scheme.constants();
    report.v_lower = initial_mesh(scheme, scheme.initial_lower());
    report.v_upper = initial_mesh(scheme, scheme.initial_upper());
    MeshFunction lo_next(scheme.size());
    MeshFunction hi_next(scheme.size());
    report.min_gap = std::numeric_limits<double>::infinity();
    report.final_gap = std::numeric_limits<double>::infinity();

    for (std::int64_t it = 1; it <= options.max_iterations; ++it) {
        SandwichStats stats;
        if (options.mode == IterationMode::jacobi) {
            stats = scheme.sandwich_step(report.v_lower.values(), report.v_upper.values(), lo_next.values(),
                                         hi_next.values(), rho, floor);
            std::swap(report.v_lower, lo_next);
            std::swap(report.v_upper, hi_next);
        } else {
            lo_next = report.v_lower;
            hi_next = report.v_upper;
            scheme.gauss_seidel_sweep(report.v_lower.values(), rho);
            scheme.gauss_seidel_sweep(report.v_upper.values(), rho);
            stats = compare(scheme, lo_next, hi_next, report.v_lower, report.v_upper, floor);
        }
        if (!std::isfinite(stats.max_violation) || !std::isfinite(stats.max_relative_gap)) {
            throw DivergenceError("non-finite envelope at iteration " + std::to_string(it));
        }
        report.iterations = it;
        report.final_gap = stats.max_relative_gap;
        report.max_violation = std::max(report.max_violation, stats.max_violation);
        report.min_gap = std::min(report.min_gap, stats.min_gap);
        if (options.progress && options.progress_every > 0 && it % options.progress_every == 0) {
            options.progress(it, stats.max_relative_gap);
        }
        if (stats.max_relative_gap <= options.epsilon) {
            report.converged = true;
            break;
        }
    }
    report.monotone = report.max_violation <= tolerance;
    report.wall_time = std::chrono::steady_clock::now() - start;
    finish(report, scheme);
    if (!report.converged) {
        throw TimeoutError("no convergence after " + std::to_string(report.iterations) + " iterations (gap " +
                               std::to_string(report.final_gap) + ")",
                           std::move(report));
    }
    return report;
}

SolveReport solve(const CorrectionProblem& problem, const Grid2& grid, const MeshFunction& g,
                  const SolveOptions& options) {
    return solve(LineScheme(problem, grid, g), options);
}

SolveReport solve(const TrackingProblem& problem, const Grid3& grid, const MeshFunction& g,
                  const SolveOptions& options) {
    return solve(TrackingScheme(problem, grid, g), options);
}

SolveReport solve_infinite_fuel(const CorrectionProblem& problem, const Grid2& spatial, const SolveOptions& options) {
    if (spatial.has_fuel_axis()) throw InvalidParameter("grid", "infinite-fuel solve needs a spatial grid");
    return solve(LineScheme(problem, spatial, MeshFunction(spatial.size(), 0.0)), options);
}

SolveReport solve_infinite_fuel(const TrackingProblem& problem, const Grid3& spatial, const FaceData& faces,
                                const SolveOptions& options) {
    if (spatial.has_fuel_axis()) throw InvalidParameter("grid", "infinite-fuel solve needs a spatial grid");
    const auto psi = solve_psi_tracking(problem, spatial);
    return solve(TrackingScheme(problem, spatial, build_boundary_g(psi, spatial, faces)), options);
}

CorrectionProblem reduced_face_problem(const TrackingProblem& problem, int sign) {
    CorrectionParams p;
    p.k = 0.0;
    p.sigma = problem.sigma();
    p.l = problem.l();
    p.beta = problem.beta();
    p.a_lower = problem.bounds().lower();
    p.a_upper = problem.bounds().upper();
    p.y_max = problem.y_max();
    p.drift_offset = -static_cast<double>(sign) * problem.k() * problem.b_sat();
    return CorrectionProblem(p, problem.reward().is_constant() ? problem.reward() : RunningReward::constant(1.0));
}

FaceData solve_face_data(const TrackingProblem& problem, const Grid3& grid, FaceData::Mode mode,
                         const SolveOptions& options) {
    FaceData faces;
    faces.mode = mode;
    if (mode == FaceData::Mode::psi) return faces;
    if (!problem.reward().is_constant()) {
        throw InvalidParameter("face_data", "reduced faces need a constant running reward");
    }
    SolveOptions inner = options;
    inner.epsilon = options.epsilon / 10.0;
    inner.progress = nullptr;
    const Grid2 line = grid.has_fuel_axis() ? Grid2::build(problem.l(), problem.y_max(), grid.m(), grid.K())
                                            : Grid2::spatial(problem.l(), grid.m());
    for (const int sign : {+1, -1}) {
        const auto reduced = reduced_face_problem(problem, sign);
        const auto psi = solve_psi_correction(reduced, line);
        const LineScheme scheme(reduced, line, build_boundary_g(psi, line), DriftSplitting::split);
        auto values = solve(scheme, inner).v_h.data();
        (sign > 0 ? faces.plus : faces.minus) = std::move(values);
    }
    return faces;
}

}  // namespace fuelctl
