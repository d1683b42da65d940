#pragma once

#include <cstdint>
#include <vector>

#include "fuelctl/grid.hpp"
#include "fuelctl/policy.hpp"
#include "fuelctl/problems.hpp"
#include "fuelctl/psi.hpp"

namespace fuelctl {

/// Spatial position (x, or x1 x2) and fuel level of a Monte-Carlo start.
struct StartPoint {
    std::vector<double> x;
    double y = 0.0;
};

struct MCConfig {
    std::int64_t paths = 10'000;
    double dt = 1e-3;
    double t_max = 115.0;
    std::uint64_t seed = 1;
    std::vector<StartPoint> starts;
    /// Stop at fuel exhaustion and add e^{-beta t} psi(X_t) instead of simulating on with a = 0.
    bool terminal_psi = false;
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double exit_fraction = 0.0;
    double fuel_exhausted_fraction = 0.0;
    std::int64_t paths = 0;
};

/// Euler-Maruyama paths under the nearest-node feedback policy; one estimate per start.
/// Throws InvalidStart for starts outside the closed domain or with y < 0.
std::vector<MCEstimate> simulate_policy(const CorrectionProblem& problem, const Grid2& grid, const Policy& policy,
                                        const NoFuelSolution& psi, const MCConfig& config);
std::vector<MCEstimate> simulate_policy(const TrackingProblem& problem, const Grid3& grid, const Policy& policy,
                                        const NoFuelSolution& psi, const MCConfig& config);

/// a = 0 paths; estimates psi at the starts' spatial positions (y is ignored).
std::vector<MCEstimate> simulate_uncontrolled(const CorrectionProblem& problem, const MCConfig& config);
std::vector<MCEstimate> simulate_uncontrolled(const TrackingProblem& problem, const MCConfig& config);

/// Bound on the reward lost by stopping at t_max.
double horizon_bias_bound(double beta, double t_max);

/// One recorded path (for audits of the fuel accounting).
struct PathTrace {
    std::vector<double> t;
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    std::vector<double> a;  // control applied on [t_n, t_n + dt)
    double reward = 0.0;
    bool exited = false;
};

PathTrace trace_path(const CorrectionProblem& problem, const Grid2& grid, const Policy& policy,
                     const StartPoint& start, const MCConfig& config, std::int64_t path_index);
PathTrace trace_path(const TrackingProblem& problem, const Grid3& grid, const Policy& policy,
                     const StartPoint& start, const MCConfig& config, std::int64_t path_index);

/// Nearest interior node of the policy, clamped to the grid (fuel index >= 1 when y > 0).
double lookup_policy(const Grid2& grid, const Policy& policy, double x, double y);
double lookup_policy(const Grid3& grid, const Policy& policy, double x1, double x2, double y);

}  // namespace fuelctl
