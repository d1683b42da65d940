#include "fuelctl/psi.hpp"

#include <array>
#include <cmath>

#include "fuelctl/errors.hpp"
#include "fuelctl/tridiagonal.hpp"

namespace fuelctl {

namespace {

/// One Dirichlet row: beta v - f - sigma^2/2 v'' + s^+ D^- v - s^- D^+ v = 0 with
/// zero end values, where s(x) = -(uncontrolled drift).
template <class DriftFn, class RewardFn>
std::vector<double> solve_row(std::size_t n, double h, double beta, double sigma, DriftFn minus_drift,
                              RewardFn reward) {
    std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0), rhs(n, 0.0);
    const double diffusion = 0.5 * sigma * sigma / (h * h);
    for (std::size_t p = 1; p + 1 < n; ++p) {
        const double s = minus_drift(p);
        const double s_plus = std::max(s, 0.0);
        const double s_minus = std::max(-s, 0.0);
        lower[p] = -diffusion - s_plus / h;
        diag[p] = beta + 2.0 * diffusion + (s_plus + s_minus) / h;
        upper[p] = -diffusion - s_minus / h;
        rhs[p] = reward(p);
    }
    auto values = solve_tridiagonal(lower, diag, upper, rhs);
    values.front() = 0.0;
    values.back() = 0.0;
    return values;
}

}  // namespace

NoFuelSolution solve_psi_correction(const CorrectionProblem& problem, const Grid2& grid) {
    if (std::abs(grid.l() - problem.l()) > 1e-12 * problem.l()) {
        throw InvalidParameter("l", "grid half-width does not match the problem");
    }
    const int I = grid.I();
    const auto n = static_cast<std::size_t>(grid.nx());
    auto minus_drift = [&](std::size_t p) {
        return problem.k() * grid.x(static_cast<int>(p) - I) - problem.drift_offset();
    };
    const auto& f = problem.reward();
    auto reward = [&](std::size_t p) {
        const std::array<double, 1> x{grid.x(static_cast<int>(p) - I)};
        return f(x, 0.0);
    };
    return {solve_row(n, grid.h1(), problem.beta(), problem.sigma(), minus_drift, reward)};
}

NoFuelSolution solve_psi_tracking(const TrackingProblem& problem, const Grid3& grid) {
    if (std::abs(grid.l() - problem.l()) > 1e-12 * problem.l()) {
        throw InvalidParameter("l", "grid half-width does not match the problem");
    }
    const int m = grid.m();
    const auto width = grid.row_stride();
    NoFuelSolution out;
    out.values.resize(grid.layer_stride());
    const auto& f = problem.reward();
    for (int j = grid.row_min(); j <= grid.row_max(); ++j) {
        auto x1_of = [&](std::size_t p) { return grid.x1(static_cast<int>(p) + j - m); };
        auto minus_drift = [&](std::size_t p) { return -mu(problem, x1_of(p)); };
        auto reward = [&](std::size_t p) {
            const std::array<double, 2> x{x1_of(p), grid.x2(j)};
            return f(x, 0.0);
        };
        const auto row = solve_row(width, grid.h1(), problem.beta(), problem.sigma(), minus_drift, reward);
        std::copy(row.begin(), row.end(), out.values.begin() + static_cast<std::ptrdiff_t>(grid.index(j - m, j, 0)));
    }
    return out;
}

MeshFunction build_boundary_g(const NoFuelSolution& psi, const Grid2& grid) {
    if (psi.values.size() != static_cast<std::size_t>(grid.nx())) {
        throw InvalidParameter("psi", "size does not match the spatial grid");
    }
    MeshFunction g(grid.size(), 0.0);
    if (grid.has_fuel_axis()) {
        for (int i = -grid.I(); i <= grid.I(); ++i) g[grid.index(i, 0)] = psi.values[static_cast<std::size_t>(i + grid.I())];
    }
    // Lateral nodes (i = +-I) keep 0; psi(+-l) = 0 makes the corners agree.
    return g;
}

MeshFunction build_boundary_g(const NoFuelSolution& psi, const Grid3& grid, const FaceData& faces) {
    if (psi.values.size() != grid.layer_stride()) {
        throw InvalidParameter("psi", "size does not match the spatial layer");
    }
    const int m = grid.m();
    const auto width = grid.row_stride();
    const bool reduced = faces.mode == FaceData::Mode::reduced;
    if (reduced && (faces.plus.size() != width * static_cast<std::size_t>(grid.layers()) ||
                    faces.minus.size() != faces.plus.size())) {
        throw InvalidParameter("faces", "face data size does not match the grid");
    }
    MeshFunction g(grid.size(), 0.0);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (grid.kind(n) != NodeKind::boundary) continue;
        const auto [i, j, k] = grid.node(n);
        const double psi_here = psi.values[n % grid.layer_stride()];
        const int d = i - j;
        if (std::abs(d) == m) {
            g[n] = 0.0;
        } else if (grid.has_fuel_axis() && k == 0) {
            g[n] = psi_here;
        } else if (reduced) {
            const std::size_t slot = static_cast<std::size_t>(k) * width + static_cast<std::size_t>(d + m);
            g[n] = (i + j > 0) ? faces.plus[slot] : faces.minus[slot];
        } else {
            g[n] = psi_here;
        }
    }
    return g;
}

}  // namespace fuelctl
