#pragma once

#include <vector>

#include "fuelctl/grid.hpp"
#include "fuelctl/problems.hpp"

namespace fuelctl {

/// The no-fuel value function psi on the spatial nodes of a grid.
///
/// For Grid2 the layout is i + I (2I+1 values); for Grid3 it is the k = 0
/// layer of the sheared box (rows x (2m+1)), one independent Dirichlet
/// problem per x2 row. Masked Grid3 nodes still carry their row's solution.
struct NoFuelSolution {
    std::vector<double> values;
};

/// Upwind (a = 0) discretisation of beta psi - f(x,0) - b(x,0) psi_x - sigma^2/2 psi_xx = 0,
/// psi(+-l) = 0, solved with the Thomas algorithm.
NoFuelSolution solve_psi_correction(const CorrectionProblem& problem, const Grid2& grid);

/// Same equation with drift mu(x1) on every x2 row (x2 - l, x2 + l).
NoFuelSolution solve_psi_tracking(const TrackingProblem& problem, const Grid3& grid);

/// Dirichlet data on the artificial faces |x1 + x2| = x_max of a Grid3.
/// `plus` holds the face x1 + x2 = +x_max, `minus` the opposite one, each
/// indexed by (k, d) with d = i - j in [-m, m]: value[k * (2m+1) + d + m].
struct FaceData {
    enum class Mode { reduced, psi };

    Mode mode = Mode::psi;
    std::vector<double> plus;
    std::vector<double> minus;
};

/// g = psi on the fuel floor, 0 on the lateral faces. Entries at interior
/// nodes are 0 and never read by the scheme.
MeshFunction build_boundary_g(const NoFuelSolution& psi, const Grid2& grid);

/// Tracking variant. Artificial-face nodes above the floor take `faces`
/// values in reduced mode and the row's psi in psi mode.
MeshFunction build_boundary_g(const NoFuelSolution& psi, const Grid3& grid, const FaceData& faces);

}  // namespace fuelctl
