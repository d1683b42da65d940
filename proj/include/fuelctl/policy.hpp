#pragma once

#include <vector>

#include "fuelctl/grid.hpp"
#include "fuelctl/scheme.hpp"
#include "fuelctl/solver.hpp"

namespace fuelctl {

/// Minimising control per node; 0 at boundary and inactive nodes.
struct Policy {
    std::vector<double> a_star;
};

/// One apply_scheme pass on v_h with the scheme's tie rule.
Policy extract_policy(const Scheme& scheme, const SolveReport& report);
Policy extract_policy(const Scheme& scheme, const MeshFunction& v);

/// A change of control between two neighbouring interior nodes of a slice,
/// located at their midpoint.
struct SwitchPoint {
    double position;
    double a_before;
    double a_after;
};

/// One slice of the policy: a fuel layer (correction) or a fuel layer and an
/// anti-diagonal x1 + x2 = const (tracking). Positions are x, resp. z2.
struct RegionSlice {
    int layer = 0;
    double y = 0.0;
    double z1 = 0.0;  // tracking only
    bool empty = true;
    double left = 0.0;
    double right = 0.0;
    double width = 0.0;
    std::vector<SwitchPoint> switches;
};

struct RegionSet {
    bool tracking = false;
    bool rotated = false;
    std::vector<RegionSlice> slices;
};

/// Per fuel layer, the zero-control run containing the equilibrium node. Node
/// cells have width h1; a run reaching the last interior node extends to the
/// domain edge, so an all-zero layer has width 2l.
RegionSet no_action_regions(const Policy& policy, const Grid2& grid, double equilibrium = 0.0);
/// Per (layer, anti-diagonal), the longest zero run in z2; ties go to the run closest to z2 = 0.
RegionSet no_action_regions(const Policy& policy, const Grid3& grid);

/// Same slices; for tracking `rotated` selects (z1, z2) over (x1, x2) in exports.
RegionSet switching_curves(const Policy& policy, const Grid2& grid);
RegionSet switching_curves(const Policy& policy, const Grid3& grid, bool rotated);

}  // namespace fuelctl
