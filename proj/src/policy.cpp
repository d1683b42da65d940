#include "fuelctl/policy.hpp"

#include <algorithm>
#include <cmath>

#include "fuelctl/errors.hpp"

namespace fuelctl {

namespace {

struct Cell {
    double position;
    double a;
};

/// Fill interval and switches of a slice from its interior cells (ordered,
/// uniformly spaced by `step`), clipped to [lo_edge, hi_edge]. `anchor` >= 0
/// selects the run through that cell; otherwise the longest run wins.
void fill_slice(RegionSlice& slice, const std::vector<Cell>& cells, double step, double lo_edge, double hi_edge,
                int anchor) {
    slice.switches.clear();
    for (std::size_t c = 1; c < cells.size(); ++c) {
        if (cells[c].a != cells[c - 1].a) {
            slice.switches.push_back({0.5 * (cells[c].position + cells[c - 1].position), cells[c - 1].a, cells[c].a});
        }
    }
    std::size_t best_first = 0;
    std::size_t best_last = 0;
    bool found = false;
    for (std::size_t c = 0; c < cells.size();) {
        if (cells[c].a != 0.0) {
            ++c;
            continue;
        }
        std::size_t last = c;
        while (last + 1 < cells.size() && cells[last + 1].a == 0.0) ++last;
        bool take = false;
        if (anchor >= 0) {
            take = static_cast<std::size_t>(anchor) >= c && static_cast<std::size_t>(anchor) <= last;
        } else if (!found) {
            take = true;
        } else {
            const std::size_t len = last - c;
            const std::size_t best_len = best_last - best_first;
            const double centre = std::abs(0.5 * (cells[c].position + cells[last].position));
            const double best_centre = std::abs(0.5 * (cells[best_first].position + cells[best_last].position));
            take = len > best_len || (len == best_len && centre < best_centre);
        }
        if (take) {
            best_first = c;
            best_last = last;
            found = true;
        }
        c = last + 1;
    }
    slice.empty = !found;
    if (!found) {
        slice.left = slice.right = slice.width = 0.0;
        return;
    }
    slice.left = best_first == 0 ? lo_edge : cells[best_first].position - 0.5 * step;
    slice.right = best_last + 1 == cells.size() ? hi_edge : cells[best_last].position + 0.5 * step;
    slice.width = slice.right - slice.left;
}

}  // namespace

Policy extract_policy(const Scheme& scheme, const MeshFunction& v) {
    return Policy{apply_scheme(scheme, v).a_star};
}

Policy extract_policy(const Scheme& scheme, const SolveReport& report) { return extract_policy(scheme, report.v_h); }

RegionSet no_action_regions(const Policy& policy, const Grid2& grid, double equilibrium) {
    if (policy.a_star.size() != grid.size()) throw InvalidParameter("policy", "size does not match the grid");
    RegionSet set;
    const int I = grid.I();
    int anchor_i = static_cast<int>(std::lround(equilibrium / grid.h1()));
    anchor_i = std::clamp(anchor_i, -I + 1, I - 1);
    std::vector<Cell> cells;
    for (int j = grid.has_fuel_axis() ? 1 : 0; j < grid.layers(); ++j) {
        cells.clear();
        for (int i = -I + 1; i <= I - 1; ++i) cells.push_back({grid.x(i), policy.a_star[grid.index(i, j)]});
        RegionSlice slice;
        slice.layer = j;
        slice.y = grid.y(j);
        fill_slice(slice, cells, grid.h1(), -grid.l(), grid.l(), anchor_i + I - 1);
        set.slices.push_back(std::move(slice));
    }
    return set;
}

RegionSet no_action_regions(const Policy& policy, const Grid3& grid) {
    if (policy.a_star.size() != grid.size()) throw InvalidParameter("policy", "size does not match the grid");
    RegionSet set;
    set.tracking = true;
    const int m = grid.m();
    const double r2 = std::sqrt(2.0);
    const double edge = grid.l() / r2;
    std::vector<Cell> cells;
    for (int k = grid.has_fuel_axis() ? 1 : 0; k < grid.layers(); ++k) {
        for (int s = -grid.sum_bound() + 1; s <= grid.sum_bound() - 1; ++s) {
            cells.clear();
            for (int d = -m + 1; d <= m - 1; ++d) {
                if (((s + d) % 2) != 0) continue;
                const int i = (s + d) / 2;
                const int j = (s - d) / 2;
                cells.push_back({d * grid.h1() / r2, policy.a_star[grid.index(i, j, k)]});
            }
            RegionSlice slice;
            slice.layer = k;
            slice.y = grid.y(k);
            slice.z1 = s * grid.h1() / r2;
            fill_slice(slice, cells, r2 * grid.h1(), -edge, edge, -1);
            set.slices.push_back(std::move(slice));
        }
    }
    return set;
}

RegionSet switching_curves(const Policy& policy, const Grid2& grid) { return no_action_regions(policy, grid); }

RegionSet switching_curves(const Policy& policy, const Grid3& grid, bool rotated) {
    auto set = no_action_regions(policy, grid);
    set.rotated = rotated;
    return set;
}

}  // namespace fuelctl
