#pragma once

#include <string>
#include <vector>

#include "fuelctl/io.hpp"

namespace fuelctl {

enum class Scale { desk, paper };

/// Benchmark correction problem: beta 0.1, sigma 0.8, l 1, y_max 40, a in [-10, 10].
/// Desk scale: 100x100 grid, epsilon 0.02. Paper scale: 200x200 grid, epsilon 0.01.
ProblemFile correction_preset(double k, Scale scale);

/// Benchmark tracking problem: beta 0.1, sigma 0.8, b 2.5, l 4/sqrt(2), y_max 10,
/// x_max 80, a in [-1, 1]. Desk: 60 steps across, 30 fuel steps, epsilon 0.02.
/// Paper scale: 100 across, 50 fuel steps, epsilon 0.01.
ProblemFile tracking_preset(double k, Scale scale);

/// What `reproduce figN` computes.
struct FigureRecipe {
    std::string id;
    std::string title;
    Family family;
    std::vector<double> k_values;
    bool value_mesh = false;      // value function CSV
    bool switching = false;       // policy, regions and switching points
    bool infinite_fuel = false;   // dashed reference curves
    double slice_y = -1.0;        // tracking: export only the fuel layer nearest this y
};

const std::vector<FigureRecipe>& figure_recipes();
/// Throws InvalidParameter for an unknown id.
const FigureRecipe& figure_recipe(const std::string& id);

}  // namespace fuelctl
