#include "fuelctl/presets.hpp"

#include "fuelctl/errors.hpp"

namespace fuelctl {

ProblemFile correction_preset(double k, Scale scale) {
    ProblemFile f;
    f.family = Family::correction;
    f.correction = CorrectionParams{};
    f.correction.k = k;
    f.grid_x = scale == Scale::desk ? 100 : 200;
    f.grid_y = scale == Scale::desk ? 100 : 200;
    f.epsilon = scale == Scale::desk ? 0.02 : 0.01;
    f.mc.starts = {{{0.0}, 2.0}, {{0.0}, 20.0}, {{0.5}, 10.0}};
    return f;
}

ProblemFile tracking_preset(double k, Scale scale) {
    ProblemFile f;
    f.family = Family::tracking;
    f.tracking = TrackingParams{};
    f.tracking.k = k;
    f.grid_across = scale == Scale::desk ? 60 : 100;
    f.grid_fuel = scale == Scale::desk ? 30 : 50;
    f.epsilon = scale == Scale::desk ? 0.02 : 0.01;
    f.progress_every = 1000;
    f.mc.starts = {{{0.0, 0.0}, 5.0}, {{20.0, 20.5}, 2.0}};
    return f;
}

const std::vector<FigureRecipe>& figure_recipes() {
    static const std::vector<FigureRecipe> recipes{
        {"fig1", "value function and level sets, k = 2", Family::correction, {2.0}, true, false, false},
        {"fig2", "optimal control, stable case", Family::correction, {2.0}, false, true, false},
        {"fig3", "optimal control, unstable case", Family::correction, {-2.0, -5.0, -10.0}, false, true, false},
        {"fig4", "switching lines, k = 0.3", Family::tracking, {0.3}, false, true, true, 1.0},
        {"fig5", "switching lines, k = -0.3", Family::tracking, {-0.3}, false, true, true, 1.0},
        {"fig6", "value function and level set, k = 0.3", Family::tracking, {0.3}, true, false, false, 1.0},
        {"fig7", "value function and level set, k = -0.3", Family::tracking, {-0.3}, true, false, false, 1.0},
    };
    return recipes;
}

const FigureRecipe& figure_recipe(const std::string& id) {
    for (const auto& r : figure_recipes()) {
        if (r.id == id) return r;
    }
    throw InvalidParameter("figure", "unknown figure '" + id + "' (expected fig1..fig7)");
}

}  // namespace fuelctl
