#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "fuelctl/io.hpp"
#include "fuelctl/presets.hpp"

using namespace fuelctl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "fuelctl_unit";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int config_error_line(std::string_view text) {
    try {
        parse_problem_file(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("correction benchmark file") {
    const auto f = parse_problem_file(
        "# stable benchmark\n"
        "family = correction\n"
        "beta = 0.1\nsigma = 0.8\nl = 1\ny_max = 40\n"
        "a_lower = -10\na_upper = 10   # symmetric\n"
        "k = 2\n");
    CHECK(f.family == Family::correction);
    CHECK(f.correction.k == 2.0);
    CHECK(f.correction.beta == 0.1);
    CHECK(f.correction.sigma == 0.8);
    CHECK(f.correction.y_max == 40.0);
    CHECK(f.correction.a_lower == -10.0);
    CHECK(f.grid_x == 100);
    CHECK(f.mc.starts.size() == 3);
}

TEST_CASE("tracking benchmark file") {
    const auto f = parse_problem_file(
        "family = tracking\n"
        "beta = 0.1\nsigma = 0.8\nb_sat = 2.5\nl = 4/sqrt(2)\ny_max = 10\nx_max = 80\n"
        "a_lower = -1\na_upper = 1\nk = -0.3\n");
    CHECK(f.family == Family::tracking);
    CHECK(f.tracking.l == doctest::Approx(2.8284271247461903).epsilon(1e-15));
    CHECK(f.tracking.k == -0.3);
    CHECK(f.tracking.x_max == 80.0);
    CHECK(f.grid3().m() == 30);
}

TEST_CASE("diagnostics carry the line and field") {
    try {
        parse_problem_file("family = correction\nsigma = -1\n");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(e.field() == "sigma");
    }
    CHECK(config_error_line("k = 2\nkappa = 3\n") == 2);
    CHECK(config_error_line("k = 2\nk = 3\n") == 2);
    CHECK(config_error_line("k = two\n") == 1);
    CHECK(config_error_line("\n\nno equals sign\n") == 3);
    CHECK(config_error_line("family = correction\nx_max = 3\n") == 2);
    CHECK(config_error_line("family = tracking\ngrid_x = 3\n") == 2);
    CHECK(config_error_line("family = other\n") == 1);
    CHECK(config_error_line("mc_starts = 0:2; 0,1:3\n") == 1);
    CHECK(config_error_line("grid_x = 2.5\n") == 1);
    CHECK(config_error_line("mode = sideways\n") == 1);
    CHECK(config_error_line("epsilon = 0\n") == 1);
    CHECK(config_error_line("k = 2\n") == -1);
}

TEST_CASE("problem file text round trip") {
    auto f = tracking_preset(-0.3, Scale::desk);
    f.mc.seed = 99;
    f.mc.starts = {{{0.1, -0.2}, 3.0}};
    f.face_data = FaceData::Mode::psi;
    f.mode = IterationMode::gauss_seidel;
    const auto g = parse_problem_file(to_text(f));
    CHECK(to_text(g) == to_text(f));
    CHECK(g.tracking.k == f.tracking.k);
    CHECK(g.tracking.l == f.tracking.l);
    CHECK(g.mc.seed == 99);
    CHECK(g.face_data == FaceData::Mode::psi);
    CHECK(g.mode == IterationMode::gauss_seidel);
    CHECK(g.mc.starts[0].x[1] == -0.2);

    const auto c = correction_preset(3.5, Scale::paper);
    CHECK(to_text(parse_problem_file(to_text(c))) == to_text(c));
}

TEST_CASE("numbers keep 17 significant digits") {
    CHECK(format_number(0.3) == "0.29999999999999999");
    CHECK(format_number(2.0) == "2");
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int t = 0; t < 1000; ++t) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(format_number(x)) == x);
    }
}

TEST_CASE("mesh export and import are exact") {
    const auto g = Grid2::build(1.0, 40.0, 5, 4);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = u(rng);
    const auto path = scratch("mesh2.csv");
    write_csv(path, mesh_table(g, v));
    const auto table = read_csv(path);
    CHECK(table.header == std::vector<std::string>{"x", "y", "v"});
    CHECK(table.rows.size() == g.size());
    CHECK(mesh_values(g, table) == v);
    // Writing what was read gives the same bytes.
    const auto again = scratch("mesh2b.csv");
    write_csv(again, table);
    CHECK(slurp(path) == slurp(again));

    TrackingParams t;
    t.x_max = 10.0;
    const auto g3 = Grid3::build(t.l, t.x_max, 4.0, 3, 2);
    std::vector<double> w(g3.size(), 0.0);
    for (std::size_t n = 0; n < g3.size(); ++n) {
        if (g3.kind(n) != NodeKind::inactive) w[n] = u(rng);
    }
    const auto path3 = scratch("mesh3.csv");
    write_csv(path3, mesh_table(g3, w));
    const auto t3 = read_csv(path3);
    CHECK(t3.header == std::vector<std::string>{"x1", "x2", "y", "z1", "z2", "v"});
    CHECK(t3.rows.size() == g3.active_count());
    CHECK(mesh_values(g3, t3) == w);
    CHECK_THROWS_AS(mesh_values(g, t3), IoError);
}

TEST_CASE("region and switching tables") {
    RegionSet set;
    RegionSlice a;
    a.layer = 1;
    a.y = 0.4;
    a.empty = false;
    a.left = -0.25;
    a.right = 0.25;
    a.width = 0.5;
    a.switches = {{-0.25, -10.0, 0.0}, {0.25, 0.0, 10.0}};
    RegionSlice b;
    b.layer = 2;
    b.y = 0.8;
    set.slices = {a, b};
    const auto regions = regions_table(set);
    CHECK(regions.header == std::vector<std::string>{"y", "width", "left", "right"});
    REQUIRE(regions.rows.size() == 2);
    CHECK(regions.rows[0][1] == 0.5);
    CHECK(regions.rows[1][1] == 0.0);
    CHECK(std::isnan(regions.rows[1][2]));
    const auto path = scratch("regions.csv");
    write_csv(path, regions);
    const auto back = read_csv(path);
    CHECK(std::isnan(back.rows[1][3]));
    CHECK(back.rows[0] == regions.rows[0]);

    const auto sw = switching_table(set);
    CHECK(sw.header == std::vector<std::string>{"y", "x", "a_before", "a_after"});
    CHECK(sw.rows.size() == 2);
    CHECK(sw.rows[1] == std::vector<double>{0.4, 0.25, 0.0, 10.0});
}

TEST_CASE("malformed CSV input") {
    const auto path = scratch("bad.csv");
    {
        std::ofstream out(path);
        out << "x,y,v\n0,1\n";
    }
    CHECK_THROWS_AS(read_csv(path), IoError);
    {
        std::ofstream out(path);
        out << "x,y,v\n0,1,abc\n";
    }
    CHECK_THROWS_AS(read_csv(path), IoError);
    {
        std::ofstream out(path);
    }
    CHECK_THROWS_AS(read_csv(path), IoError);
    CHECK_THROWS_AS(read_csv(scratch("missing.csv")), IoError);
    CsvTable t;
    t.header = {"a"};
    CHECK_THROWS_AS(t.column("b"), IoError);
}

TEST_CASE("presets and figure recipes") {
    const auto c = correction_preset(2.0, Scale::desk);
    CHECK(c.grid_x == 100);
    CHECK(c.grid_y == 100);
    CHECK(c.epsilon == 0.02);
    const auto p = correction_preset(2.0, Scale::paper);
    CHECK(p.grid2().I() == 100);
    CHECK(p.grid2().J() == 200);
    CHECK(p.grid2().h2() == doctest::Approx(0.2));
    CHECK(figure_recipe("fig3").family == Family::correction);
    CHECK(figure_recipe("fig5").family == Family::tracking);
    CHECK_THROWS_AS(figure_recipe("fig8"), InvalidParameter);
}
