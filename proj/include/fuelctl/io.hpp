#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fuelctl/errors.hpp"
#include "fuelctl/grid.hpp"
#include "fuelctl/policy.hpp"
#include "fuelctl/problems.hpp"
#include "fuelctl/psi.hpp"
#include "fuelctl/solver.hpp"
#include "fuelctl/validate.hpp"

namespace fuelctl {

enum class Family { correction, tracking };

/// Parsed `key = value` problem file. Omitted keys keep the benchmark defaults.
struct ProblemFile {
    Family family = Family::correction;
    CorrectionParams correction;
    TrackingParams tracking;

    int grid_x = 100;       // correction: spatial intervals (2I)
    int grid_y = 100;       // correction: fuel intervals (J)
    int grid_across = 60;   // tracking: intervals across the strip (2m)
    int grid_fuel = 30;     // tracking: fuel intervals (K)
    FaceData::Mode face_data = FaceData::Mode::reduced;

    double epsilon = 0.01;
    std::int64_t max_iterations = 5'000'000;
    IterationMode mode = IterationMode::jacobi;
    std::int64_t progress_every = 10'000;
    std::string output_dir = "out";

    MCConfig mc;

    Grid2 grid2() const;
    Grid3 grid3() const;
    SolveOptions solve_options() const;
};

/// Syntax or constraint failure in a problem file; line is 0 when the
/// failure concerns the file as a whole.
class ConfigError : public Error {
public:
    ConfigError(int line, std::string field, const std::string& message);
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

ProblemFile parse_problem_file(std::string_view text);
ProblemFile load_problem_file(const std::filesystem::path& path);
/// Canonical text form; parse_problem_file(to_text(f)) reproduces f.
std::string to_text(const ProblemFile& file);

/// 17 significant digits, so the text reads back as the same double.
std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column index by name; throws IoError when absent.
    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// x,y,<name> per node (x,<name> on a spatial grid).
CsvTable mesh_table(const Grid2& grid, std::span<const double> values, const std::string& name = "v");
/// x1,x2,y,z1,z2,<name> per active node (no y column on a spatial grid).
CsvTable mesh_table(const Grid3& grid, std::span<const double> values, const std::string& name = "v");

/// Per-node values back from a mesh table written for the same grid.
std::vector<double> mesh_values(const Grid2& grid, const CsvTable& table, const std::string& name = "v");
std::vector<double> mesh_values(const Grid3& grid, const CsvTable& table, const std::string& name = "v");

CsvTable psi_table(const Grid2& grid, const NoFuelSolution& psi);
CsvTable psi_table(const Grid3& grid, const NoFuelSolution& psi);

/// y,width,left,right (tracking: y,z1,width,left,right); empty slices have width 0 and NaN ends.
CsvTable regions_table(const RegionSet& regions);
/// y,x,a_before,a_after (tracking: y,z1,z2,... rotated or y,x1,x2,... unrotated).
CsvTable switching_table(const RegionSet& regions);

}  // namespace fuelctl
