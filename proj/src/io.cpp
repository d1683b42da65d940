#include "fuelctl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace fuelctl {

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : Error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
            (field.empty() ? std::string() : field + ": ") + message),
      line_(line), field_(std::move(field)) {}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_plain(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

/// number | sqrt(number)
bool parse_atom(std::string_view s, double& out) {
    s = trim(s);
    if (s.starts_with("sqrt(") && s.ends_with(")")) {
        double inner = 0.0;
        if (!parse_plain(s.substr(5, s.size() - 6), inner) || inner < 0.0) return false;
        out = std::sqrt(inner);
        return true;
    }
    return parse_plain(s, out);
}

/// atom | atom / atom
bool parse_real(std::string_view s, double& out) {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_atom(s, out);
    double num = 0.0;
    double den = 0.0;
    if (!parse_atom(s.substr(0, slash), num) || !parse_atom(s.substr(slash + 1), den) || den == 0.0) return false;
    out = num / den;
    return true;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

struct Entry {
    std::string value;
    int line;
};

const std::set<std::string, std::less<>> kCommonKeys{
    "family",     "k",          "sigma",       "l",        "beta",      "a_lower",  "a_upper",
    "y_max",      "epsilon",    "max_iterations", "mode",  "output_dir", "progress_every", "mc_paths",
    "mc_dt",      "mc_t_max",   "mc_seed",     "mc_starts", "mc_terminal_psi"};
const std::set<std::string, std::less<>> kCorrectionKeys{"grid_x", "grid_y"};
const std::set<std::string, std::less<>> kTrackingKeys{"b_sat", "x_max", "grid_across", "grid_fuel", "face_data"};

std::vector<StartPoint> parse_starts(std::string_view text, std::size_t dim, int line) {
    std::vector<StartPoint> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find(';', pos), text.size());
        const auto item = trim(text.substr(pos, end - pos));
        pos = end + 1;
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) throw ConfigError(line, "mc_starts", "expected 'x:y' items");
        StartPoint s;
        auto coords = item.substr(0, colon);
        std::size_t c = 0;
        while (c <= coords.size()) {
            const auto comma = std::min(coords.find(',', c), coords.size());
            double v = 0.0;
            if (!parse_real(coords.substr(c, comma - c), v)) throw ConfigError(line, "mc_starts", "bad coordinate");
            s.x.push_back(v);
            c = comma + 1;
        }
        if (!parse_real(item.substr(colon + 1), s.y)) throw ConfigError(line, "mc_starts", "bad fuel level");
        if (s.x.size() != dim) {
            throw ConfigError(line, "mc_starts", "each start needs " + std::to_string(dim) + " coordinate(s)");
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string format_starts(const std::vector<StartPoint>& starts) {
    std::string out;
    for (const auto& s : starts) {
        if (!out.empty()) out += "; ";
        for (std::size_t c = 0; c < s.x.size(); ++c) {
            if (c > 0) out += ",";
            out += format_number(s.x[c]);
        }
        out += ":" + format_number(s.y);
    }
    return out;
}

std::vector<StartPoint> default_starts(Family family) {
    if (family == Family::correction) return {{{0.0}, 2.0}, {{0.0}, 20.0}, {{0.5}, 10.0}};
    return {{{0.0, 0.0}, 5.0}, {{20.0, 20.5}, 2.0}};
}

}  // namespace

Grid2 ProblemFile::grid2() const {
    return Grid2::build(correction.l, correction.y_max, grid_x / 2, grid_y);
}

Grid3 ProblemFile::grid3() const {
    return Grid3::build(tracking.l, tracking.x_max, tracking.y_max, grid_across / 2, grid_fuel);
}

SolveOptions ProblemFile::solve_options() const {
    SolveOptions o;
    o.epsilon = epsilon;
    o.max_iterations = max_iterations;
    o.mode = mode;
    o.progress_every = progress_every;
    return o;
}

ProblemFile parse_problem_file(std::string_view text) {
    std::map<std::string, Entry, std::less<>> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError(line_no, "", "missing key");
        if (value.empty()) throw ConfigError(line_no, key, "missing value");
        if (!kCommonKeys.contains(key) && !kCorrectionKeys.contains(key) && !kTrackingKeys.contains(key)) {
            throw ConfigError(line_no, key, "unknown key");
        }
        if (entries.contains(key)) throw ConfigError(line_no, key, "duplicate key");
        entries.emplace(key, Entry{value, line_no});
    }

    ProblemFile file;
    if (const auto it = entries.find("family"); it != entries.end()) {
        if (it->second.value == "correction") {
            file.family = Family::correction;
        } else if (it->second.value == "tracking") {
            file.family = Family::tracking;
        } else {
            throw ConfigError(it->second.line, "family", "expected 'correction' or 'tracking'");
        }
    }
    const bool tracking = file.family == Family::tracking;
    const auto& foreign = tracking ? kCorrectionKeys : kTrackingKeys;
    for (const auto& [key, entry] : entries) {
        if (foreign.contains(key)) {
            throw ConfigError(entry.line, key, std::string("not valid for family ") + (tracking ? "tracking" : "correction"));
        }
    }

    auto real = [&](const char* key, double& target) {
        const auto it = entries.find(key);
        if (it == entries.end()) return;
        if (!parse_real(it->second.value, target)) throw ConfigError(it->second.line, key, "expected a number");
    };
    auto integer = [&](const char* key, auto& target) {
        const auto it = entries.find(key);
        if (it == entries.end()) return;
        if (!parse_int(it->second.value, target)) throw ConfigError(it->second.line, key, "expected an integer");
    };
    auto line_of = [&](const std::string& key) {
        const auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.line;
    };

    if (tracking) {
        auto& p = file.tracking;
        real("k", p.k);
        real("sigma", p.sigma);
        real("b_sat", p.b_sat);
        real("l", p.l);
        real("beta", p.beta);
        real("a_lower", p.a_lower);
        real("a_upper", p.a_upper);
        real("y_max", p.y_max);
        real("x_max", p.x_max);
        integer("grid_across", file.grid_across);
        integer("grid_fuel", file.grid_fuel);
        if (const auto it = entries.find("face_data"); it != entries.end()) {
            if (it->second.value == "reduced") {
                file.face_data = FaceData::Mode::reduced;
            } else if (it->second.value == "psi") {
                file.face_data = FaceData::Mode::psi;
            } else {
                throw ConfigError(it->second.line, "face_data", "expected 'reduced' or 'psi'");
            }
        }
    } else {
        auto& p = file.correction;
        real("k", p.k);
        real("sigma", p.sigma);
        real("l", p.l);
        real("beta", p.beta);
        real("a_lower", p.a_lower);
        real("a_upper", p.a_upper);
        real("y_max", p.y_max);
        integer("grid_x", file.grid_x);
        integer("grid_y", file.grid_y);
    }
    real("epsilon", file.epsilon);
    integer("max_iterations", file.max_iterations);
    integer("progress_every", file.progress_every);
    if (const auto it = entries.find("mode"); it != entries.end()) {
        if (it->second.value == "jacobi") {
            file.mode = IterationMode::jacobi;
        } else if (it->second.value == "gauss_seidel") {
            file.mode = IterationMode::gauss_seidel;
        } else {
            throw ConfigError(it->second.line, "mode", "expected 'jacobi' or 'gauss_seidel'");
        }
    }
    if (const auto it = entries.find("output_dir"); it != entries.end()) file.output_dir = it->second.value;
    integer("mc_paths", file.mc.paths);
    real("mc_dt", file.mc.dt);
    real("mc_t_max", file.mc.t_max);
    integer("mc_seed", file.mc.seed);
    if (const auto it = entries.find("mc_terminal_psi"); it != entries.end()) {
        if (it->second.value != "true" && it->second.value != "false") {
            throw ConfigError(it->second.line, "mc_terminal_psi", "expected 'true' or 'false'");
        }
        file.mc.terminal_psi = it->second.value == "true";
    }
    if (const auto it = entries.find("mc_starts"); it != entries.end()) {
        file.mc.starts = parse_starts(it->second.value, tracking ? 2 : 1, it->second.line);
    } else {
        file.mc.starts = default_starts(file.family);
    }

    // Constraint checks, reported against the offending key.
    try {
        if (tracking) {
            TrackingProblem problem(file.tracking);
        } else {
            CorrectionProblem problem(file.correction);
        }
    } catch (const InvalidParameter& e) {
        const std::string field = e.field() == "bounds" ? "a_lower" : e.field();
        throw ConfigError(line_of(field), field, e.what());
    }
    auto require = [&](bool ok, const std::string& key, const std::string& msg) {
        if (!ok) throw ConfigError(line_of(key), key, msg);
    };
    if (tracking) {
        require(file.grid_across >= 4 && file.grid_across % 2 == 0, "grid_across", "must be even and >= 4");
        require(file.grid_fuel >= 1, "grid_fuel", "must be >= 1");
    } else {
        require(file.grid_x >= 4 && file.grid_x % 2 == 0, "grid_x", "must be even and >= 4");
        require(file.grid_y >= 1, "grid_y", "must be >= 1");
    }
    require(file.epsilon > 0.0, "epsilon", "must be positive");
    require(file.max_iterations >= 1, "max_iterations", "must be >= 1");
    require(file.progress_every >= 0, "progress_every", "must be >= 0");
    require(!file.output_dir.empty(), "output_dir", "must not be empty");
    require(file.mc.paths >= 1, "mc_paths", "must be >= 1");
    require(file.mc.dt > 0.0, "mc_dt", "must be positive");
    require(file.mc.t_max >= file.mc.dt, "mc_t_max", "must be >= mc_dt");
    return file;
}

ProblemFile load_problem_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_problem_file(buffer.str());
}

std::string to_text(const ProblemFile& f) {
    std::ostringstream out;
    auto kv = [&](const char* key, const std::string& value) { out << key << " = " << value << "\n"; };
    auto num = [&](const char* key, double v) { kv(key, format_number(v)); };
    if (f.family == Family::tracking) {
        const auto& p = f.tracking;
        kv("family", "tracking");
        num("k", p.k);
        num("sigma", p.sigma);
        num("b_sat", p.b_sat);
        num("l", p.l);
        num("beta", p.beta);
        num("a_lower", p.a_lower);
        num("a_upper", p.a_upper);
        num("y_max", p.y_max);
        num("x_max", p.x_max);
        kv("grid_across", std::to_string(f.grid_across));
        kv("grid_fuel", std::to_string(f.grid_fuel));
        kv("face_data", f.face_data == FaceData::Mode::reduced ? "reduced" : "psi");
    } else {
        const auto& p = f.correction;
        kv("family", "correction");
        num("k", p.k);
        num("sigma", p.sigma);
        num("l", p.l);
        num("beta", p.beta);
        num("a_lower", p.a_lower);
        num("a_upper", p.a_upper);
        num("y_max", p.y_max);
        kv("grid_x", std::to_string(f.grid_x));
        kv("grid_y", std::to_string(f.grid_y));
    }
    num("epsilon", f.epsilon);
    kv("max_iterations", std::to_string(f.max_iterations));
    kv("mode", f.mode == IterationMode::jacobi ? "jacobi" : "gauss_seidel");
    kv("progress_every", std::to_string(f.progress_every));
    kv("output_dir", f.output_dir);
    kv("mc_paths", std::to_string(f.mc.paths));
    num("mc_dt", f.mc.dt);
    num("mc_t_max", f.mc.t_max);
    kv("mc_seed", std::to_string(f.mc.seed));
    kv("mc_starts", format_starts(f.mc.starts));
    kv("mc_terminal_psi", f.mc.terminal_psi ? "true" : "false");
    return out.str();
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    if (ec != std::errc()) throw IoError("number formatting failed");
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// CSV

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == name) return c;
    }
    throw IoError("missing column '" + std::string(name) + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
    std::string_view head = trim(line);
    for (std::size_t pos = 0; pos <= head.size();) {
        const auto comma = std::min(head.find(',', pos), head.size());
        table.header.emplace_back(trim(head.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row_text = trim(line);
        if (row_text.empty()) continue;
        std::vector<double> row;
        for (std::size_t pos = 0; pos <= row_text.size();) {
            const auto comma = std::min(row_text.find(',', pos), row_text.size());
            const auto cell = trim(row_text.substr(pos, comma - pos));
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
            }
            row.push_back(v);
            pos = comma + 1;
        }
        if (row.size() != table.header.size()) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
    out << "\n";
    std::string line;
    for (const auto& row : table.rows) {
        line.clear();
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) line += ',';
            line += format_number(row[c]);
        }
        out << line << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

CsvTable mesh_table(const Grid2& grid, std::span<const double> values, const std::string& name) {
    if (values.size() != grid.size()) throw InvalidParameter("values", "size does not match the grid");
    CsvTable t;
    t.header = grid.has_fuel_axis() ? std::vector<std::string>{"x", "y", name} : std::vector<std::string>{"x", name};
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto [i, j] = grid.node(n);
        if (grid.has_fuel_axis()) {
            t.rows.push_back({grid.x(i), grid.y(j), values[n]});
        } else {
            t.rows.push_back({grid.x(i), values[n]});
        }
    }
    return t;
}

CsvTable mesh_table(const Grid3& grid, std::span<const double> values, const std::string& name) {
    if (values.size() != grid.size()) throw InvalidParameter("values", "size does not match the grid");
    CsvTable t;
    t.header = grid.has_fuel_axis() ? std::vector<std::string>{"x1", "x2", "y", "z1", "z2", name}
                                    : std::vector<std::string>{"x1", "x2", "z1", "z2", name};
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (grid.kind(n) == NodeKind::inactive) continue;
        const auto [i, j, k] = grid.node(n);
        const double x1 = grid.x1(i);
        const double x2 = grid.x2(j);
        if (grid.has_fuel_axis()) {
            t.rows.push_back({x1, x2, grid.y(k), Grid3::z1(x1, x2), Grid3::z2(x1, x2), values[n]});
        } else {
            t.rows.push_back({x1, x2, Grid3::z1(x1, x2), Grid3::z2(x1, x2), values[n]});
        }
    }
    return t;
}

std::vector<double> mesh_values(const Grid2& grid, const CsvTable& table, const std::string& name) {
    const auto c = table.column(name);
    if (table.rows.size() != grid.size()) throw IoError("row count does not match the grid");
    std::vector<double> out(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) out[n] = table.rows[n][c];
    return out;
}

std::vector<double> mesh_values(const Grid3& grid, const CsvTable& table, const std::string& name) {
    const auto c = table.column(name);
    if (table.rows.size() != grid.active_count()) throw IoError("row count does not match the grid");
    std::vector<double> out(grid.size(), 0.0);
    std::size_t r = 0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (grid.kind(n) == NodeKind::inactive) continue;
        out[n] = table.rows[r++][c];
    }
    return out;
}

CsvTable psi_table(const Grid2& grid, const NoFuelSolution& psi) {
    CsvTable t;
    t.header = {"x", "psi"};
    for (int i = -grid.I(); i <= grid.I(); ++i) {
        t.rows.push_back({grid.x(i), psi.values.at(static_cast<std::size_t>(i + grid.I()))});
    }
    return t;
}

CsvTable psi_table(const Grid3& grid, const NoFuelSolution& psi) {
    CsvTable t;
    t.header = {"x1", "x2", "z1", "z2", "psi"};
    for (std::size_t n = 0; n < grid.layer_stride(); ++n) {
        if (grid.kind(n) == NodeKind::inactive) continue;
        const auto [i, j, k] = grid.node(n);
        const double x1 = grid.x1(i);
        const double x2 = grid.x2(j);
        t.rows.push_back({x1, x2, Grid3::z1(x1, x2), Grid3::z2(x1, x2), psi.values.at(n)});
    }
    return t;
}

CsvTable regions_table(const RegionSet& regions) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    CsvTable t;
    t.header = regions.tracking ? std::vector<std::string>{"y", "z1", "width", "left", "right"}
                                : std::vector<std::string>{"y", "width", "left", "right"};
    for (const auto& s : regions.slices) {
        const double left = s.empty ? nan : s.left;
        const double right = s.empty ? nan : s.right;
        if (regions.tracking) {
            t.rows.push_back({s.y, s.z1, s.width, left, right});
        } else {
            t.rows.push_back({s.y, s.width, left, right});
        }
    }
    return t;
}

CsvTable switching_table(const RegionSet& regions) {
    CsvTable t;
    if (!regions.tracking) {
        t.header = {"y", "x", "a_before", "a_after"};
    } else if (regions.rotated) {
        t.header = {"y", "z1", "z2", "a_before", "a_after"};
    } else {
        t.header = {"y", "x1", "x2", "a_before", "a_after"};
    }
    const double r2 = std::sqrt(2.0);
    for (const auto& s : regions.slices) {
        for (const auto& p : s.switches) {
            if (!regions.tracking) {
                t.rows.push_back({s.y, p.position, p.a_before, p.a_after});
            } else if (regions.rotated) {
                t.rows.push_back({s.y, s.z1, p.position, p.a_before, p.a_after});
            } else {
                t.rows.push_back({s.y, (s.z1 + p.position) / r2, (s.z1 - p.position) / r2, p.a_before, p.a_after});
            }
        }
    }
    return t;
}

}  // namespace fuelctl
