#include "fuelctl/validate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "fuelctl/errors.hpp"

namespace fuelctl {

namespace {

std::mt19937_64 path_rng(std::uint64_t seed, std::size_t start, std::int64_t path) {
    const auto p = static_cast<std::uint64_t>(path);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(p),
                      static_cast<std::uint32_t>(p >> 32)};
    return std::mt19937_64(seq);
}

void check_config(const MCConfig& config) {
    if (config.paths < 1) throw InvalidParameter("paths", "must be at least 1");
    if (!(config.dt > 0.0)) throw InvalidParameter("dt", "must be positive");
    if (!(config.t_max >= config.dt)) throw InvalidParameter("t_max", "must be at least dt");
}

struct Outcome {
    double reward = 0.0;
    bool exited = false;
    bool exhausted = false;
};

/// Model interface: dim, inside(x), control(x, y), advance(x, a, dt, noise),
/// reward(x, a), beta, terminal(x).
template <class Model>
Outcome run_path(const Model& model, std::array<double, 2> x, double y, const MCConfig& config,
                 std::mt19937_64& rng, PathTrace* trace) {
    Outcome out;
    std::normal_distribution<double> normal(0.0, 1.0);
    const double dt = config.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double beta = model.beta;
    const double step_weight = -std::expm1(-beta * dt) / beta;
    const auto steps = static_cast<std::int64_t>(std::floor(config.t_max / dt + 1e-9));
    double discount = 1.0;
    double t = 0.0;
    if (!model.inside(x)) {
        out.exited = true;
        if (trace) trace->exited = true;
        return out;
    }
    for (std::int64_t n = 0; n < steps; ++n) {
        double a = 0.0;
        if (y > 0.0) {
            a = model.control(x, y);
            if (std::abs(a) * dt >= y) {
                // Spend exactly the remaining fuel over this step.
                a = std::copysign(y / dt, a);
                y = 0.0;
                out.exhausted = true;
            } else {
                y -= std::abs(a) * dt;
            }
        }
        if (trace) {
            trace->t.push_back(t);
            trace->x.push_back(std::vector<double>(x.begin(), x.begin() + model.dim));
            trace->y.push_back(y + std::abs(a) * dt);
            trace->a.push_back(a);
        }
        out.reward += discount * step_weight * model.reward(x, a);
        model.advance(x, a, dt, sqrt_dt * normal(rng));
        discount *= std::exp(-beta * dt);
        t = static_cast<double>(n + 1) * dt;
        if (!model.inside(x)) {
            out.exited = true;
            break;
        }
        if (config.terminal_psi && out.exhausted) {
            out.reward += discount * model.terminal(x);
            break;
        }
    }
    if (trace) {
        trace->t.push_back(t);
        trace->x.push_back(std::vector<double>(x.begin(), x.begin() + model.dim));
        trace->y.push_back(y);
        trace->a.push_back(0.0);
        trace->reward = out.reward;
        trace->exited = out.exited;
    }
    return out;
}

template <class Model>
std::vector<MCEstimate> run_all(const Model& model, const MCConfig& config,
                                const std::vector<std::array<double, 2>>& xs, const std::vector<double>& ys) {
    std::vector<MCEstimate> out;
    for (std::size_t s = 0; s < xs.size(); ++s) {
        double sum = 0.0;
        double sum_sq = 0.0;
        std::int64_t exits = 0;
        std::int64_t exhausted = 0;
        for (std::int64_t p = 0; p < config.paths; ++p) {
            auto rng = path_rng(config.seed, s, p);
            const auto o = run_path(model, xs[s], ys[s], config, rng, nullptr);
            sum += o.reward;
            sum_sq += o.reward * o.reward;
            exits += o.exited ? 1 : 0;
            exhausted += o.exhausted ? 1 : 0;
        }
        const auto n = static_cast<double>(config.paths);
        MCEstimate e;
        e.paths = config.paths;
        e.mean = sum / n;
        const double var = config.paths > 1 ? std::max(0.0, (sum_sq - n * e.mean * e.mean) / (n - 1.0)) : 0.0;
        e.std_error = std::sqrt(var / n);
        e.exit_fraction = static_cast<double>(exits) / n;
        e.fuel_exhausted_fraction = static_cast<double>(exhausted) / n;
        out.push_back(e);
    }
    return out;
}

double interpolate_line(const std::vector<double>& values, double h, int I, double x) {
    const double u = std::clamp(x / h + I, 0.0, static_cast<double>(2 * I));
    const auto lo = std::min(static_cast<int>(std::floor(u)), 2 * I - 1);
    const double w = u - lo;
    return (1.0 - w) * values[static_cast<std::size_t>(lo)] + w * values[static_cast<std::size_t>(lo + 1)];
}

struct CorrectionModel {
    const CorrectionProblem* problem;
    const Grid2* grid;
    const Policy* policy;
    const NoFuelSolution* psi;
    double beta;
    int dim = 1;

    bool inside(const std::array<double, 2>& x) const { return std::abs(x[0]) < problem->l(); }
    double control(const std::array<double, 2>& x, double y) const {
        return policy ? lookup_policy(*grid, *policy, x[0], y) : 0.0;
    }
    void advance(std::array<double, 2>& x, double a, double dt, double dw) const {
        x[0] += (-problem->k() * x[0] + problem->drift_offset() - a) * dt + problem->sigma() * dw;
    }
    double reward(const std::array<double, 2>& x, double a) const {
        const auto& f = problem->reward();
        return f.is_constant() ? f.constant_value() : f(std::span<const double>(x.data(), 1), a);
    }
    double terminal(const std::array<double, 2>& x) const {
        return psi ? interpolate_line(psi->values, grid->h1(), grid->I(), x[0]) : 0.0;
    }
};

struct TrackingModel {
    const TrackingProblem* problem;
    const Grid3* grid;
    const Policy* policy;
    const NoFuelSolution* psi;
    double beta;
    int dim = 2;

    bool inside(const std::array<double, 2>& x) const { return std::abs(x[0] - x[1]) < problem->l(); }
    double control(const std::array<double, 2>& x, double y) const {
        return policy ? lookup_policy(*grid, *policy, x[0], x[1], y) : 0.0;
    }
    void advance(std::array<double, 2>& x, double a, double dt, double dw) const {
        x[0] += mu(*problem, x[0]) * dt + problem->sigma() * dw;
        x[1] += a * dt;
    }
    double reward(const std::array<double, 2>& x, double a) const {
        const auto& f = problem->reward();
        return f.is_constant() ? f.constant_value() : f(std::span<const double>(x.data(), 2), a);
    }
    double terminal(const std::array<double, 2>& x) const {
        if (!psi) return 0.0;
        // Nearest stored node of the psi layer.
        const double h = grid->h1();
        const int m = grid->m();
        int j = std::clamp(static_cast<int>(std::lround(x[1] / h)), grid->row_min(), grid->row_max());
        int i = std::clamp(static_cast<int>(std::lround(x[0] / h)), j - m, j + m);
        return psi->values[grid->index(i, j, 0)];
    }
};

std::array<double, 2> start_position(const StartPoint& s, std::size_t dim) {
    if (s.x.size() != dim) {
        throw InvalidStart("start point needs " + std::to_string(dim) + " spatial coordinate(s)");
    }
    std::array<double, 2> x{0.0, 0.0};
    std::copy(s.x.begin(), s.x.end(), x.begin());
    return x;
}

std::vector<std::array<double, 2>> correction_starts(const CorrectionProblem& problem, const MCConfig& config,
                                                     std::vector<double>& ys, bool check_y) {
    std::vector<std::array<double, 2>> xs;
    for (const auto& s : config.starts) {
        const auto x = start_position(s, 1);
        if (!(std::abs(x[0]) <= problem.l())) throw InvalidStart("start x outside [-l, l]");
        if (check_y && !(s.y >= 0.0)) throw InvalidStart("start fuel must be nonnegative");
        xs.push_back(x);
        ys.push_back(check_y ? s.y : 0.0);
    }
    return xs;
}

std::vector<std::array<double, 2>> tracking_starts(const TrackingProblem& problem, const MCConfig& config,
                                                   std::vector<double>& ys, bool check_y) {
    std::vector<std::array<double, 2>> xs;
    for (const auto& s : config.starts) {
        const auto x = start_position(s, 2);
        if (!(std::abs(x[0] - x[1]) <= problem.l())) throw InvalidStart("start outside |x1 - x2| <= l");
        if (check_y && !(s.y >= 0.0)) throw InvalidStart("start fuel must be nonnegative");
        xs.push_back(x);
        ys.push_back(check_y ? s.y : 0.0);
    }
    return xs;
}

}  // namespace

double horizon_bias_bound(double beta, double t_max) { return std::exp(-beta * t_max) / beta; }

double lookup_policy(const Grid2& grid, const Policy& policy, double x, double y) {
    const int I = grid.I();
    const int i = std::clamp(static_cast<int>(std::lround(x / grid.h1())), -I + 1, I - 1);
    int j = 0;
    if (grid.has_fuel_axis()) {
        j = std::clamp(static_cast<int>(std::lround(y / grid.h2())), y > 0.0 ? 1 : 0, grid.J());
    }
    return policy.a_star[grid.index(i, j)];
}

double lookup_policy(const Grid3& grid, const Policy& policy, double x1, double x2, double y) {
    const double h = grid.h1();
    const int m = grid.m();
    int i = static_cast<int>(std::lround(x1 / h));
    int j = static_cast<int>(std::lround(x2 / h));
    int d = std::clamp(i - j, -m + 1, m - 1);
    int s = std::clamp(i + j, -grid.sum_bound() + 1, grid.sum_bound() - 1);
    if ((s + d) % 2 != 0) d += d > 0 ? -1 : 1;
    i = (s + d) / 2;
    j = (s - d) / 2;
    int k = 0;
    if (grid.has_fuel_axis()) {
        k = std::clamp(static_cast<int>(std::lround(y / grid.h3())), y > 0.0 ? 1 : 0, grid.K());
    }
    return policy.a_star[grid.index(i, j, k)];
}

std::vector<MCEstimate> simulate_policy(const CorrectionProblem& problem, const Grid2& grid, const Policy& policy,
                                        const NoFuelSolution& psi, const MCConfig& config) {
    check_config(config);
    if (policy.a_star.size() != grid.size()) throw InvalidParameter("policy", "size does not match the grid");
    std::vector<double> ys;
    const auto xs = correction_starts(problem, config, ys, true);
    const CorrectionModel model{&problem, &grid, &policy, &psi, problem.beta()};
    return run_all(model, config, xs, ys);
}

std::vector<MCEstimate> simulate_policy(const TrackingProblem& problem, const Grid3& grid, const Policy& policy,
                                        const NoFuelSolution& psi, const MCConfig& config) {
    check_config(config);
    if (policy.a_star.size() != grid.size()) throw InvalidParameter("policy", "size does not match the grid");
    std::vector<double> ys;
    const auto xs = tracking_starts(problem, config, ys, true);
    const TrackingModel model{&problem, &grid, &policy, &psi, problem.beta()};
    return run_all(model, config, xs, ys);
}

std::vector<MCEstimate> simulate_uncontrolled(const CorrectionProblem& problem, const MCConfig& config) {
    check_config(config);
    std::vector<double> ys;
    const auto xs = correction_starts(problem, config, ys, false);
    const CorrectionModel model{&problem, nullptr, nullptr, nullptr, problem.beta()};
    return run_all(model, config, xs, ys);
}

std::vector<MCEstimate> simulate_uncontrolled(const TrackingProblem& problem, const MCConfig& config) {
    check_config(config);
    std::vector<double> ys;
    const auto xs = tracking_starts(problem, config, ys, false);
    const TrackingModel model{&problem, nullptr, nullptr, nullptr, problem.beta()};
    return run_all(model, config, xs, ys);
}

PathTrace trace_path(const CorrectionProblem& problem, const Grid2& grid, const Policy& policy,
                     const StartPoint& start, const MCConfig& config, std::int64_t path_index) {
    check_config(config);
    MCConfig one = config;
    one.starts = {start};
    std::vector<double> ys;
    const auto xs = correction_starts(problem, one, ys, true);
    const CorrectionModel model{&problem, &grid, &policy, nullptr, problem.beta()};
    auto rng = path_rng(config.seed, 0, path_index);
    PathTrace trace;
    run_path(model, xs[0], ys[0], config, rng, &trace);
    return trace;
}

PathTrace trace_path(const TrackingProblem& problem, const Grid3& grid, const Policy& policy,
                     const StartPoint& start, const MCConfig& config, std::int64_t path_index) {
    check_config(config);
    MCConfig one = config;
    one.starts = {start};
    std::vector<double> ys;
    const auto xs = tracking_starts(problem, one, ys, true);
    const TrackingModel model{&problem, &grid, &policy, nullptr, problem.beta()};
    auto rng = path_rng(config.seed, 0, path_index);
    PathTrace trace;
    run_path(model, xs[0], ys[0], config, rng, &trace);
    return trace;
}

}  // namespace fuelctl
