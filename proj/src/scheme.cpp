#include "fuelctl/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fuelctl/errors.hpp"

namespace fuelctl {

namespace {

inline double pos(double z) { return z > 0.0 ? z : 0.0; }
inline double neg(double z) { return z < 0.0 ? -z : 0.0; }

/// Minimum over the first `count` candidates with the tie rule: among values
/// within kTieTolerance * (1 + |min|) of the minimum take the smallest |a|,
/// then the smaller value, then the earlier candidate.
inline HamiltonianMin select_min(std::span<const double> a, std::span<const double> phi, std::size_t count) {
    double best = phi[0];
    for (std::size_t c = 1; c < count; ++c) best = std::min(best, phi[c]);
    const double tol = kTieTolerance * (1.0 + std::abs(best));
    std::size_t chosen = 0;
    bool found = false;
    for (std::size_t c = 0; c < count; ++c) {
        if (phi[c] > best + tol) continue;
        const bool better = !found || std::abs(a[c]) < std::abs(a[chosen]) ||
                            (std::abs(a[c]) == std::abs(a[chosen]) && phi[c] < phi[chosen]);
        if (better) {
            chosen = c;
            found = true;
        }
    }
    return {best, a[chosen]};
}

/// Candidate set of the combined Hamiltonian: {0, a_lower, a_upper, -s if strictly inside}.
inline std::size_t combined_candidates(const ControlBounds& b, double s, std::array<double, 4>& a) {
    a = {0.0, b.lower(), b.upper(), 0.0};
    std::size_t count = 3;
    if (-s > b.lower() && -s < b.upper()) a[count++] = -s;
    return count;
}

inline double combined_phi(double s, double a, double dm, double dp, double dy) {
    const double drift = s + a;
    return pos(drift) * dm - neg(drift) * dp + std::abs(a) * dy;
}

inline double split_phi(double a, double dm, double dp, double dy) {
    return pos(a) * dm - neg(a) * dp + std::abs(a) * dy;
}

void require_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want) throw InvalidParameter(what, "size " + std::to_string(got) + " != " + std::to_string(want));
}

}  // namespace

SchemeConstants SchemeConstants::from_lipschitz(double K_h, double beta) {
    SchemeConstants c;
    c.K_h = K_h;
    c.beta_prime = std::min(beta, 1.0);
    c.rho = 1.0 / (2.0 * K_h);
    c.gamma = std::max(1.0 - c.rho * c.beta_prime, c.rho * K_h);
    return c;
}

HamiltonianMin minimize_combined(const ControlBounds& bounds, double s, double dv_minus, double dv_plus,
                                 double dv_minus_y) {
    std::array<double, 4> a{};
    std::array<double, 4> phi{};
    const std::size_t count = combined_candidates(bounds, s, a);
    for (std::size_t c = 0; c < count; ++c) phi[c] = combined_phi(s, a[c], dv_minus, dv_plus, dv_minus_y);
    return select_min(a, phi, count);
}

HamiltonianMin minimize_split(const ControlBounds& bounds, double dv_minus, double dv_plus, double dv_minus_y) {
    const std::array<double, 3> a{0.0, bounds.lower(), bounds.upper()};
    std::array<double, 3> phi{};
    for (std::size_t c = 0; c < 3; ++c) phi[c] = split_phi(a[c], dv_minus, dv_plus, dv_minus_y);
    return select_min(a, phi, 3);
}

HamiltonianMin hamiltonian_min2(const CorrectionProblem& problem, double dv_minus_x, double dv_plus_x,
                                double dv_minus_y, double x) {
    const double s = problem.k() * x - problem.drift_offset();
    return minimize_combined(problem.bounds(), s, dv_minus_x, dv_plus_x, dv_minus_y);
}

HamiltonianMin hamiltonian_min3(const TrackingProblem& problem, double dv_minus_x2, double dv_plus_x2,
                                double dv_minus_y) {
    // |a| Dy - a^+ D+ + a^- D-  ==  split_phi with (dm, dp) = (-D+, -D-).
    return minimize_split(problem.bounds(), -dv_plus_x2, -dv_minus_x2, dv_minus_y);
}

// ---------------------------------------------------------------------------
// Shared node loops. `At` evaluates an interior row from the mesh pointer;
// nodes are visited row by row so the spatial position p needs no division.

namespace {

template <class At, class Body>
inline void for_each_node(const At& at, std::size_t size, Body&& body) {
    const std::size_t len = at.row_length();
    for (std::size_t row = 0, n = 0; n < size; ++row) {
        const std::size_t base = at.row_base(row);
        for (std::size_t q = 0; q < len; ++q, ++n) body(n, base + q);
    }
}

template <class SchemeT, class At>
void residual_loop(const SchemeT& s, At at, std::span<const double> v, std::span<double> F, std::span<double> a_star) {
    const auto& g = s.boundary_data();
    const bool want = !a_star.empty();
    for_each_node(at, v.size(), [&](std::size_t n, std::size_t p) {
        switch (s.kind(n)) {
            case NodeKind::interior:
                if (want) {
                    F[n] = at.template operator()<true>(v.data(), n, p, &a_star[n]);
                } else {
                    F[n] = at.template operator()<false>(v.data(), n, p, nullptr);
                }
                break;
            case NodeKind::boundary:
                F[n] = v[n] - g[n];
                if (want) a_star[n] = 0.0;
                break;
            case NodeKind::inactive:
                F[n] = 0.0;
                if (want) a_star[n] = 0.0;
                break;
        }
    });
}

template <class SchemeT, class At>
void euler_loop(const SchemeT& s, At at, std::span<const double> v, std::span<double> out, double rho) {
    const auto& g = s.boundary_data();
    for_each_node(at, v.size(), [&](std::size_t n, std::size_t p) {
        switch (s.kind(n)) {
            case NodeKind::interior:
                out[n] = v[n] - rho * at.template operator()<false>(v.data(), n, p, nullptr);
                break;
            case NodeKind::boundary:
                out[n] = v[n] - rho * (v[n] - g[n]);
                break;
            case NodeKind::inactive:
                out[n] = v[n];
                break;
        }
    });
}

template <class SchemeT, class At>
void gauss_seidel_loop(const SchemeT& s, At at, std::span<double> v, double rho) {
    const auto& g = s.boundary_data();
    for_each_node(at, v.size(), [&](std::size_t n, std::size_t p) {
        switch (s.kind(n)) {
            case NodeKind::interior:
                v[n] -= rho * at.template operator()<false>(v.data(), n, p, nullptr);
                break;
            case NodeKind::boundary:
                v[n] -= rho * (v[n] - g[n]);
                break;
            case NodeKind::inactive:
                break;
        }
    });
}

template <class SchemeT, class At>
SandwichStats sandwich_loop(const SchemeT& s, At at, std::span<const double> lo, std::span<const double> hi,
                            std::span<double> lo_next, std::span<double> hi_next, double rho, double floor) {
    const auto& g = s.boundary_data();
    SandwichStats stats;
    stats.min_gap = std::numeric_limits<double>::infinity();
    for_each_node(at, lo.size(), [&](std::size_t n, std::size_t p) {
        double a = 0.0;
        double b = 0.0;
        switch (s.kind(n)) {
            case NodeKind::interior:
                a = lo[n] - rho * at.template operator()<false>(lo.data(), n, p, nullptr);
                b = hi[n] - rho * at.template operator()<false>(hi.data(), n, p, nullptr);
                break;
            case NodeKind::boundary:
                a = lo[n] - rho * (lo[n] - g[n]);
                b = hi[n] - rho * (hi[n] - g[n]);
                break;
            case NodeKind::inactive:
                lo_next[n] = lo[n];
                hi_next[n] = hi[n];
                return;
        }
        lo_next[n] = a;
        hi_next[n] = b;
        const double gap = b - a;
        stats.min_gap = std::min(stats.min_gap, gap);
        stats.max_relative_gap = std::max(stats.max_relative_gap, gap / std::max(a, floor));
        stats.max_violation = std::max({stats.max_violation, lo[n] - a, b - hi[n], a - b});
        if (!std::isfinite(a) || !std::isfinite(b)) stats.max_violation = std::numeric_limits<double>::infinity();
    });
    return stats;
}

}  // namespace

// ---------------------------------------------------------------------------
// LineScheme

LineScheme::LineScheme(const CorrectionProblem& problem, const Grid2& grid, MeshFunction g, DriftSplitting splitting)
    : problem_(problem), grid_(grid), g_(std::move(g)), splitting_(splitting),
      constants_(lipschitz_constant(problem, grid)) {
    require_size(g_.size(), grid_.size(), "g");
    if (std::abs(grid.l() - problem.l()) > 1e-12 * problem.l()) {
        throw InvalidParameter("l", "grid half-width does not match the problem");
    }
    s_.resize(static_cast<std::size_t>(grid_.nx()));
    for (int i = -grid_.I(); i <= grid_.I(); ++i) {
        s_[static_cast<std::size_t>(i + grid_.I())] = problem_.k() * grid_.x(i) - problem_.drift_offset();
    }
    half_sigma2_over_h2_ = 0.5 * problem_.sigma() * problem_.sigma() / (grid_.h1() * grid_.h1());
    inv_h1_ = 1.0 / grid_.h1();
    inv_h2_ = grid_.has_fuel_axis() ? 1.0 / grid_.h2() : 0.0;
}

double LineScheme::initial_lower() const { return std::min(0.0, problem_.reward().lower()) / problem_.beta(); }
double LineScheme::initial_upper() const { return std::max(0.0, problem_.reward().upper()) / problem_.beta(); }

template <bool WantControl>
double LineScheme::interior(std::size_t p, double vc, double vp, double vm, double vy, double* a_star) const {
    const double s = s_[p];
    const double dm = (vc - vm) * inv_h1_;
    const double dp = (vp - vc) * inv_h1_;
    const double dy = (vc - vy) * inv_h2_;  // inv_h2_ == 0 without a fuel axis
    const double diffusion = half_sigma2_over_h2_ * ((vp + vm) - 2.0 * vc);
    const auto& bounds = problem_.bounds();
    const auto& f = problem_.reward();

    double base = problem_.beta() * vc - diffusion;
    std::array<double, 4> a{};
    std::array<double, 4> phi{};
    std::size_t count = 0;
    if (splitting_ == DriftSplitting::combined) {
        count = combined_candidates(bounds, s, a);
        for (std::size_t c = 0; c < count; ++c) phi[c] = combined_phi(s, a[c], dm, dp, dy);
    } else {
        base += pos(s) * dm - neg(s) * dp;
        a = {0.0, bounds.lower(), bounds.upper(), 0.0};
        count = 3;
        for (std::size_t c = 0; c < count; ++c) phi[c] = split_phi(a[c], dm, dp, dy);
    }
    if (f.is_constant()) {
        base -= f.constant_value();
    } else {
        const std::array<double, 1> x{grid_.x(static_cast<int>(p) - grid_.I())};
        for (std::size_t c = 0; c < count; ++c) phi[c] -= f(x, a[c]);
    }
    if constexpr (WantControl) {
        const auto best = select_min(a, phi, count);
        *a_star = best.a_star;
        return base + best.value;
    } else {
        double best = phi[0];
        for (std::size_t c = 1; c < count; ++c) best = std::min(best, phi[c]);
        return base + best;
    }
}

namespace {

struct LineAt {
    const LineScheme* s;
    std::size_t nx;
    bool fuel;
    std::size_t row_length() const { return nx; }
    std::size_t row_base(std::size_t) const { return 0; }
    template <bool W>
    double operator()(const double* v, std::size_t n, std::size_t p, double* a) const {
        return s->interior<W>(p, v[n], v[n + 1], v[n - 1], fuel ? v[n - nx] : 0.0, a);
    }
};

}  // namespace

std::vector<std::size_t> LineScheme::stencil(std::size_t n) const {
    if (grid_.kind(n) != NodeKind::interior) return {};
    std::vector<std::size_t> out{n + 1, n - 1};
    if (grid_.has_fuel_axis()) out.push_back(n - static_cast<std::size_t>(grid_.nx()));
    return out;
}

double LineScheme::evaluate_local(std::size_t n, double r, std::span<const double> d, double* a_star) const {
    if (grid_.kind(n) != NodeKind::interior) return r - g_[n];
    const std::size_t want = grid_.has_fuel_axis() ? 3 : 2;
    require_size(d.size(), want, "differences");
    const double vy = grid_.has_fuel_axis() ? r - d[2] : 0.0;
    const std::size_t p = n % static_cast<std::size_t>(grid_.nx());
    if (a_star != nullptr) return interior<true>(p, r, r - d[0], r - d[1], vy, a_star);
    return interior<false>(p, r, r - d[0], r - d[1], vy, nullptr);
}

void LineScheme::residual(std::span<const double> v, std::span<double> F, std::span<double> a_star) const {
    require_size(v.size(), size(), "v");
    residual_loop(*this, LineAt{this, static_cast<std::size_t>(grid_.nx()), grid_.has_fuel_axis()}, v, F, a_star);
}

void LineScheme::euler_step(std::span<const double> v, std::span<double> out, double rho) const {
    require_size(v.size(), size(), "v");
    euler_loop(*this, LineAt{this, static_cast<std::size_t>(grid_.nx()), grid_.has_fuel_axis()}, v, out, rho);
}

void LineScheme::gauss_seidel_sweep(std::span<double> v, double rho) const {
    require_size(v.size(), size(), "v");
    gauss_seidel_loop(*this, LineAt{this, static_cast<std::size_t>(grid_.nx()), grid_.has_fuel_axis()}, v, rho);
}

SandwichStats LineScheme::sandwich_step(std::span<const double> lower, std::span<const double> upper,
                                        std::span<double> lower_next, std::span<double> upper_next, double rho,
                                        double floor) const {
    return sandwich_loop(*this, LineAt{this, static_cast<std::size_t>(grid_.nx()), grid_.has_fuel_axis()}, lower,
                         upper, lower_next, upper_next, rho, floor);
}

// ---------------------------------------------------------------------------
// TrackingScheme

TrackingScheme::TrackingScheme(const TrackingProblem& problem, const Grid3& grid, MeshFunction g)
    : problem_(problem), grid_(grid), g_(std::move(g)), constants_(lipschitz_constant(problem, grid)) {
    require_size(g_.size(), grid_.size(), "g");
    if (std::abs(grid.l() - problem.l()) > 1e-12 * problem.l()) {
        throw InvalidParameter("l", "grid half-width does not match the problem");
    }
    // Lattice i spans [row_min - m, row_max + m].
    i_offset_ = grid_.m() - grid_.row_min();
    const std::size_t span = static_cast<std::size_t>(grid_.rows() + 2 * grid_.m());
    mu_plus_over_h_.resize(span);
    mu_minus_over_h_.resize(span);
    const double h = grid_.h1();
    for (std::size_t p = 0; p < span; ++p) {
        const double drift = mu(problem_, grid_.x1(static_cast<int>(p) - i_offset_));
        mu_plus_over_h_[p] = pos(drift) / h;
        mu_minus_over_h_[p] = neg(drift) / h;
    }
    half_sigma2_over_h2_ = 0.5 * problem_.sigma() * problem_.sigma() / (h * h);
    inv_h_ = 1.0 / h;
    inv_h3_ = grid_.has_fuel_axis() ? 1.0 / grid_.h3() : 0.0;
}

double TrackingScheme::initial_lower() const { return std::min(0.0, problem_.reward().lower()) / problem_.beta(); }
double TrackingScheme::initial_upper() const { return std::max(0.0, problem_.reward().upper()) / problem_.beta(); }

template <bool WantControl>
double TrackingScheme::interior(std::size_t n, std::size_t p, double vc, const std::array<double, 5>& nb,
                                double* a_star) const {
    const double diffusion = half_sigma2_over_h2_ * ((nb[0] + nb[1]) - 2.0 * vc);
    const double drift = -mu_plus_over_h_[p] * (nb[0] - vc) + mu_minus_over_h_[p] * (vc - nb[1]);
    const double dp2 = (nb[2] - vc) * inv_h_;
    const double dm2 = (vc - nb[3]) * inv_h_;
    const double dy = (vc - nb[4]) * inv_h3_;

    const auto& bounds = problem_.bounds();
    const auto& f = problem_.reward();
    const std::array<double, 3> a{0.0, bounds.lower(), bounds.upper()};
    std::array<double, 3> phi{0.0, -bounds.lower() * (dy + dm2), bounds.upper() * (dy - dp2)};
    double base = problem_.beta() * vc - diffusion + drift;
    if (f.is_constant()) {
        base -= f.constant_value();
    } else {
        const auto [i, j, k] = grid_.node(n);
        const std::array<double, 2> x{grid_.x1(i), grid_.x2(j)};
        for (std::size_t c = 0; c < 3; ++c) phi[c] -= f(x, a[c]);
    }
    if constexpr (WantControl) {
        const auto best = select_min(a, phi, 3);
        *a_star = best.a_star;
        return base + best.value;
    } else {
        return base + std::min({phi[0], phi[1], phi[2]});
    }
}

namespace {

struct TrackingAt {
    const TrackingScheme* s;
    std::size_t rs;
    std::size_t ls;
    bool fuel;
    std::size_t rows;
    std::size_t row_length() const { return rs; }
    std::size_t row_base(std::size_t row) const { return row % rows; }
    template <bool W>
    double operator()(const double* v, std::size_t n, std::size_t p, double* a) const {
        const std::array<double, 5> nb{v[n + 1], v[n - 1], v[n + rs - 1], v[n - rs + 1], fuel ? v[n - ls] : 0.0};
        return s->interior<W>(n, p, v[n], nb, a);
    }
};

TrackingAt tracking_at(const TrackingScheme& s) {
    const auto& grid = s.grid();
    return TrackingAt{&s, grid.row_stride(), grid.layer_stride(), grid.has_fuel_axis(),
                      static_cast<std::size_t>(grid.rows())};
}

}  // namespace

std::vector<std::size_t> TrackingScheme::stencil(std::size_t n) const {
    if (grid_.kind(n) != NodeKind::interior) return {};
    const std::size_t rs = grid_.row_stride();
    std::vector<std::size_t> out{n + 1, n - 1, n + rs - 1, n - rs + 1};
    if (grid_.has_fuel_axis()) out.push_back(n - grid_.layer_stride());
    return out;
}

double TrackingScheme::evaluate_local(std::size_t n, double r, std::span<const double> d, double* a_star) const {
    if (grid_.kind(n) != NodeKind::interior) return r - g_[n];
    const std::size_t want = grid_.has_fuel_axis() ? 5 : 4;
    require_size(d.size(), want, "differences");
    const std::array<double, 5> nb{r - d[0], r - d[1], r - d[2], r - d[3], grid_.has_fuel_axis() ? r - d[4] : 0.0};
    const std::size_t p = (n % grid_.layer_stride()) / grid_.row_stride() + n % grid_.row_stride();
    if (a_star != nullptr) return interior<true>(n, p, r, nb, a_star);
    return interior<false>(n, p, r, nb, nullptr);
}

void TrackingScheme::residual(std::span<const double> v, std::span<double> F, std::span<double> a_star) const {
    require_size(v.size(), size(), "v");
    residual_loop(*this, tracking_at(*this), v, F,
                  a_star);
}

void TrackingScheme::euler_step(std::span<const double> v, std::span<double> out, double rho) const {
    require_size(v.size(), size(), "v");
    euler_loop(*this, tracking_at(*this), v, out, rho);
}

void TrackingScheme::gauss_seidel_sweep(std::span<double> v, double rho) const {
    require_size(v.size(), size(), "v");
    gauss_seidel_loop(*this, tracking_at(*this), v,
                      rho);
}

SandwichStats TrackingScheme::sandwich_step(std::span<const double> lower, std::span<const double> upper,
                                            std::span<double> lower_next, std::span<double> upper_next, double rho,
                                            double floor) const {
    return sandwich_loop(*this, tracking_at(*this),
                         lower, upper, lower_next, upper_next, rho, floor);
}

// ---------------------------------------------------------------------------

SchemeConstants lipschitz_constant(const CorrectionProblem& problem, const Grid2& grid) {
    const double a_max = problem.bounds().max_abs();
    const double h1 = grid.h1();
    double K = std::max(1.0, problem.beta()) + problem.sigma() * problem.sigma() / (h1 * h1) +
               (problem.drift_bound() + a_max) / h1;
    if (grid.has_fuel_axis()) K += a_max / grid.h2();
    return SchemeConstants::from_lipschitz(K, problem.beta());
}

SchemeConstants lipschitz_constant(const TrackingProblem& problem, const Grid3& grid) {
    const double a_max = problem.bounds().max_abs();
    const double h1 = grid.h1();
    double K = std::max(1.0, problem.beta()) + problem.sigma() * problem.sigma() / (h1 * h1) +
               problem.drift_bound() / h1 + a_max / grid.h2();
    if (grid.has_fuel_axis()) K += a_max / grid.h3();
    return SchemeConstants::from_lipschitz(K, problem.beta());
}

SchemeEvaluation apply_scheme(const Scheme& scheme, const MeshFunction& v) {
    SchemeEvaluation out{MeshFunction(scheme.size()), std::vector<double>(scheme.size(), 0.0)};
    scheme.residual(v.values(), out.F.values(), out.a_star);
    return out;
}

SchemeEvaluation apply_scheme(const CorrectionProblem& problem, const Grid2& grid, const MeshFunction& v,
                              const MeshFunction& g, bool fuel_coupled) {
    if (fuel_coupled != grid.has_fuel_axis()) {
        throw InvalidParameter("fuel_coupled", "flag does not match the grid's fuel axis");
    }
    return apply_scheme(LineScheme(problem, grid, g), v);
}

SchemeEvaluation apply_scheme(const TrackingProblem& problem, const Grid3& grid, const MeshFunction& v,
                              const MeshFunction& g, bool fuel_coupled) {
    if (fuel_coupled != grid.has_fuel_axis()) {
        throw InvalidParameter("fuel_coupled", "flag does not match the grid's fuel axis");
    }
    return apply_scheme(TrackingScheme(problem, grid, g), v);
}

}  // namespace fuelctl
