#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fuelctl/grid.hpp"
#include "fuelctl/problems.hpp"

namespace fuelctl {

/// Constants of the Euler map S(v) = v - rho F[v].
struct SchemeConstants {
    double K_h = 1.0;         ///< Lipschitz constant of F in (centre value, differences)
    double beta_prime = 1.0;  ///< min(beta, 1)
    double rho = 0.5;         ///< 1 / (2 K_h)
    double gamma = 0.5;       ///< max(1 - rho beta', rho K_h)

    static SchemeConstants from_lipschitz(double K_h, double beta);
};

struct HamiltonianMin {
    double value;
    double a_star;
};

/// Relative tolerance under which two candidate values count as tied.
inline constexpr double kTieTolerance = 1e-12;

/// min over a in [a_lower, a_upper] of
///   (s + a)^+ dv_minus_x - (s + a)^- dv_plus_x + |a| dv_minus_y,   s = k x - drift_offset.
/// phi is piecewise linear with kinks at a = 0 and a = -s, so the minimum is
/// taken over {a_lower, 0, a_upper, -s}. Ties go to a = 0, then smallest |a|.
HamiltonianMin hamiltonian_min2(const CorrectionProblem& problem, double dv_minus_x, double dv_plus_x,
                                double dv_minus_y, double x);

/// min over a of |a| dv_minus_y - a^+ dv_plus_x2 + a^- dv_minus_x2 (kink at 0 only).
HamiltonianMin hamiltonian_min3(const TrackingProblem& problem, double dv_minus_x2, double dv_plus_x2,
                                double dv_minus_y);

/// Same minimisations on bare bounds; the `fuel` flag drops the |a| term.
HamiltonianMin minimize_combined(const ControlBounds& bounds, double s, double dv_minus, double dv_plus,
                                 double dv_minus_y);
HamiltonianMin minimize_split(const ControlBounds& bounds, double dv_minus, double dv_plus, double dv_minus_y);

/// Whether the uncontrolled drift and the control are upwinded jointly
/// ((s + a)^+ backward, (s + a)^- forward) or separately. The correction
/// family is joint; the reduced tracking problem on the artificial faces is
/// split, matching the tracking stencil.
enum class DriftSplitting { combined, split };

struct SandwichStats {
    double max_relative_gap = 0.0;
    double min_gap = 0.0;
    double max_violation = 0.0;
};

/// Monotone finite-difference operator F_h on a fixed grid with fixed
/// boundary data g. Interior rows are the discretised HJB equation, boundary
/// rows are v - g, inactive nodes are skipped.
class Scheme {
public:
    virtual ~Scheme() = default;

    virtual std::size_t size() const = 0;
    virtual NodeKind kind(std::size_t n) const = 0;
    virtual const SchemeConstants& constants() const = 0;
    virtual double beta() const = 0;
    virtual bool fuel_coupled() const = 0;
    virtual const MeshFunction& boundary_data() const = 0;
    /// Constant sub- and super-solutions used to start the sandwich iteration.
    virtual double initial_lower() const = 0;
    virtual double initial_upper() const = 0;

    /// Neighbour node indices of an interior node in the order evaluate_local() expects.
    virtual std::vector<std::size_t> stencil(std::size_t n) const = 0;
    /// F at node n written as F(x, r, (r - v_nbr)_nbr).
    virtual double evaluate_local(std::size_t n, double r, std::span<const double> differences,
                                  double* a_star = nullptr) const = 0;

    /// F[v] at every node; `a_star` (optional, may be empty) receives the minimising control,
    /// 0 at boundary and inactive nodes.
    virtual void residual(std::span<const double> v, std::span<double> F, std::span<double> a_star) const = 0;
    /// out = v - rho F[v] (Jacobi).
    virtual void euler_step(std::span<const double> v, std::span<double> out, double rho) const = 0;
    /// In-place v_n <- v_n - rho F_n[v] in storage order.
    virtual void gauss_seidel_sweep(std::span<double> v, double rho) const = 0;
    /// One Jacobi step of both envelopes plus the stopping/monotonicity statistics.
    virtual SandwichStats sandwich_step(std::span<const double> lower, std::span<const double> upper,
                                        std::span<double> lower_next, std::span<double> upper_next, double rho,
                                        double floor) const = 0;
};

/// Scheme on Grid2: the correction problem (fuel grid) or its infinite-fuel
/// companion (spatial grid).
class LineScheme final : public Scheme {
public:
    LineScheme(const CorrectionProblem& problem, const Grid2& grid, MeshFunction g,
               DriftSplitting splitting = DriftSplitting::combined);

    std::size_t size() const override { return grid_.size(); }
    NodeKind kind(std::size_t n) const override { return grid_.kind(n); }
    const SchemeConstants& constants() const override { return constants_; }
    double beta() const override { return problem_.beta(); }
    bool fuel_coupled() const override { return grid_.has_fuel_axis(); }
    const MeshFunction& boundary_data() const override { return g_; }
    double initial_lower() const override;
    double initial_upper() const override;

    std::vector<std::size_t> stencil(std::size_t n) const override;
    double evaluate_local(std::size_t n, double r, std::span<const double> differences,
                          double* a_star = nullptr) const override;

    void residual(std::span<const double> v, std::span<double> F, std::span<double> a_star) const override;
    void euler_step(std::span<const double> v, std::span<double> out, double rho) const override;
    void gauss_seidel_sweep(std::span<double> v, double rho) const override;
    SandwichStats sandwich_step(std::span<const double> lower, std::span<const double> upper,
                                std::span<double> lower_next, std::span<double> upper_next, double rho,
                                double floor) const override;

    const Grid2& grid() const { return grid_; }
    const CorrectionProblem& problem() const { return problem_; }
    DriftSplitting splitting() const { return splitting_; }

    /// Interior-row value at spatial position p = i + I; `vp`, `vm`, `vy` are
    /// the (i+1), (i-1), (j-1) neighbours.
    template <bool WantControl>
    double interior(std::size_t p, double vc, double vp, double vm, double vy, double* a_star) const;

private:
    CorrectionProblem problem_;
    Grid2 grid_;
    MeshFunction g_;
    DriftSplitting splitting_;
    SchemeConstants constants_;
    std::vector<double> s_;  // k x - drift_offset per spatial node
    double half_sigma2_over_h2_;
    double inv_h1_;
    double inv_h2_;
};

/// Scheme on Grid3 for the tracking problem (fuel grid) or its infinite-fuel
/// companion (spatial grid). The target drift is upwinded as
/// -mu^+ D^+ + mu^- D^-.
class TrackingScheme final : public Scheme {
public:
    TrackingScheme(const TrackingProblem& problem, const Grid3& grid, MeshFunction g);

    std::size_t size() const override { return grid_.size(); }
    NodeKind kind(std::size_t n) const override { return grid_.kind(n); }
    const SchemeConstants& constants() const override { return constants_; }
    double beta() const override { return problem_.beta(); }
    bool fuel_coupled() const override { return grid_.has_fuel_axis(); }
    const MeshFunction& boundary_data() const override { return g_; }
    double initial_lower() const override;
    double initial_upper() const override;

    std::vector<std::size_t> stencil(std::size_t n) const override;
    double evaluate_local(std::size_t n, double r, std::span<const double> differences,
                          double* a_star = nullptr) const override;

    void residual(std::span<const double> v, std::span<double> F, std::span<double> a_star) const override;
    void euler_step(std::span<const double> v, std::span<double> out, double rho) const override;
    void gauss_seidel_sweep(std::span<double> v, double rho) const override;
    SandwichStats sandwich_step(std::span<const double> lower, std::span<const double> upper,
                                std::span<double> lower_next, std::span<double> upper_next, double rho,
                                double floor) const override;

    const Grid3& grid() const { return grid_; }
    const TrackingProblem& problem() const { return problem_; }

    /// Neighbours in the order (i+1, i-1, j+1, j-1, k-1); p = i - row_min + m
    /// indexes the per-i drift tables.
    template <bool WantControl>
    double interior(std::size_t n, std::size_t p, double vc, const std::array<double, 5>& nb, double* a_star) const;

private:
    TrackingProblem problem_;
    Grid3 grid_;
    MeshFunction g_;
    SchemeConstants constants_;
    std::vector<double> mu_plus_over_h_;   // per lattice i, offset by i_offset_
    std::vector<double> mu_minus_over_h_;
    int i_offset_;
    double half_sigma2_over_h2_;
    double inv_h_;
    double inv_h3_;
};

/// Lipschitz constant K_h = max(1, beta) + sigma^2/h1^2 + (|k| l + a_max)/h1 + a_max/h2
/// (the a_max/h2 term only with a fuel axis) and the derived rho, gamma.
SchemeConstants lipschitz_constant(const CorrectionProblem& problem, const Grid2& grid);
/// Tracking analogue: drift bound |k| b_sat, control terms a_max/h2 (x2) and a_max/h3 (fuel).
SchemeConstants lipschitz_constant(const TrackingProblem& problem, const Grid3& grid);

struct SchemeEvaluation {
    MeshFunction F;
    std::vector<double> a_star;
};

/// F_h[v] and the pointwise minimising control. `fuel_coupled` must match
/// the grid (a spatial grid drops the |a| v_y term).
SchemeEvaluation apply_scheme(const CorrectionProblem& problem, const Grid2& grid, const MeshFunction& v,
                              const MeshFunction& g, bool fuel_coupled);
SchemeEvaluation apply_scheme(const TrackingProblem& problem, const Grid3& grid, const MeshFunction& v,
                              const MeshFunction& g, bool fuel_coupled);
SchemeEvaluation apply_scheme(const Scheme& scheme, const MeshFunction& v);

}  // namespace fuelctl
