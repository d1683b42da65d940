#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fuelctl/errors.hpp"
#include "fuelctl/psi.hpp"

using namespace fuelctl;

namespace {

double cosh_oracle(double x, double beta, double sigma, double l) {
    const double lambda = std::sqrt(2.0 * beta) / sigma;
    return (1.0 - std::cosh(lambda * x) / std::cosh(lambda * l)) / beta;
}

double psi_error(int I) {
    CorrectionParams c;
    c.k = 0.0;
    const CorrectionProblem p(c);
    const auto g = Grid2::build(1.0, 40.0, I, 1);
    const auto psi = solve_psi_correction(p, g);
    double err = 0.0;
    for (int i = -I; i <= I; ++i) {
        err = std::max(err, std::abs(psi.values[static_cast<std::size_t>(i + I)] - cosh_oracle(g.x(i), 0.1, 0.8, 1.0)));
    }
    return err;
}

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t q = c; q < n; ++q) a[r][q] -= f * a[c][q];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t q = r + 1; q < n; ++q) s -= a[r][q] * x[q];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace

TEST_CASE("psi matches the cosh closed form for k = 0") {
    const double coarse = psi_error(100);
    const double fine = psi_error(200);
    CHECK(coarse <= 0.01);
    CHECK(fine < coarse);

    CorrectionParams c;
    c.k = 0.0;
    const auto g = Grid2::build(1.0, 40.0, 100, 1);
    const auto psi = solve_psi_correction(CorrectionProblem(c), g);
    CHECK(psi.values[100] == doctest::Approx(1.382).epsilon(1e-3));
}

TEST_CASE("psi agrees with a dense solve of the upwind system") {
    CorrectionParams c;
    c.k = 2.0;
    const CorrectionProblem p(c);
    const int I = 12;
    const auto g = Grid2::build(1.0, 40.0, I, 1);
    const std::size_t n = 2 * I + 1;
    const double h = g.h1();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    a[0][0] = 1.0;
    a[n - 1][n - 1] = 1.0;
    for (std::size_t r = 1; r + 1 < n; ++r) {
        const double x = g.x(static_cast<int>(r) - I);
        const double drift = -2.0 * x;
        const double d = 0.32 / (h * h);
        // beta v - 1 - drift^+ (v+ - v)/h + drift^- (v - v-)/h - sigma^2/2 D2 v = 0
        a[r][r] = 0.1 + 2 * d + std::abs(drift) / h;
        a[r][r + 1] = -d - std::max(drift, 0.0) / h;
        a[r][r - 1] = -d - std::max(-drift, 0.0) / h;
        b[r] = 1.0;
    }
    const auto expect = dense_solve(a, b);
    const auto psi = solve_psi_correction(p, g);
    for (std::size_t r = 0; r < n; ++r) CHECK(psi.values[r] == doctest::Approx(expect[r]).epsilon(1e-12));
}

TEST_CASE("psi boundary values, bounds and symmetry") {
    CorrectionParams c;
    c.k = 2.0;
    const CorrectionProblem p(c);
    const auto g = Grid2::build(1.0, 40.0, 50, 1);
    const auto psi = solve_psi_correction(p, g);
    CHECK(psi.values.front() == 0.0);
    CHECK(psi.values.back() == 0.0);
    for (double v : psi.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 10.0);
    }
    // The reflected grid enumerates the same nodes from the other end.
    std::vector<double> reflected(psi.values.rbegin(), psi.values.rend());
    for (std::size_t r = 0; r < reflected.size(); ++r) {
        CHECK(std::abs(reflected[r] - psi.values[r]) <= 1e-12);
    }
}

TEST_CASE("psi rejects a grid with the wrong half-width") {
    const CorrectionProblem p(CorrectionParams{});
    CHECK_THROWS_AS(solve_psi_correction(p, Grid2::build(2.0, 40.0, 10, 1)), InvalidParameter);
}

TEST_CASE("tracking psi: Dirichlet rows, translation, cosh in x1 - x2") {
    TrackingParams t;
    t.x_max = 20.0;
    const TrackingProblem p(t);
    const auto g = Grid3::build(t.l, t.x_max, t.y_max, 8, 2);
    const auto psi = solve_psi_tracking(p, g);
    const int m = g.m();
    auto at = [&](int j, int d) { return psi.values[g.index(j + d, j, 0)]; };
    for (int j = g.row_min(); j <= g.row_max(); ++j) {
        CHECK(at(j, -m) == 0.0);
        CHECK(at(j, m) == 0.0);
    }
    // Rows whose whole x1 range lies in the saturated branch share one profile.
    std::vector<int> saturated;
    for (int j = g.row_min(); j <= g.row_max(); ++j) {
        if (g.x2(j) - t.l >= t.b_sat) saturated.push_back(j);
    }
    REQUIRE(saturated.size() >= 2);
    for (int j : saturated) {
        for (int d = -m; d <= m; ++d) CHECK(at(j, d) == at(saturated.front(), d));
    }
    // Saturated profiles are not symmetric in x1 - x2 unless k = 0.
    CHECK(std::abs(at(saturated.front(), -m / 2) - at(saturated.front(), m / 2)) > 1e-6);

    t.k = 0.0;
    const TrackingProblem flat(t);
    const auto psi0 = solve_psi_tracking(flat, g);
    const auto g2 = Grid2::build(t.l, 1.0, m, 1);
    CorrectionParams c;
    c.k = 0.0;
    c.l = t.l;
    const auto line = solve_psi_correction(CorrectionProblem(c), g2);
    for (int j = g.row_min(); j <= g.row_max(); ++j) {
        for (int d = -m; d <= m; ++d) {
            CHECK(psi0.values[g.index(j + d, j, 0)] == doctest::Approx(line.values[static_cast<std::size_t>(d + m)]));
        }
    }
    double err = 0.0;
    for (int d = -m; d <= m; ++d) {
        err = std::max(err, std::abs(line.values[static_cast<std::size_t>(d + m)] - cosh_oracle(d * g.h1(), 0.1, 0.8, t.l)));
    }
    CHECK(err < 0.2);
}

TEST_CASE("boundary data g") {
    const CorrectionProblem p(CorrectionParams{});
    const auto g = Grid2::build(1.0, 40.0, 10, 20);
    const auto psi = solve_psi_correction(p, g);
    const auto data = build_boundary_g(psi, g);
    CHECK(data[g.index(5, 0)] == psi.values[15]);
    CHECK(data[g.index(10, 3)] == 0.0);
    CHECK(data[g.index(10, 0)] == 0.0);
    CHECK(data[g.index(-10, 0)] == 0.0);
    CHECK_THROWS_AS(build_boundary_g(NoFuelSolution{{1.0, 2.0}}, g), InvalidParameter);
}
