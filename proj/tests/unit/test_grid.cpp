#include <doctest.h>

#include <cmath>

#include "fuelctl/errors.hpp"
#include "fuelctl/grid.hpp"

using namespace fuelctl;

TEST_CASE("grid2 steps and node counts") {
    const auto g = Grid2::build(1.0, 40.0, 100, 200);
    CHECK(g.h1() == doctest::Approx(0.01));
    CHECK(g.h2() == doctest::Approx(0.2));
    CHECK(g.nx() == 201);
    CHECK(g.layers() == 201);
    CHECK(g.classify(100, 5) == NodeKind::boundary);
    CHECK(g.classify(99, 200) == NodeKind::interior);
}

TEST_CASE("smallest legal grid2") {
    const auto g = Grid2::build(1.0, 1.0, 2, 1);
    CHECK(g.size() == 10);
    int interior = 0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (g.kind(n) == NodeKind::interior) {
            ++interior;
            CHECK(g.node(n).j == 1);
            CHECK(std::abs(g.node(n).i) < 2);
        }
    }
    CHECK(interior == 3);
}

TEST_CASE("grid2 classification rules") {
    const auto g = Grid2::build(1.0, 40.0, 10, 20);
    CHECK(g.classify(0, 0) == NodeKind::boundary);
    CHECK(g.classify(0, 20) == NodeKind::interior);
    CHECK(g.classify(-10, 3) == NodeKind::boundary);
    CHECK_THROWS_AS(g.classify(11, 0), IndexError);
    CHECK_THROWS_AS(g.classify(0, -1), IndexError);
    CHECK_THROWS_AS(g.at(0, 21), IndexError);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto nd = g.node(n);
        CHECK(g.index(nd.i, nd.j) == n);
        if (g.kind(n) == NodeKind::interior) {
            CHECK(g.contains(nd.i + 1, nd.j));
            CHECK(g.contains(nd.i - 1, nd.j));
            CHECK(g.contains(nd.i, nd.j - 1));
        }
    }
}

TEST_CASE("grid2 rejects bad parameters") {
    CHECK_THROWS_AS(Grid2::build(0.0, 1.0, 2, 1), InvalidParameter);
    CHECK_THROWS_AS(Grid2::build(1.0, -1.0, 2, 1), InvalidParameter);
    CHECK_THROWS_AS(Grid2::build(1.0, 1.0, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(Grid2::build(1.0, 1.0, 2, 0), InvalidParameter);
}

TEST_CASE("spatial grid2 has one layer and no fuel floor") {
    const auto g = Grid2::spatial(1.0, 10);
    CHECK_FALSE(g.has_fuel_axis());
    CHECK(g.layers() == 1);
    CHECK(g.classify(0, 0) == NodeKind::interior);
    CHECK(g.classify(10, 0) == NodeKind::boundary);
}

TEST_CASE("grid3 strip geometry") {
    const double l = 4.0 / std::sqrt(2.0);
    const auto g = Grid3::build(l, 10.0, 4.0, 4, 2);
    CHECK(g.h1() == doctest::Approx(l / 4));
    CHECK(g.h3() == doctest::Approx(2.0));
    std::size_t active = 0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto kind = g.kind(n);
        if (kind == NodeKind::inactive) continue;
        ++active;
        const auto nd = g.node(n);
        CHECK(g.index(nd.i, nd.j, nd.k) == n);
        const double x1 = g.x1(nd.i);
        const double x2 = g.x2(nd.j);
        CHECK(std::abs(x1 - x2) <= l + 1e-12);
        CHECK(std::abs(x1 + x2) <= 10.0 + 1e-12);
        const bool on_face = std::abs(nd.i - nd.j) == g.m() || std::abs(nd.i + nd.j) == g.sum_bound() || nd.k == 0;
        CHECK((kind == NodeKind::boundary) == on_face);
        if (kind == NodeKind::interior) {
            CHECK(g.kind(g.index(nd.i + 1, nd.j, nd.k)) != NodeKind::inactive);
            CHECK(g.kind(g.index(nd.i - 1, nd.j, nd.k)) != NodeKind::inactive);
            CHECK(g.kind(g.index(nd.i, nd.j + 1, nd.k)) != NodeKind::inactive);
            CHECK(g.kind(g.index(nd.i, nd.j - 1, nd.k)) != NodeKind::inactive);
            CHECK(g.kind(g.index(nd.i, nd.j, nd.k - 1)) != NodeKind::inactive);
        }
    }
    CHECK(active == g.active_count());
    CHECK_THROWS_AS(g.classify(0, 0, 3), IndexError);
    CHECK_THROWS_AS(Grid3::build(l, 10.0, 4.0, 0, 2), InvalidParameter);
}

TEST_CASE("rotated coordinates") {
    CHECK(Grid3::z1(1.0, 1.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(Grid3::z2(1.0, 1.0) == doctest::Approx(0.0));
    CHECK(Grid3::z2(2.0, 0.0) == doctest::Approx(std::sqrt(2.0)));
}
