#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "talenti/errors.hpp"
#include "talenti/grid.hpp"

using namespace talenti;

TEST_CASE("ball volumes match the closed forms for d = 1, 2, 3") {
    for (std::size_t d : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
        RadialGrid grid(1.5, d, 100);
        for (double r : {0.0, 0.2, 0.7, 1.0, 1.5}) {
            CHECK(grid.ball_volume(r) ==
                  doctest::Approx(oracle::ball_volume(d, r)).epsilon(1e-14));
        }
        CHECK(grid.domain_volume() == doctest::Approx(oracle::ball_volume(d, 1.5)).epsilon(1e-14));
    }
}

TEST_CASE("cell volumes are exact annulus volumes and sum to the domain") {
    RadialGrid grid(2.0, 3, 37);
    double total = 0.0;
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        double lo = grid.node(i), hi = grid.node(i + 1);
        CHECK(grid.cell_volume(i) ==
              doctest::Approx(oracle::ball_volume(3, hi) - oracle::ball_volume(3, lo))
                  .epsilon(1e-13));
        total += grid.cell_volume(i);
    }
    CHECK(total == doctest::Approx(grid.domain_volume()).epsilon(1e-13));
}

TEST_CASE("nodes are uniform and cell centers sit between them") {
    RadialGrid grid(1.0, 2, 64);
    CHECK(grid.node(0) == 0.0);
    CHECK(grid.node(64) == 1.0);
    for (std::size_t i = 0; i < 64; ++i) {
        CHECK(grid.node(i + 1) - grid.node(i) == doctest::Approx(grid.spacing()).epsilon(1e-15));
        CHECK(grid.cell_center(i) > grid.node(i));
        CHECK(grid.cell_center(i) < grid.node(i + 1));
    }
}

TEST_CASE("time grid pins the final level to the horizon exactly") {
    TimeGrid tgrid(0.3, 7);
    CHECK(tgrid.time(0) == 0.0);
    CHECK(tgrid.time(7) == 0.3);
    CHECK(tgrid.n_levels() == 8);
    for (std::size_t n = 0; n < 7; ++n) CHECK(tgrid.time(n + 1) > tgrid.time(n));
}

TEST_CASE("invalid grid parameters are rejected") {
    CHECK_THROWS_AS(RadialGrid(0.0, 2, 16), DomainError);
    CHECK_THROWS_AS(RadialGrid(1.0, 0, 16), DomainError);
    CHECK_THROWS_AS(RadialGrid(1.0, 2, 0), DomainError);
    CHECK_THROWS_AS(TimeGrid(-1.0, 16), DomainError);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), DomainError);
}

TEST_CASE("same_as distinguishes grids by all parameters") {
    RadialGrid a(1.0, 2, 16);
    CHECK(a.same_as(RadialGrid(1.0, 2, 16)));
    CHECK_FALSE(a.same_as(RadialGrid(1.0, 3, 16)));
    CHECK_FALSE(a.same_as(RadialGrid(1.0, 2, 17)));
    CHECK_FALSE(a.same_as(RadialGrid(1.1, 2, 16)));
}
