#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "talenti/quadrature.hpp"
#include "talenti/rearrangement.hpp"
#include "talenti/rng.hpp"

using namespace talenti;

namespace {

RadialField random_field(const RadialGrid& grid, std::uint64_t seed, double lo = 0.0,
                         double hi = 3.0) {
    Xoshiro256ss rng(seed);
    RadialField f = RadialField::zeros(grid);
    for (double& v : f.values) v = rng.uniform(lo, hi);
    return f;
}

}  // namespace

TEST_CASE("rearrangement of a hand-built two-level field") {
    // Value 2 on the outer half, value 1 on the inner half of a d = 1 segment.
    // The rearrangement puts the 2-block innermost on exactly half the volume.
    RadialGrid grid(1.0, 1, 8);
    RadialField f = RadialField::zeros(grid);
    for (std::size_t i = 0; i < 8; ++i) f.values[i] = i < 4 ? 1.0 : 2.0;
    RadialField r = schwarz_rearrange(f);
    for (std::size_t i = 0; i < 8; ++i) CHECK(r.values[i] == (i < 4 ? 2.0 : 1.0));
}

TEST_CASE("equimeasurability holds exactly at the cell-measure level") {
    RadialGrid grid(1.0, 2, 96);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        RadialField f = random_field(grid, seed);
        DecreasingRearrangement dr = decreasing_rearrangement(f);
        // The rearrangement carries exactly the multiset of (value, cell
        // volume) pairs of the input, laid out in value order.
        REQUIRE(dr.values.size() == f.values.size());
        std::vector<std::pair<double, double>> from_field, from_dr;
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            from_field.emplace_back(f.values[i], grid.cell_volume(i));
            from_dr.emplace_back(dr.values[i], dr.volumes[i]);
        }
        std::sort(from_field.begin(), from_field.end());
        std::sort(from_dr.begin(), from_dr.end());
        for (std::size_t i = 0; i < from_field.size(); ++i) {
            CHECK(from_field[i].first == from_dr[i].first);
            CHECK(from_field[i].second == from_dr[i].second);
        }
        // Distribution functions of the field and of its measure-level
        // rearrangement coincide up to summation order.
        for (double tau : {0.1, 0.9, 1.7, 2.5}) {
            CHECK(dr.level_measure(tau) ==
                  doctest::Approx(distribution_function(f, tau)).epsilon(1e-14));
        }
        RadialField r = schwarz_rearrange(f);
        CHECK(integrate_cells(f) == doctest::Approx(integrate_cells(r)).epsilon(1e-12));
    }
}

TEST_CASE("rearrangement is nonincreasing and idempotent to the bit") {
    RadialGrid grid(2.0, 3, 64);
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
        RadialField f = random_field(grid, seed);
        RadialField r = schwarz_rearrange(f);
        for (std::size_t i = 1; i < r.values.size(); ++i) CHECK(r.values[i] <= r.values[i - 1]);
        RadialField rr = schwarz_rearrange(r);
        for (std::size_t i = 0; i < r.values.size(); ++i) CHECK(rr.values[i] == r.values[i]);
    }
}

TEST_CASE("concentration profile of an indicator matches the ball volume") {
    RadialGrid grid(1.0, 3, 50);
    // Indicator of the inner 20 cells: cumulative integral saturates at the
    // ball volume of the 20th node.
    RadialField f = RadialField::zeros(grid);
    for (std::size_t i = 0; i < 20; ++i) f.values[i] = 1.0;
    ConcentrationProfile prof = concentration_profile(f);
    double sat = oracle::ball_volume(3, grid.node(20));
    CHECK(prof.node_cumulative[20] == doctest::Approx(sat).epsilon(1e-13));
    CHECK(prof.node_cumulative[50] == doctest::Approx(sat).epsilon(1e-13));
    CHECK(prof.node_cumulative[10] ==
          doctest::Approx(oracle::ball_volume(3, grid.node(10))).epsilon(1e-13));
}

TEST_CASE("dominance on nested indicators goes the right way") {
    RadialGrid grid(1.0, 2, 40);
    // Same mass, one spread wider: the concentrated one dominates.
    RadialField tight = RadialField::zeros(grid);
    RadialField wide = RadialField::zeros(grid);
    for (std::size_t i = 0; i < 10; ++i) tight.values[i] = 4.0;
    for (std::size_t i = 0; i < 40; ++i) wide.values[i] = 4.0 * grid.ball_volume(grid.node(10)) /
                                                         grid.domain_volume();
    CHECK(integrate_cells(tight) == doctest::Approx(integrate_cells(wide)).epsilon(1e-12));
    DominanceResult a = dominates(wide, tight);
    CHECK(a.dominated);
    CHECK(a.margin <= 1e-12);
    DominanceResult b = dominates(tight, wide);
    CHECK_FALSE(b.dominated);
    CHECK(b.margin > 1e-3);
}

TEST_CASE("dominance is reflexive with zero margin") {
    RadialGrid grid(1.0, 2, 33);
    RadialField f = schwarz_rearrange(random_field(grid, 99));
    DominanceResult r = dominates(f, f);
    CHECK(r.dominated);
    CHECK(r.margin == 0.0);
}

TEST_CASE("hardy-littlewood gap is nonnegative and zero for co-monotone pairs") {
    RadialGrid grid(1.0, 2, 64);
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        RadialField f = random_field(grid, seed);
        RadialField g = random_field(grid, seed + 1000);
        double gap = hardy_littlewood_gap(f, g);
        CHECK(gap >= 0.0);
    }
    RadialField f = schwarz_rearrange(random_field(grid, 7));
    CHECK(hardy_littlewood_gap(f, f) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("decreasing rearrangement matches a brute-force sorted profile") {
    RadialGrid grid(1.0, 1, 12);
    RadialField f = random_field(grid, 5);
    // d = 1 with uniform cells: all cell volumes equal, so the rearranged
    // values are exactly the sorted values.
    RadialField r = schwarz_rearrange(f);
    std::vector<double> sorted = oracle::sorted_desc(f.values);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(r.values[i] == doctest::Approx(sorted[i]).epsilon(1e-14));
}

TEST_CASE("space-time rearrangement acts level by level") {
    RadialGrid grid(1.0, 2, 16);
    TimeGrid tgrid(1.0, 4);
    Xoshiro256ss rng(31);
    SpaceTimeField f = SpaceTimeField::zeros(grid, tgrid, FieldKind::state);
    for (double& v : f.values) v = rng.uniform(0.0, 2.0);
    SpaceTimeField r = schwarz_rearrange(f);
    for (std::size_t n = 0; n <= 4; ++n) {
        RadialField level = schwarz_rearrange(f.slice_field(n));
        for (std::size_t i = 0; i < 16; ++i) CHECK(r.at(n, i) == level.values[i]);
    }
}

TEST_CASE("polya-szego gap on smooth profiles is nonnegative up to discretization") {
    RadialGrid grid(1.0, 2, 128);
    // Off-center smooth bump: rearrangement must not increase the energy by
    // more than the discretization slack.
    RadialField f = RadialField::sample(grid, [](double r) {
        return std::exp(-18.0 * (r - 0.4) * (r - 0.4));
    });
    double gap = polya_szego_gap(f);
    CHECK(gap >= -1.0 / 128.0);
}
