#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "oracles.hpp"
#include "talenti/experiments.hpp"
#include "talenti/heat.hpp"
#include "talenti/quadrature.hpp"
#include "talenti/rearrangement.hpp"
#include "talenti/rng.hpp"

using namespace talenti;

TEST_CASE("cutoff profile is a plateau with a quintic bridge") {
    CutoffSpec c = make_cutoff(0.25, 0.75);
    CHECK(c(0.0) == 1.0);
    CHECK(c(0.25) == 1.0);
    CHECK(c(0.75) == 0.0);
    CHECK(c(0.9) == 0.0);
    CHECK(c(0.5) == doctest::Approx(0.5).epsilon(1e-14));
    for (double r : {0.3, 0.45, 0.6, 0.7}) {
        double x = (0.75 - r) / 0.5;
        CHECK(c(r) == doctest::Approx(oracle::smoothstep5(x)).epsilon(1e-13));
    }
    // Nonincreasing across the bridge.
    double prev = 2.0;
    for (int i = 0; i <= 100; ++i) {
        double v = c(0.01 * i);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("step approximation reproduces the profile from nested annular layers") {
    CutoffSpec c = make_cutoff(0.125, 0.25);
    for (std::size_t k : {std::size_t{1}, std::size_t{4}, std::size_t{16}}) {
        StepApproximation s = step_approximation([&](double r) { return c(r); }, 1.0, k);
        REQUIRE(s.radii.size() == k + 1);
        REQUIRE(s.beta.size() == k);
        for (double b : s.beta) CHECK(b >= 0.0);
        // The nested-layer sum telescopes back to the annulus step values.
        for (std::size_t j = 0; j < k; ++j) {
            double mid = 0.5 * (s.radii[j] + s.radii[j + 1]);
            CHECK(s.evaluate_nested(mid) == doctest::Approx(s.evaluate_annulus(mid)).epsilon(1e-12));
        }
    }
}

TEST_CASE("step approximation error decreases in the layer count") {
    CutoffSpec c = make_cutoff(0.125, 0.25);
    RadialGrid grid(1.0, 2, 512);
    std::vector<double> errs;
    for (std::size_t k : {std::size_t{4}, std::size_t{16}, std::size_t{64}}) {
        StepApproximation s = step_approximation([&](double r) { return c(r); }, 1.0, k);
        double err = 0.0;
        for (std::size_t j = 0; j < grid.n_cells(); ++j) {
            double r = grid.cell_center(j);
            err += std::abs(s.evaluate_annulus(r) - c(r)) * grid.cell_volume(j);
        }
        errs.push_back(err);
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
}

TEST_CASE("random admissible controls hit the volume and stay in bounds") {
    RadialGrid grid(1.0, 2, 40);
    TimeGrid tgrid(1.0, 32);
    double volume = 0.25 * grid.domain_volume() * tgrid.horizon();
    for (std::size_t flavor = 0; flavor < 8; ++flavor) {
        Xoshiro256ss rng(1234 + flavor);
        SpaceTimeField f = random_admissible(grid, tgrid, volume, rng, flavor);
        for (double v : f.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(integrate_spacetime(f) == doctest::Approx(volume).epsilon(1e-12));
    }
}

TEST_CASE("random admissible is reproducible from the seed") {
    RadialGrid grid(1.0, 2, 24);
    TimeGrid tgrid(1.0, 16);
    Xoshiro256ss a(77), b(77);
    SpaceTimeField fa = random_admissible(grid, tgrid, 0.3, a, 1);
    SpaceTimeField fb = random_admissible(grid, tgrid, 0.3, b, 1);
    for (std::size_t i = 0; i < fa.values.size(); ++i) CHECK(fa.values[i] == fb.values[i]);
}

TEST_CASE("the slab flavor is its own rearrangement and gives zero margin") {
    RadialGrid grid(1.0, 2, 48);
    TimeGrid tgrid(1.0, 48);
    Xoshiro256ss rng(5);
    SpaceTimeField f = random_admissible(grid, tgrid, 0.2, rng, 2);
    SpaceTimeField r = schwarz_rearrange(f);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(f.values[i] == r.values[i]);
    TalentiCheckResult res = verify_talenti(f);
    CHECK(res.worst_margin == 0.0);
}

TEST_CASE("comparison margins are nonpositive for random sources and shrink on refinement") {
    std::vector<double> margins;
    for (std::size_t n : {32, 64, 128}) {
        RadialGrid grid(1.0, 2, n);
        TimeGrid tgrid(1.0, n);
        Xoshiro256ss rng(9);
        SpaceTimeField f =
            random_admissible(grid, tgrid, 0.25 * grid.domain_volume(), rng, 0);
        TalentiCheckResult res = verify_talenti(f);
        CHECK(res.worst_margin <= talenti_tolerance(grid, tgrid));
        margins.push_back(std::max(0.0, res.worst_margin));
    }
    CHECK(margins[1] <= margins[0] + 1e-15);
    CHECK(margins[2] <= margins[1] + 1e-15);
}

TEST_CASE("counterexample report separates the two optimal radius curves near the horizon") {
    RunConfig cfg;
    cfg.n_r = 48;
    cfg.n_t = 256;
    CounterexampleReport rep = run_counterexample(cfg);
    CHECK(rep.margin_phi > 0.0);
    CHECK(rep.margin_psi > 0.0);
    CHECK(rep.control_distance > 0.0);
    CHECK(rep.min_radius_separation > 0.0);
    CHECK(rep.separation_levels == std::max<std::size_t>(2, cfg.n_t / 16));
    CHECK(rep.phi.radius_terminal < rep.psi.radius_terminal);
    // Cross objectives from the forward solver agree with the duality values
    // up to the reported gap.
    CHECK(std::abs(rep.J_phi_on_f_phi - rep.phi.objective) <= rep.max_duality_gap * (1 + 1e-12));
    CHECK(std::abs(rep.J_psi_on_f_psi - rep.psi.objective) <= rep.max_duality_gap * (1 + 1e-12));
}

TEST_CASE("counterexample artifacts live on the configured grids") {
    RunConfig cfg;
    cfg.n_r = 32;
    cfg.n_t = 64;
    CounterexampleArtifacts arts;
    CounterexampleReport rep = run_counterexample(cfg, &arts);
    CHECK(arts.control_phi.grid.same_as(cfg.make_grid()));
    CHECK(arts.control_psi.tgrid.same_as(cfg.make_time_grid()));
    CHECK(arts.adjoint_phi.values.size() == (cfg.n_t + 1) * cfg.n_r);
    CHECK(arts.state_phi_terminal.values.size() == cfg.n_r);
    CHECK(integrate_spacetime(arts.control_phi) == doctest::Approx(rep.volume).epsilon(1e-9));
}

TEST_CASE("radius curves stay inside the domain and positive on a short horizon") {
    // With a short horizon the optimal sources act from the start, so the
    // level radii stay strictly inside (0, R) on every level before the last.
    RunConfig cfg;
    cfg.T = 0.15;
    cfg.n_r = 64;
    cfg.n_t = 128;
    CounterexampleReport rep = run_counterexample(cfg);
    for (std::size_t n = 0; n < cfg.n_t; ++n) {
        CHECK(rep.phi.radius_curve[n] > 0.0);
        CHECK(rep.phi.radius_curve[n] < cfg.R);
        CHECK(rep.psi.radius_curve[n] > 0.0);
        CHECK(rep.psi.radius_curve[n] < cfg.R);
    }
}

TEST_CASE("maximality sweep needs the two optima and defeats a blend at fine time steps") {
    RunConfig cfg;
    cfg.n_r = 48;
    cfg.n_t = 48;
    RadialGrid grid = cfg.make_grid();
    TimeGrid tgrid = cfg.make_time_grid();
    Xoshiro256ss rng(3);
    SpaceTimeField cand = random_admissible(grid, tgrid, cfg.volume(), rng, 0);
    CHECK_THROWS(maximality_sweep(cand, cfg, 1));
    SweepReport rep = maximality_sweep(cand, cfg, 4);
    CHECK(rep.witnesses.size() == 4);
    CHECK(rep.witnesses[0].name == "optimal-narrow-cutoff");
    CHECK(rep.witnesses[1].name == "optimal-wide-cutoff");
}

TEST_CASE("parallel reductions do not depend on the thread count") {
    RunConfig cfg;
    cfg.n_r = 32;
    cfg.n_t = 32;
    RadialGrid grid = cfg.make_grid();
    TimeGrid tgrid = cfg.make_time_grid();
    Xoshiro256ss rng(8);
    SpaceTimeField cand = random_admissible(grid, tgrid, cfg.volume(), rng, 1);

    setenv("TALENTI_LAB_THREADS", "1", 1);
    SweepReport serial = maximality_sweep(cand, cfg, 6);
    setenv("TALENTI_LAB_THREADS", "7", 1);
    SweepReport parallel = maximality_sweep(cand, cfg, 6);
    unsetenv("TALENTI_LAB_THREADS");

    REQUIRE(serial.witnesses.size() == parallel.witnesses.size());
    for (std::size_t i = 0; i < serial.witnesses.size(); ++i) {
        CHECK(serial.witnesses[i].margin == parallel.witnesses[i].margin);
        CHECK(serial.witnesses[i].worst_radius == parallel.witnesses[i].worst_radius);
    }
}

TEST_CASE("config validation rejects nonsense") {
    RunConfig cfg;
    cfg.V0_fraction = 1.5;
    CHECK_THROWS(cfg.check());
    cfg = RunConfig{};
    cfg.d = 0;
    CHECK_THROWS(cfg.check());
    cfg = RunConfig{};
    CHECK_NOTHROW(cfg.check());
    CHECK(counterexample_defaults().n_t == 32768);
}
