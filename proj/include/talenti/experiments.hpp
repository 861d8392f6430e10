#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "talenti/control.hpp"
#include "talenti/rng.hpp"

namespace talenti {

// Shared experiment configuration; defaults give the desk-scale setup on the
// unit disk with a unit horizon.
struct RunConfig {
    double R = 1.0;
    int d = 2;
    double T = 1.0;
    double V0_fraction = 0.25;
    std::size_t n_r = 256;
    std::size_t n_t = 256;
    Scheme scheme = Scheme::implicit_euler;
    std::uint64_t seed = 20260822;

    RadialGrid make_grid() const { return RadialGrid(R, d, n_r); }
    TimeGrid make_time_grid() const { return TimeGrid(T, n_t); }
    // Absolute control volume: V0_fraction of the space-time cylinder.
    double volume() const;
    void check() const;
};

// Radial plateau-bridge-zero profile: 1 on [0, plateau], quintic bridge
// (C^2 at both ends) down to 0 at support, 0 beyond.
struct CutoffSpec {
    double plateau_radius = 0.0;
    double support_radius = 0.0;

    double operator()(double r) const;
};

CutoffSpec make_cutoff(double plateau_radius, double support_radius);
RadialField sample_cutoff(const CutoffSpec& spec, const RadialGrid& grid);

// Scheme-error scale used as the acceptance bar for concentration
// comparisons on computed states: tol = scale * (dt + dr^2).
double talenti_tolerance(const RadialGrid& grid, const TimeGrid& tgrid);

struct TalentiCheckResult {
    // Max over time levels and nodes of (profile of u_f - profile of u_f#);
    // the comparison principle predicts <= 0 up to scheme error.
    double worst_margin = 0.0;
    std::size_t worst_level = 0;
    double worst_radius = 0.0;
};

// Solves the state for f and for its slice-wise rearrangement and compares
// terminal-and-intermediate concentration profiles at every node.
TalentiCheckResult verify_talenti(const SpaceTimeField& f, Scheme scheme = Scheme::implicit_euler);

/**
 * Step-function approximation of a nonincreasing radial profile on k equal
 * annuli: alpha[j] = phi(r_{j+1}) on annulus j gives the under-approximation
 * by annulus pieces, and beta rewrites it as a nonnegative combination of
 * ball indicators B(0, r_j), j = 1..k. Both evaluate identically and
 * converge to phi in L1 as k grows when phi is continuous.
 */
struct StepApproximation {
    std::vector<double> radii;  // r_j = j R / k, j = 0..k
    std::vector<double> alpha;  // k entries
    std::vector<double> beta;   // k entries, beta[j-1] multiplies 1_{B(0, r_j)}

    double evaluate_annulus(double r) const;
    double evaluate_nested(double r) const;
};

StepApproximation step_approximation(const std::function<double(double)>& profile, double R,
                                     std::size_t k);

// One optimally controlled cutoff within the two-cutoff construction.
struct CutoffOptimum {
    CutoffSpec cutoff;
    double multiplier = 0.0;
    // Certified optimizer value, duality form iint f p.
    double objective = 0.0;
    double feasibility_residual = 0.0;
    double certificate_gap = 0.0;
    // |forward terminal pairing - duality form| for this cutoff's own control.
    double duality_gap_value = 0.0;
    double radius_terminal = 0.0;
    double radius_preterminal = 0.0;
    std::vector<double> radius_curve;
};

/**
 * Two-cutoff construction showing that no source is maximal for the
 * concentration preorder when both time and space rearrangements are
 * admitted: a narrow cutoff phi (plateau R/8, support R/4) and a wide one
 * psi (plateau R/2, support 3R/4) produce optimal controls that each beat
 * the other strictly on their own objective, so neither optimally controlled
 * state can concentrate the other.
 *
 * The four J values are terminal pairings <u_f(T), cutoff>_V computed by
 * independent forward solves, not the duality shortcut the optimizer
 * certifies, so the strict inequalities do not lean on the identity they are
 * compared against.
 */
struct CounterexampleReport {
    RunConfig config;
    double volume = 0.0;
    CutoffOptimum phi;  // plateau R/8, support R/4
    CutoffOptimum psi;  // plateau R/2, support 3R/4
    double J_phi_on_f_phi = 0.0;
    double J_phi_on_f_psi = 0.0;
    double J_psi_on_f_psi = 0.0;
    double J_psi_on_f_phi = 0.0;
    double margin_phi = 0.0;  // J_phi_on_f_phi - J_phi_on_f_psi, strictly > 0
    double margin_psi = 0.0;  // J_psi_on_f_psi - J_psi_on_f_phi, strictly > 0
    // Relative space-time volume of {f_phi != f_psi}: for two bang-bang
    // controls, the symmetric-difference volume over the cylinder volume.
    double control_distance = 0.0;
    double max_duality_gap = 0.0;
    // Separation of the two radius curves over the last max(2, n_t/16)
    // pre-terminal levels.
    std::size_t separation_levels = 0;
    double min_radius_separation = 0.0;
};

// Optional bulky outputs of run_counterexample for callers that save
// profiles: the two optimal controls, both adjoints, and the terminal
// states driven by the optimal controls.
struct CounterexampleArtifacts {
    SpaceTimeField control_phi, control_psi;
    SpaceTimeField adjoint_phi, adjoint_psi;
    RadialField state_phi_terminal, state_psi_terminal;
};

CounterexampleReport run_counterexample(const RunConfig& config,
                                        CutoffSpec narrow, CutoffSpec wide,
                                        CounterexampleArtifacts* artifacts = nullptr);
CounterexampleReport run_counterexample(const RunConfig& config,
                                        CounterexampleArtifacts* artifacts = nullptr);

// Configuration the two-cutoff run defaults to: the standard grids but a much
// finer time axis, which pushes the time-quadrature part of the duality gap
// well below the cross-objective margins the construction rests on.
RunConfig counterexample_defaults();

// Renormalizes a control in place to the prescribed space-time volume by a
// bisected constant shift, clamped to [0, 1]; the shifted integral is
// continuous and nondecreasing in the shift, so the fit is exact up to the
// admissibility residual. Fails if even the all-one field falls short.
void fit_volume(SpaceTimeField& f, double volume);

// Deterministic pseudo-random admissible control; flavor cycles through
// smooth bumps, thresholded bang-bang fields, translated space-time balls,
// and space-time annulus blocks. The integral is corrected to the target
// volume by fit_volume.
SpaceTimeField random_admissible(const RadialGrid& grid, const TimeGrid& tgrid, double volume,
                                 Xoshiro256ss& rng, std::size_t flavor);

struct SweepWitness {
    std::string name;
    // Positive margin = the witness state fails to be dominated by the
    // candidate state at some node; a failure when margin > tolerance.
    double margin = 0.0;
    double worst_radius = 0.0;
    bool failure = false;
};

struct SweepReport {
    RunConfig config;
    std::string candidate;
    double tolerance = 0.0;
    std::vector<SweepWitness> witnesses;
    bool candidate_defeated = false;  // at least one witness failure
};

/**
 * Challenges a candidate control of prescribed volume against n_samples
 * adversarial witnesses, the first two of which are always the optimal
 * narrow- and wide-cutoff controls (n_samples >= 2); the rest are random
 * admissible controls. For each witness g, checks whether u_g(T) is
 * dominated by u_candidate(T). A maximal candidate would dominate every
 * witness; the report records every failure with its margin.
 */
SweepReport maximality_sweep(const SpaceTimeField& candidate, const RunConfig& config,
                             std::size_t n_samples);

// Runs fn(i) for i in [0, n) on up to TALENTI_LAB_THREADS workers (default 1);
// results must be written to pre-sized slots, so the outcome does not depend
// on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}
