#pragma once

#include <cstddef>
#include <vector>

#include "talenti/field.hpp"

namespace talenti {

/**
 * Exact measure-level form of the decreasing rearrangement of a cell field:
 * the multiset of (value, cell volume) pairs laid out on the volume axis in
 * nonincreasing value order. Ties keep ascending cell order, so the layout
 * is deterministic. This is the object the rearrangement identities hold for
 * exactly; projecting back onto cells averages within cells and is lossy.
 *
 * prefix_volume[k] is the total volume of chunks before k, prefix_integral[k]
 * the integral over them; both carry one trailing entry for the full domain.
 */
struct DecreasingRearrangement {
    std::vector<double> values;
    std::vector<double> volumes;
    std::vector<double> prefix_volume;
    std::vector<double> prefix_integral;

    // Integral of the rearrangement over the first v units of volume,
    // piecewise linear and concave in v.
    double integral_to_volume(double v) const;
    // Measure of the strict super-level set {value > tau}.
    double level_measure(double tau) const;
};

// Values below -1e-12 are a domain error; values in [-1e-12, 0) are treated
// as exact zeros.
DecreasingRearrangement decreasing_rearrangement(const RadialField& f);

/**
 * Schwarz (radially decreasing) rearrangement projected back onto the grid
 * cells. Cell j receives the average of the decreasing rearrangement over
 * its own volume slot; a cell covered by a single chunk receives that value
 * bitwise, which makes the operation idempotent. Output values are
 * nonincreasing in the cell index and total mass matches the input to
 * rounding.
 */
RadialField schwarz_rearrange(const RadialField& f);

// Applied level by level.
SpaceTimeField schwarz_rearrange(const SpaceTimeField& f);

// Measure of {f > tau} at the cell level.
double distribution_function(const RadialField& f, double tau);

/**
 * Cumulative integrals of the decreasing rearrangement over centered balls:
 * node_cumulative[i] integrates over the ball through node i. at_volume
 * evaluates the same curve at arbitrary enclosed volume.
 */
struct ConcentrationProfile {
    RadialGrid grid;
    std::vector<double> node_cumulative;
    DecreasingRearrangement rearrangement;

    double at_volume(double v) const { return rearrangement.integral_to_volume(v); }
    double at_radius(double r) const { return rearrangement.integral_to_volume(grid.ball_volume(r)); }
};

ConcentrationProfile concentration_profile(const RadialField& f);

struct DominanceResult {
    bool dominated = false;
    // max over nodes of (profile of f - profile of g); violation when > tol.
    double margin = 0.0;
};

// Tests f < g in the concentration order: the ball integrals of the
// rearrangement of f never exceed those of g, compared at every grid node
// with slack tol. Grids must match.
DominanceResult dominates(const RadialField& f, const RadialField& g, double tol = 1e-9);

// integral(f# g#) - integral(f g); nonnegative up to rounding, and exactly
// zero when both inputs are already nonincreasing in the cell index.
double hardy_littlewood_gap(const RadialField& f, const RadialField& g);

// Discrete Dirichlet energy difference E(f) - E(f#) with the finite-volume
// form E(v) = sum_i A(r_i) (v_i - v_{i-1})^2 / dr plus the half-cell
// boundary term. Meaningful for fields vanishing in the outermost cell.
double polya_szego_gap(const RadialField& f);

// The Dirichlet form above; exposed for tests and studies.
double dirichlet_energy(const RadialField& f);

}
