#pragma once

#include <cstddef>
#include <vector>

#include "talenti/heat.hpp"

namespace talenti {

// A control with values in [0, 1] and prescribed space-time integral.
struct AdmissibleControl {
    SpaceTimeField f;
    double volume = 0.0;
    // |iint f - volume|, trapezoid weights in time.
    double residual = 0.0;
};

// Validates bounds and checks the integral to 1e-9 * cylinder volume.
AdmissibleControl make_admissible(SpaceTimeField f, double volume);

// iint f p_phi with trapezoid weights; by duality this tracks
// <u_f(T), phi> up to the quadrature defect.
double objective(const SpaceTimeField& f, const RadialField& phi, Scheme scheme = Scheme::implicit_euler);
double objective(const SpaceTimeField& f, const AdjointSolution& adjoint);

struct BathtubSolution {
    AdmissibleControl control;
    // Threshold c: the control is 1 where p > c, fractional where p = c,
    // 0 where p < c; strictly between 0 and max p.
    double multiplier = 0.0;
    // Level-set radius of {p(t_n) > c} per time level, 0 where the slice
    // stays below c everywhere.
    std::vector<double> radius_curve;
    double objective = 0.0;
    double feasibility_residual = 0.0;
    // Relative disagreement between the threshold-search optimum and an
    // independent sorted-slot evaluation; certified <= 1e-10.
    double certificate_gap = 0.0;
};

/**
 * Maximizes iint f p over controls 0 <= f <= 1 with iint f = volume
 * (trapezoid weights in time, cell volumes in space). The optimum fills
 * super-level sets of p: a bisection on the threshold c locates the exact
 * jump of the level-measure function, the straddled value class is filled
 * fractionally, and a sort-based evaluation of the optimum certifies the
 * result. Throws DomainError when volume is outside (0, cylinder volume) or
 * when the target exceeds the measure of {p > 0}, and ContractError when the
 * certificate or the feasibility bound fails.
 */
BathtubSolution bathtub_optimize(const AdjointSolution& adjoint, double volume);

// Convenience wrapper: solves the adjoint for the given terminal datum first.
BathtubSolution bathtub_optimize(const RadialField& terminal, const TimeGrid& tgrid, double volume,
                                 Scheme scheme = Scheme::implicit_euler);

/**
 * Radius of the super-level set {p(t_index) > c} by piecewise-linear
 * inversion between cell centers (half-cell boundary segment at r = R).
 * Requires the slice to be nonincreasing in radius up to 1e-12 * scale and c
 * strictly between the outermost cell value and the center value; otherwise
 * DomainError identifies which precondition failed.
 */
double level_radius(const AdjointSolution& adjoint, std::size_t t_index, double c);

// Optimal value of the auxiliary radial problem: terminal datum is a one-cell
// linear ramp of the indicator of B(0, r), and the returned value is the
// concentration of the optimally controlled terminal state at radius r.
double solve_P_r(const RadialGrid& grid, const TimeGrid& tgrid, double r, double volume);

}
