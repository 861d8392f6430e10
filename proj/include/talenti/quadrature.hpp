#pragma once

#include <cstddef>
#include <vector>

#include "talenti/field.hpp"

namespace talenti {

// Compensated (Kahan) accumulator; summation order is part of the contract
// wherever bitwise reproducibility is claimed.
class KahanSum {
public:
    void add(double x) {
        double y = x - carry_;
        double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// Integral of f over the ball of radius r. Cells fully inside contribute
// value * cell volume; the cell containing r contributes its value times the
// exact partial annulus volume. Ascending cell order, compensated.
double integrate_ball(const RadialField& f, double r);

// Integral over the whole ball; equals integrate_ball(f, R) with the partial
// cell logic short-circuited.
double integrate_cells(const RadialField& f);

// Volume-weighted inner product sum_j V_j a_j b_j. Grids must agree.
double inner_product(const RadialField& a, const RadialField& b);

// Trapezoid weights on the time levels: dt * (1/2, 1, ..., 1, 1/2).
std::vector<double> trapezoid_weights(const TimeGrid& tgrid);

// Space-time integral with trapezoid weights in time and cell volumes in
// space. Level-major, compensated.
double integrate_spacetime(const SpaceTimeField& f);

// Space-time inner product sum_n w_n sum_j V_j a(n,j) b(n,j), trapezoid
// weights in time. Grids must agree.
double inner_product(const SpaceTimeField& a, const SpaceTimeField& b);

}
