#pragma once

#include "talenti/field.hpp"
#include "talenti/tridiagonal.hpp"

namespace talenti {

enum class Scheme { implicit_euler, crank_nicolson };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

/**
 * Finite-volume radial Laplacian on cell averages with homogeneous Dirichlet
 * data at r = R built into the last row (half-cell flux) and the natural
 * no-flux closure at the origin. The operator is self-adjoint with respect
 * to the cell-volume inner product and its implicit step matrix I - dt*L is
 * an M-matrix, which is what the exact positivity and comparison statements
 * below rest on.
 */
class RadialLaplacian {
public:
    explicit RadialLaplacian(const RadialGrid& grid);

    const RadialGrid& grid() const { return grid_; }

    // y = L u.
    void apply(const std::vector<double>& u, std::vector<double>& y) const;

    // I - theta * dt * L.
    Tridiagonal implicit_matrix(double theta_dt) const;

private:
    RadialGrid grid_;
    std::vector<double> sub_, diag_, super_;
};

struct HeatSolution {
    SpaceTimeField u;
    Scheme scheme = Scheme::implicit_euler;
    // Max over steps and cells of the defect when the stored solution is
    // substituted back into the stepping equations.
    double residual_norm = 0.0;
};

/**
 * Solves u_t - Lu = f, u(0) = 0, Dirichlet at r = R, on the grids carried by
 * the source field. Implicit Euler uses the source at the new level, so the
 * n_t -> infinity limit of a time-constant source is exactly the discrete
 * elliptic solution; the stored level-0 source values never enter. Crank-
 * Nicolson averages adjacent source levels.
 */
HeatSolution solve_heat(const SpaceTimeField& source, Scheme scheme = Scheme::implicit_euler);

struct AdjointSolution {
    SpaceTimeField p;
    RadialField terminal;
    // dp/dr at cell centers, one-sided at both ends.
    SpaceTimeField radial_derivative;
};

/**
 * Solves the backward problem -p_t - Lp = 0, p(T) = terminal, with the same
 * operator and step as solve_heat, marching from level n_t down to 0.
 * Expects terminal >= 0 with zero boundary data; radial monotonicity of the
 * terminal datum is preserved exactly by every backward step.
 */
AdjointSolution solve_adjoint(const RadialField& terminal, const TimeGrid& tgrid,
                              Scheme scheme = Scheme::implicit_euler);

// |<u_f(T), phi>_V - iint f p_phi| with trapezoid weights in time. This is
// the quadrature form of the duality identity and decays like O(dt + dr^2).
double duality_gap(const SpaceTimeField& f, const RadialField& phi);

// Residual of the discrete duality identity <u_f(T), phi>_V =
// sum_n dt <f^n, p^{n-1}>_V for implicit Euler; zero up to rounding by
// self-adjointness of the step, independent of grid resolution.
double duality_defect(const SpaceTimeField& f, const RadialField& phi);

// Min over all stored values; nonnegative sources give a nonnegative state,
// exactly in floating point for implicit Euler.
double maximum_principle_check(const HeatSolution& sol);

}
