#include "talenti/heat.hpp"

#include <algorithm>
#include <cmath>

#include "talenti/errors.hpp"
#include "talenti/quadrature.hpp"

namespace talenti {

std::string to_string(Scheme s) {
    return s == Scheme::implicit_euler ? "implicit-euler" : "crank-nicolson";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "implicit-euler") return Scheme::implicit_euler;
    if (s == "crank-nicolson") return Scheme::crank_nicolson;
    throw DomainError("unknown scheme '" + s + "' (expected implicit-euler|crank-nicolson)");
}

RadialLaplacian::RadialLaplacian(const RadialGrid& grid) : grid_(grid) {
    std::size_t n = grid.n_cells();
    sub_.assign(n, 0.0);
    diag_.assign(n, 0.0);
    super_.assign(n, 0.0);
    double dr = grid.spacing();
    for (std::size_t j = 0; j < n; ++j) {
        double volume = grid.cell_volume(j);
        // Zero flux through the origin by symmetry; for d >= 2 the sphere
        // area vanishes there anyway, for d = 1 it does not.
        double inner = j == 0 ? 0.0 : grid.sphere_area(grid.node(j)) / (dr * volume);
        double outer = grid.sphere_area(grid.node(j + 1)) / (dr * volume);
        if (j > 0) sub_[j] = inner;
        if (j + 1 < n) {
            super_[j] = outer;
            diag_[j] = -(inner + outer);
        } else {
            // Dirichlet closure: flux through r = R against the boundary
            // value 0 across the half cell.
            diag_[j] = -(inner + 2.0 * outer);
        }
    }
}

void RadialLaplacian::apply(const std::vector<double>& u, std::vector<double>& y) const {
    std::size_t n = grid_.n_cells();
    if (u.size() != n) throw DomainError("RadialLaplacian::apply: size mismatch");
    y.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double v = diag_[j] * u[j];
        if (j > 0) v += sub_[j] * u[j - 1];
        if (j + 1 < n) v += super_[j] * u[j + 1];
        y[j] = v;
    }
}

Tridiagonal RadialLaplacian::implicit_matrix(double theta_dt) const {
    std::size_t n = grid_.n_cells();
    Tridiagonal m;
    m.lower.resize(n);
    m.diag.resize(n);
    m.upper.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        m.lower[j] = -theta_dt * sub_[j];
        m.diag[j] = 1.0 - theta_dt * diag_[j];
        m.upper[j] = -theta_dt * super_[j];
    }
    return m;
}

namespace {

void check_finite(const std::vector<double>& u, std::size_t level, const char* what) {
    for (double v : u)
        if (!std::isfinite(v))
            throw NumericalError(std::string(what) + ": non-finite value at time level " +
                                 std::to_string(level));
}

}

HeatSolution solve_heat(const SpaceTimeField& source, Scheme scheme) {
    validate(source, "solve_heat source");
    const RadialGrid& grid = source.grid;
    const TimeGrid& tgrid = source.tgrid;
    std::size_t n = grid.n_cells();
    double dt = tgrid.dt();

    RadialLaplacian lap(grid);
    double theta = scheme == Scheme::implicit_euler ? 1.0 : 0.5;
    Tridiagonal step = lap.implicit_matrix(theta * dt);

    HeatSolution sol;
    sol.scheme = scheme;
    sol.u = SpaceTimeField::zeros(grid, tgrid, FieldKind::state);

    std::vector<double> u_prev(n, 0.0), rhs(n), lu(n), lu_new(n);
    double residual = 0.0;
    for (std::size_t level = 1; level <= tgrid.n_steps(); ++level) {
        const double* f_new = source.slice(level);
        const double* f_old = source.slice(level - 1);
        if (scheme == Scheme::implicit_euler) {
            for (std::size_t j = 0; j < n; ++j) rhs[j] = u_prev[j] + dt * f_new[j];
        } else {
            lap.apply(u_prev, lu);
            for (std::size_t j = 0; j < n; ++j)
                rhs[j] = u_prev[j] + 0.5 * dt * lu[j] + 0.5 * dt * (f_new[j] + f_old[j]);
        }
        std::vector<double> u = thomas_solve(step, rhs);
        check_finite(u, level, "solve_heat");

        lap.apply(u, lu_new);
        for (std::size_t j = 0; j < n; ++j) {
            double defect;
            if (scheme == Scheme::implicit_euler) {
                defect = (u[j] - u_prev[j]) / dt - lu_new[j] - f_new[j];
            } else {
                defect = (u[j] - u_prev[j]) / dt - 0.5 * (lu_new[j] + lu[j]) -
                         0.5 * (f_new[j] + f_old[j]);
            }
            residual = std::max(residual, std::abs(defect));
        }
        std::copy(u.begin(), u.end(), sol.u.slice(level));
        u_prev.swap(u);
    }
    sol.residual_norm = residual;
    return sol;
}

AdjointSolution solve_adjoint(const RadialField& terminal, const TimeGrid& tgrid, Scheme scheme) {
    validate(terminal, "solve_adjoint terminal");
    const RadialGrid& grid = terminal.grid;
    std::size_t n = grid.n_cells();
    double dt = tgrid.dt();

    RadialLaplacian lap(grid);
    double theta = scheme == Scheme::implicit_euler ? 1.0 : 0.5;
    Tridiagonal step = lap.implicit_matrix(theta * dt);

    AdjointSolution sol;
    sol.terminal = terminal;
    sol.terminal.kind = FieldKind::adjoint;
    sol.p = SpaceTimeField::zeros(grid, tgrid, FieldKind::adjoint);
    std::copy(terminal.values.begin(), terminal.values.end(), sol.p.slice(tgrid.n_steps()));

    std::vector<double> p_next = terminal.values, rhs(n), lp(n);
    for (std::size_t level = tgrid.n_steps(); level-- > 0;) {
        if (scheme == Scheme::implicit_euler) {
            rhs = p_next;
        } else {
            lap.apply(p_next, lp);
            for (std::size_t j = 0; j < n; ++j) rhs[j] = p_next[j] + 0.5 * dt * lp[j];
        }
        std::vector<double> p = thomas_solve(step, rhs);
        check_finite(p, level, "solve_adjoint");
        std::copy(p.begin(), p.end(), sol.p.slice(level));
        p_next.swap(p);
    }

    sol.radial_derivative = SpaceTimeField::zeros(grid, tgrid, FieldKind::state);
    double dr = grid.spacing();
    for (std::size_t level = 0; level < tgrid.n_levels(); ++level) {
        const double* p = sol.p.slice(level);
        double* q = sol.radial_derivative.slice(level);
        q[0] = (p[1] - p[0]) / dr;
        for (std::size_t j = 1; j + 1 < n; ++j) q[j] = (p[j + 1] - p[j - 1]) / (2.0 * dr);
        q[n - 1] = (p[n - 1] - p[n - 2]) / dr;
    }
    return sol;
}

double duality_gap(const SpaceTimeField& f, const RadialField& phi) {
    if (!f.grid.same_as(phi.grid)) throw DomainError("duality_gap: grids differ");
    HeatSolution heat = solve_heat(f, Scheme::implicit_euler);
    AdjointSolution adj = solve_adjoint(phi, f.tgrid, Scheme::implicit_euler);
    double terminal = inner_product(heat.u.slice_field(f.tgrid.n_steps()), phi);
    double paired = inner_product(f, adj.p);
    return std::abs(terminal - paired);
}

double duality_defect(const SpaceTimeField& f, const RadialField& phi) {
    if (!f.grid.same_as(phi.grid)) throw DomainError("duality_defect: grids differ");
    HeatSolution heat = solve_heat(f, Scheme::implicit_euler);
    AdjointSolution adj = solve_adjoint(phi, f.tgrid, Scheme::implicit_euler);
    double terminal = inner_product(heat.u.slice_field(f.tgrid.n_steps()), phi);
    double dt = f.tgrid.dt();
    KahanSum paired;
    for (std::size_t level = 1; level <= f.tgrid.n_steps(); ++level) {
        const double* fn = f.slice(level);
        const double* pn = adj.p.slice(level - 1);
        for (std::size_t j = 0; j < f.grid.n_cells(); ++j)
            paired.add(dt * f.grid.cell_volume(j) * fn[j] * pn[j]);
    }
    return std::abs(terminal - paired.value());
}

double maximum_principle_check(const HeatSolution& sol) {
    double lo = 0.0;
    for (double v : sol.u.values) lo = std::min(lo, v);
    return lo;
}

}
