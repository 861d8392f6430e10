#include "talenti/field.hpp"

#include <cmath>

#include "talenti/errors.hpp"
#include "talenti/quadrature.hpp"

namespace talenti {

std::string to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::control: return "control";
        case FieldKind::state: return "state";
        case FieldKind::adjoint: return "adjoint";
    }
    throw DomainError("to_string: bad FieldKind");
}

FieldKind field_kind_from_string(const std::string& s) {
    if (s == "control") return FieldKind::control;
    if (s == "state") return FieldKind::state;
    if (s == "adjoint") return FieldKind::adjoint;
    throw DomainError("unknown field kind '" + s + "' (expected control|state|adjoint)");
}

RadialField RadialField::zeros(const RadialGrid& grid, FieldKind kind) {
    return RadialField{grid, kind, std::vector<double>(grid.n_cells(), 0.0)};
}

RadialField RadialField::sample(const RadialGrid& grid, const std::function<double(double)>& fn,
                                FieldKind kind) {
    RadialField f = zeros(grid, kind);
    for (std::size_t j = 0; j < grid.n_cells(); ++j) f.values[j] = fn(grid.cell_center(j));
    return f;
}

SpaceTimeField SpaceTimeField::zeros(const RadialGrid& grid, const TimeGrid& tgrid, FieldKind kind) {
    return SpaceTimeField{grid, tgrid, kind,
                          std::vector<double>(tgrid.n_levels() * grid.n_cells(), 0.0)};
}

SpaceTimeField SpaceTimeField::sample(const RadialGrid& grid, const TimeGrid& tgrid,
                                      const std::function<double(double, double)>& fn,
                                      FieldKind kind) {
    SpaceTimeField f = zeros(grid, tgrid, kind);
    for (std::size_t n = 0; n < tgrid.n_levels(); ++n) {
        double t = tgrid.time(n);
        for (std::size_t j = 0; j < grid.n_cells(); ++j) f.at(n, j) = fn(t, grid.cell_center(j));
    }
    return f;
}

RadialField SpaceTimeField::slice_field(std::size_t level) const {
    if (level >= tgrid.n_levels()) throw DomainError("slice_field: level out of range");
    const double* row = slice(level);
    return RadialField{grid, kind, std::vector<double>(row, row + grid.n_cells())};
}

namespace {

void check_entries(const std::vector<double>& values, FieldKind kind, const std::string& context) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = values[i];
        if (!std::isfinite(v))
            throw NumericalError(context + ": non-finite value at index " + std::to_string(i));
        if (kind == FieldKind::control && (v < 0.0 || v > 1.0))
            throw DomainError(context + ": control value " + std::to_string(v) +
                              " outside [0, 1] at index " + std::to_string(i));
    }
}

}

void validate(const RadialField& f, const std::string& context) {
    if (f.values.size() != f.grid.n_cells())
        throw DomainError(context + ": value count does not match grid");
    check_entries(f.values, f.kind, context);
}

void validate(const SpaceTimeField& f, const std::string& context) {
    if (f.values.size() != f.tgrid.n_levels() * f.grid.n_cells())
        throw DomainError(context + ": value count does not match grids");
    check_entries(f.values, f.kind, context);
}

double integrate_ball(const RadialField& f, double r) {
    const RadialGrid& g = f.grid;
    if (f.values.size() != g.n_cells()) throw DomainError("integrate_ball: size mismatch");
    if (!(r >= 0.0) || r > g.radius())
        throw DomainError("integrate_ball: radius outside [0, R]");
    KahanSum s;
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        if (g.node(j + 1) <= r) {
            s.add(f.values[j] * g.cell_volume(j));
        } else {
            if (g.node(j) < r) {
                double partial = g.ball_volume(r) - g.ball_volume(g.node(j));
                s.add(f.values[j] * partial);
            }
            break;
        }
    }
    return s.value();
}

double integrate_cells(const RadialField& f) {
    if (f.values.size() != f.grid.n_cells()) throw DomainError("integrate_cells: size mismatch");
    KahanSum s;
    for (std::size_t j = 0; j < f.grid.n_cells(); ++j) s.add(f.values[j] * f.grid.cell_volume(j));
    return s.value();
}

double inner_product(const RadialField& a, const RadialField& b) {
    if (!a.grid.same_as(b.grid)) throw DomainError("inner_product: grids differ");
    KahanSum s;
    for (std::size_t j = 0; j < a.grid.n_cells(); ++j)
        s.add(a.grid.cell_volume(j) * a.values[j] * b.values[j]);
    return s.value();
}

std::vector<double> trapezoid_weights(const TimeGrid& tgrid) {
    std::vector<double> w(tgrid.n_levels(), tgrid.dt());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

double integrate_spacetime(const SpaceTimeField& f) {
    std::vector<double> w = trapezoid_weights(f.tgrid);
    KahanSum s;
    for (std::size_t n = 0; n < f.tgrid.n_levels(); ++n) {
        const double* row = f.slice(n);
        for (std::size_t j = 0; j < f.grid.n_cells(); ++j)
            s.add(w[n] * f.grid.cell_volume(j) * row[j]);
    }
    return s.value();
}

double inner_product(const SpaceTimeField& a, const SpaceTimeField& b) {
    if (!a.grid.same_as(b.grid) || !a.tgrid.same_as(b.tgrid))
        throw DomainError("inner_product: grids differ");
    std::vector<double> w = trapezoid_weights(a.tgrid);
    KahanSum s;
    for (std::size_t n = 0; n < a.tgrid.n_levels(); ++n) {
        const double* ra = a.slice(n);
        const double* rb = b.slice(n);
        for (std::size_t j = 0; j < a.grid.n_cells(); ++j)
            s.add(w[n] * a.grid.cell_volume(j) * ra[j] * rb[j]);
    }
    return s.value();
}

}
