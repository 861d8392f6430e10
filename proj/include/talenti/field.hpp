#pragma once

#include <functional>
#include <string>
#include <vector>

#include "talenti/grid.hpp"

namespace talenti {

enum class FieldKind { control, state, adjoint };

std::string to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& s);

// One value per grid cell, interpreted as the cell average.
struct RadialField {
    RadialGrid grid;
    FieldKind kind = FieldKind::state;
    std::vector<double> values;

    static RadialField zeros(const RadialGrid& grid, FieldKind kind = FieldKind::state);
    // Samples fn at cell centers.
    static RadialField sample(const RadialGrid& grid, const std::function<double(double)>& fn,
                              FieldKind kind = FieldKind::state);
};

// Row-major (n_t + 1) x n_r array of cell values, one row per time level.
struct SpaceTimeField {
    RadialGrid grid;
    TimeGrid tgrid;
    FieldKind kind = FieldKind::state;
    std::vector<double> values;

    static SpaceTimeField zeros(const RadialGrid& grid, const TimeGrid& tgrid,
                                FieldKind kind = FieldKind::state);
    // Samples fn(t, r) at (time level, cell center) pairs.
    static SpaceTimeField sample(const RadialGrid& grid, const TimeGrid& tgrid,
                                 const std::function<double(double, double)>& fn,
                                 FieldKind kind = FieldKind::control);

    double at(std::size_t level, std::size_t cell) const {
        return values[level * grid.n_cells() + cell];
    }
    double& at(std::size_t level, std::size_t cell) {
        return values[level * grid.n_cells() + cell];
    }
    const double* slice(std::size_t level) const { return values.data() + level * grid.n_cells(); }
    double* slice(std::size_t level) { return values.data() + level * grid.n_cells(); }
    RadialField slice_field(std::size_t level) const;
};

// Throws DomainError unless sizes match the grids and (for kind == control)
// every value lies in [0, 1]; non-finite entries raise NumericalError.
void validate(const RadialField& f, const std::string& context);
void validate(const SpaceTimeField& f, const std::string& context);

}
