#include "talenti/grid.hpp"

#include <cmath>

#include "talenti/errors.hpp"

namespace talenti {

double unit_ball_volume(int dim) {
    if (dim < 1) throw DomainError("unit_ball_volume: dimension must be >= 1");
    return std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

double radial_power(double r, int dim) {
    double p = 1.0;
    for (int k = 0; k < dim; ++k) p *= r;
    return p;
}

RadialGrid::RadialGrid(double radius, int dim, std::size_t n_cells)
    : radius_(radius), dim_(dim) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw DomainError("RadialGrid: radius must be positive and finite");
    if (dim < 1 || dim > 10)
        throw DomainError("RadialGrid: dimension out of range [1, 10]");
    if (n_cells < 2)
        throw DomainError("RadialGrid: need at least 2 cells");

    unit_volume_ = unit_ball_volume(dim);
    nodes_.resize(n_cells + 1);
    for (std::size_t i = 0; i <= n_cells; ++i) {
        // i/n is exact at the endpoints, so nodes_[n] == radius bitwise.
        nodes_[i] = radius * (static_cast<double>(i) / static_cast<double>(n_cells));
    }
    volumes_.resize(n_cells);
    for (std::size_t j = 0; j < n_cells; ++j) {
        volumes_[j] = unit_volume_ * (radial_power(nodes_[j + 1], dim) - radial_power(nodes_[j], dim));
    }
    total_volume_ = unit_volume_ * radial_power(radius, dim);
}

double RadialGrid::ball_volume(double r) const {
    if (!(r >= 0.0) || r > radius_)
        throw DomainError("RadialGrid::ball_volume: radius outside [0, R]");
    return unit_volume_ * radial_power(r, dim_);
}

double RadialGrid::sphere_area(double r) const {
    if (!(r >= 0.0))
        throw DomainError("RadialGrid::sphere_area: negative radius");
    return static_cast<double>(dim_) * unit_volume_ * radial_power(r, dim_ - 1);
}

bool RadialGrid::same_as(const RadialGrid& other) const {
    return radius_ == other.radius_ && dim_ == other.dim_ && n_cells() == other.n_cells();
}

TimeGrid::TimeGrid(double horizon, std::size_t n_steps)
    : horizon_(horizon), n_steps_(n_steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw DomainError("TimeGrid: horizon must be positive and finite");
    if (n_steps < 1)
        throw DomainError("TimeGrid: need at least one step");
}

double TimeGrid::time(std::size_t level) const {
    if (level > n_steps_) throw DomainError("TimeGrid::time: level out of range");
    if (level == n_steps_) return horizon_;
    return dt() * static_cast<double>(level);
}

bool TimeGrid::same_as(const TimeGrid& other) const {
    return horizon_ == other.horizon_ && n_steps_ == other.n_steps_;
}

}
