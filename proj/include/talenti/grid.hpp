#pragma once

#include <cstddef>
#include <vector>

namespace talenti {

// Volume of the unit ball in R^d.
double unit_ball_volume(int dim);

// r^dim by repeated multiplication, with the same rounding wherever it is
// used so that telescoping volume identities hold as written.
double radial_power(double r, int dim);

/**
 * Uniform-in-radius discretization of the centered ball of radius R in R^d.
 *
 * Nodes sit at r_i = R * i / n for i = 0..n. Cell j is the annulus between
 * nodes j and j+1; radial fields attach one value per cell, interpreted as
 * the cell average. Cell volumes come from the exact d-dimensional annulus
 * formula, so they grow like r^(d-1) and sum to the ball volume.
 */
class RadialGrid {
public:
    // Empty placeholder; every operation except assignment requires a real grid.
    RadialGrid() = default;
    RadialGrid(double radius, int dim, std::size_t n_cells);

    double radius() const { return radius_; }
    int dim() const { return dim_; }
    std::size_t n_cells() const { return volumes_.size(); }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& cell_volumes() const { return volumes_; }

    double node(std::size_t i) const { return nodes_[i]; }
    double cell_volume(std::size_t j) const { return volumes_[j]; }
    double cell_center(std::size_t j) const { return 0.5 * (nodes_[j] + nodes_[j + 1]); }
    double spacing() const { return radius_ / static_cast<double>(n_cells()); }

    // Volume of the ball of radius r, 0 <= r <= R.
    double ball_volume(double r) const;
    // Volume of the whole domain.
    double domain_volume() const { return total_volume_; }
    // Surface area of the sphere of radius r: d * omega_d * r^(d-1).
    double sphere_area(double r) const;

    bool same_as(const RadialGrid& other) const;

private:
    double radius_ = 0.0;
    int dim_ = 0;
    double unit_volume_ = 0.0;
    double total_volume_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> volumes_;
};

/**
 * Uniform partition of [0, T] into n_steps steps. Level n sits at n * dt,
 * except that the last level is pinned to exactly T.
 */
class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(double horizon, std::size_t n_steps);

    double horizon() const { return horizon_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_levels() const { return n_steps_ + 1; }
    double dt() const { return horizon_ / static_cast<double>(n_steps_); }
    double time(std::size_t level) const;

    bool same_as(const TimeGrid& other) const;

private:
    double horizon_ = 0.0;
    std::size_t n_steps_ = 0;
};

}
