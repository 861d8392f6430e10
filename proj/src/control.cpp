#include "talenti/control.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "talenti/errors.hpp"
#include "talenti/quadrature.hpp"
#include "talenti/rearrangement.hpp"

namespace talenti {

AdmissibleControl make_admissible(SpaceTimeField f, double volume) {
    f.kind = FieldKind::control;
    validate(f, "make_admissible");
    double cylinder = f.tgrid.horizon() * f.grid.domain_volume();
    if (!(volume > 0.0) || !(volume < cylinder))
        throw DomainError("make_admissible: volume outside (0, T*|Omega|)");
    double residual = std::abs(integrate_spacetime(f) - volume);
    if (residual > 1e-9 * cylinder)
        throw DomainError("make_admissible: integral misses the prescribed volume by " +
                          std::to_string(residual));
    return AdmissibleControl{std::move(f), volume, residual};
}

double objective(const SpaceTimeField& f, const RadialField& phi, Scheme scheme) {
    AdjointSolution adj = solve_adjoint(phi, f.tgrid, scheme);
    return objective(f, adj);
}

double objective(const SpaceTimeField& f, const AdjointSolution& adjoint) {
    return inner_product(f, adjoint.p);
}

namespace {

// Flattened (time level, cell) slots in level-major order with trapezoid
// weights; the fixed order makes every reduction reproducible.
struct SlotData {
    const SpaceTimeField* p = nullptr;
    std::vector<double> weights;           // per level
    std::vector<std::uint32_t> order;      // slot ids sorted by value desc, id asc
    std::vector<double> sorted_prefix_weight;  // cumulative weight before sorted position k
    double total_weight = 0.0;

    std::size_t n_cells() const { return p->grid.n_cells(); }
    double value(std::uint32_t slot) const { return p->values[slot]; }
    double weight(std::uint32_t slot) const {
        return weights[slot / n_cells()] * p->grid.cell_volume(slot % n_cells());
    }
};

SlotData build_slots(const SpaceTimeField& p) {
    SlotData s;
    s.p = &p;
    s.weights = trapezoid_weights(p.tgrid);
    std::size_t n = p.values.size();
    s.order.resize(n);
    std::iota(s.order.begin(), s.order.end(), std::uint32_t{0});
    std::stable_sort(s.order.begin(), s.order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return p.values[a] > p.values[b];
    });
    s.sorted_prefix_weight.resize(n + 1);
    KahanSum cum;
    for (std::size_t k = 0; k < n; ++k) {
        s.sorted_prefix_weight[k] = cum.value();
        cum.add(s.weight(s.order[k]));
    }
    s.sorted_prefix_weight[n] = cum.value();
    s.total_weight = cum.value();
    return s;
}

// Measure of {p > c} via the sorted order; exact nonincreasing step function.
double level_measure(const SlotData& s, double c) {
    // First sorted position whose value is <= c.
    std::size_t lo = 0, hi = s.order.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (s.value(s.order[mid]) > c)
            lo = mid + 1;
        else
            hi = mid;
    }
    return s.sorted_prefix_weight[lo];
}

double superlevel_radius(const RadialGrid& grid, const double* p, double c) {
    std::size_t n = grid.n_cells();
    std::size_t j = n;
    while (j-- > 0)
        if (p[j] > c) break;
    if (j == static_cast<std::size_t>(-1)) return 0.0;
    double x_j = grid.cell_center(j);
    if (j + 1 == n) {
        // Boundary segment: interpolate against the Dirichlet value 0 at R.
        double r = x_j + (p[j] - c) / p[j] * (grid.radius() - x_j);
        return std::min(r, grid.radius());
    }
    double x_next = grid.cell_center(j + 1);
    return x_j + (p[j] - c) / (p[j] - p[j + 1]) * (x_next - x_j);
}

}

BathtubSolution bathtub_optimize(const AdjointSolution& adjoint, double volume) {
    const SpaceTimeField& p = adjoint.p;
    const RadialGrid& grid = p.grid;
    const TimeGrid& tgrid = p.tgrid;
    double cylinder = tgrid.horizon() * grid.domain_volume();
    if (!(volume > 0.0) || !(volume < cylinder))
        throw DomainError("bathtub_optimize: volume outside (0, T*|Omega|)");

    SlotData slots = build_slots(p);
    double max_value = slots.order.empty() ? 0.0 : slots.value(slots.order.front());
    if (!(max_value > 0.0)) throw DomainError("bathtub_optimize: adjoint is identically zero");
    if (level_measure(slots, 0.0) < volume)
        throw DomainError(
            "bathtub_optimize: volume target exceeds the measure of {p > 0}; "
            "the threshold would degenerate to 0");

    // Bisection on the threshold, run to adjacent doubles. The level measure
    // is an exact step function of c, so the bracket ends exactly at the
    // value class straddling the volume target.
    double lo = 0.0, hi = max_value;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (level_measure(slots, mid) >= volume)
            lo = mid;
        else
            hi = mid;
    }
    double filled = level_measure(slots, hi);
    double class_weight = level_measure(slots, lo) - filled;
    double deficit = volume - filled;
    double theta = 0.0;
    if (deficit > 0.0) {
        if (!(class_weight > 0.0))
            throw DegenerateLevelError("bathtub_optimize: empty straddle class for threshold " +
                                       std::to_string(hi));
        theta = std::min(1.0, deficit / class_weight);
    }

    BathtubSolution sol;
    SpaceTimeField f = SpaceTimeField::zeros(grid, tgrid, FieldKind::control);
    KahanSum objective_fill;
    for (std::uint32_t slot : slots.order) {
        double v = slots.value(slot);
        if (v > hi) {
            f.values[slot] = 1.0;
            objective_fill.add(slots.weight(slot) * v);
        } else if (v > lo) {
            f.values[slot] = theta;
            objective_fill.add(theta * slots.weight(slot) * v);
        } else {
            break;  // sorted order: everything after is <= lo
        }
    }

    // Independent evaluation of the optimum from the sorted prefix: fill
    // whole slots until the target, then a fractional slot.
    KahanSum objective_sorted;
    double c_canonical = max_value;
    {
        std::size_t n = slots.order.size();
        std::size_t k = 0;
        for (; k < n; ++k) {
            double w = slots.weight(slots.order[k]);
            double v = slots.value(slots.order[k]);
            if (slots.sorted_prefix_weight[k] + w < volume) {
                objective_sorted.add(w * v);
            } else {
                objective_sorted.add((volume - slots.sorted_prefix_weight[k]) * v);
                c_canonical = v;
                break;
            }
        }
        if (k == n) c_canonical = slots.value(slots.order.back());
    }
    double j_fill = objective_fill.value();
    double j_sorted = objective_sorted.value();
    sol.certificate_gap = std::abs(j_fill - j_sorted) / std::max(1.0, std::abs(j_sorted));
    if (sol.certificate_gap > 1e-10)
        throw ContractError("bathtub_optimize: certificate failed, fill objective " +
                            std::to_string(j_fill) + " vs sorted optimum " +
                            std::to_string(j_sorted));

    sol.multiplier = theta > 0.0 ? hi : c_canonical;
    sol.objective = j_fill;
    sol.control = make_admissible(std::move(f), volume);
    sol.feasibility_residual = sol.control.residual;

    sol.radius_curve.resize(tgrid.n_levels());
    for (std::size_t n = 0; n < tgrid.n_levels(); ++n)
        sol.radius_curve[n] = superlevel_radius(grid, p.slice(n), sol.multiplier);
    return sol;
}

BathtubSolution bathtub_optimize(const RadialField& terminal, const TimeGrid& tgrid, double volume,
                                 Scheme scheme) {
    return bathtub_optimize(solve_adjoint(terminal, tgrid, scheme), volume);
}

double level_radius(const AdjointSolution& adjoint, std::size_t t_index, double c) {
    const SpaceTimeField& p = adjoint.p;
    if (t_index >= p.tgrid.n_levels()) throw DomainError("level_radius: t_index out of range");
    const double* slice = p.slice(t_index);
    std::size_t n = p.grid.n_cells();
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(slice[j]));
    for (std::size_t j = 0; j + 1 < n; ++j)
        if (slice[j + 1] - slice[j] > 1e-12 * scale)
            throw DomainError("level_radius: profile increases at cell " + std::to_string(j) +
                              "; slice is not radially nonincreasing");
    if (!(c > slice[n - 1]) || !(c < slice[0]))
        throw DomainError("level_radius: level outside the open range of the profile");
    return superlevel_radius(p.grid, slice, c);
}

double solve_P_r(const RadialGrid& grid, const TimeGrid& tgrid, double r, double volume) {
    if (!(r > 0.0) || !(r < grid.radius()))
        throw DomainError("solve_P_r: radius outside (0, R)");
    double dr = grid.spacing();
    RadialField ramp = RadialField::sample(
        grid,
        [&](double x) { return std::clamp((r - x) / dr, 0.0, 1.0); },
        FieldKind::adjoint);
    BathtubSolution best = bathtub_optimize(ramp, tgrid, volume);
    HeatSolution state = solve_heat(best.control.f, Scheme::implicit_euler);
    ConcentrationProfile profile = concentration_profile(state.u.slice_field(tgrid.n_steps()));
    return profile.at_volume(grid.ball_volume(r));
}

}
