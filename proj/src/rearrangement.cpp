#include "talenti/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "talenti/errors.hpp"
#include "talenti/quadrature.hpp"

namespace talenti {

namespace {

constexpr double kNegativeSlack = 1e-12;

std::vector<double> clamped_values(const RadialField& f, const char* context) {
    if (f.values.size() != f.grid.n_cells())
        throw DomainError(std::string(context) + ": value count does not match grid");
    std::vector<double> v = f.values;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (!std::isfinite(v[j]))
            throw DomainError(std::string(context) + ": non-finite value at cell " + std::to_string(j));
        if (v[j] < 0.0) {
            if (v[j] < -kNegativeSlack)
                throw DomainError(std::string(context) + ": negative value " + std::to_string(v[j]) +
                                  " at cell " + std::to_string(j));
            v[j] = 0.0;
        }
    }
    return v;
}

}

double DecreasingRearrangement::integral_to_volume(double v) const {
    if (!(v >= 0.0)) throw DomainError("integral_to_volume: negative volume");
    double total = prefix_volume.back();
    if (v >= total) return prefix_integral.back();
    auto it = std::upper_bound(prefix_volume.begin(), prefix_volume.end(), v);
    std::size_t k = static_cast<std::size_t>(it - prefix_volume.begin());
    // prefix_volume[k-1] <= v < prefix_volume[k], chunk k-1 is straddled.
    return prefix_integral[k - 1] + values[k - 1] * (v - prefix_volume[k - 1]);
}

double DecreasingRearrangement::level_measure(double tau) const {
    KahanSum s;
    for (std::size_t k = 0; k < values.size() && values[k] > tau; ++k) s.add(volumes[k]);
    return s.value();
}

DecreasingRearrangement decreasing_rearrangement(const RadialField& f) {
    std::vector<double> v = clamped_values(f, "decreasing_rearrangement");
    std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

    DecreasingRearrangement out;
    out.values.resize(n);
    out.volumes.resize(n);
    out.prefix_volume.resize(n + 1);
    out.prefix_integral.resize(n + 1);
    KahanSum vol, integral;
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = v[order[k]];
        out.volumes[k] = f.grid.cell_volume(order[k]);
        out.prefix_volume[k] = vol.value();
        out.prefix_integral[k] = integral.value();
        vol.add(out.volumes[k]);
        integral.add(out.values[k] * out.volumes[k]);
    }
    out.prefix_volume[n] = vol.value();
    out.prefix_integral[n] = integral.value();
    return out;
}

RadialField schwarz_rearrange(const RadialField& f) {
    DecreasingRearrangement dr = decreasing_rearrangement(f);
    const RadialGrid& grid = f.grid;
    std::size_t n = grid.n_cells();
    RadialField out = RadialField::zeros(grid, f.kind);

    std::size_t k = 0;
    double chunk_left = n ? dr.volumes[0] : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double cap = grid.cell_volume(j);
        double cap_left = cap;
        KahanSum acc;
        std::size_t contributions = 0;
        double single_value = 0.0;
        bool single_covers = false;
        while (cap_left > 0.0 && k < dr.values.size()) {
            double take = std::min(chunk_left, cap_left);
            if (contributions == 0 && take == cap) {
                single_value = dr.values[k];
                single_covers = true;
            }
            acc.add(dr.values[k] * take);
            ++contributions;
            cap_left -= take;
            chunk_left -= take;
            if (chunk_left <= 0.0) {
                ++k;
                chunk_left = k < dr.volumes.size() ? dr.volumes[k] : 0.0;
            }
        }
        out.values[j] = (contributions == 1 && single_covers) ? single_value : acc.value() / cap;
        // Exact cell averages of a decreasing step function are nonincreasing;
        // rounding in the weighted averages can break that by one ulp, which a
        // second rearrangement would then re-sort. Clamp to keep the invariant.
        if (j > 0 && out.values[j] > out.values[j - 1]) out.values[j] = out.values[j - 1];
    }
    return out;
}

SpaceTimeField schwarz_rearrange(const SpaceTimeField& f) {
    SpaceTimeField out = f;
    RadialField slice = RadialField::zeros(f.grid, f.kind);
    for (std::size_t n = 0; n < f.tgrid.n_levels(); ++n) {
        const double* row = f.slice(n);
        std::copy(row, row + f.grid.n_cells(), slice.values.begin());
        RadialField sorted = schwarz_rearrange(slice);
        std::copy(sorted.values.begin(), sorted.values.end(), out.slice(n));
    }
    return out;
}

double distribution_function(const RadialField& f, double tau) {
    if (f.values.size() != f.grid.n_cells())
        throw DomainError("distribution_function: value count does not match grid");
    KahanSum s;
    for (std::size_t j = 0; j < f.grid.n_cells(); ++j)
        if (f.values[j] > tau) s.add(f.grid.cell_volume(j));
    return s.value();
}

ConcentrationProfile concentration_profile(const RadialField& f) {
    ConcentrationProfile p{f.grid, {}, decreasing_rearrangement(f)};
    std::size_t n = f.grid.n_cells();
    p.node_cumulative.resize(n + 1);
    p.node_cumulative[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        p.node_cumulative[i] = p.rearrangement.integral_to_volume(f.grid.ball_volume(f.grid.node(i)));
    p.node_cumulative[n] = p.rearrangement.prefix_integral.back();
    return p;
}

DominanceResult dominates(const RadialField& f, const RadialField& g, double tol) {
    if (!f.grid.same_as(g.grid)) throw DomainError("dominates: grids differ");
    ConcentrationProfile pf = concentration_profile(f);
    ConcentrationProfile pg = concentration_profile(g);
    double margin = 0.0;
    for (std::size_t i = 1; i <= f.grid.n_cells(); ++i)
        margin = std::max(margin, pf.node_cumulative[i] - pg.node_cumulative[i]);
    return DominanceResult{margin <= tol, margin};
}

double hardy_littlewood_gap(const RadialField& f, const RadialField& g) {
    if (!f.grid.same_as(g.grid)) throw DomainError("hardy_littlewood_gap: grids differ");
    DecreasingRearrangement df = decreasing_rearrangement(f);
    DecreasingRearrangement dg = decreasing_rearrangement(g);

    // Merge the two chunk streams along the volume axis. When both fields are
    // already nonincreasing the chunks align cell by cell and the terms
    // reproduce the plain product sum bitwise.
    KahanSum sorted;
    std::size_t a = 0, b = 0;
    double a_left = df.volumes.empty() ? 0.0 : df.volumes[0];
    double b_left = dg.volumes.empty() ? 0.0 : dg.volumes[0];
    while (a < df.values.size() && b < dg.values.size()) {
        double take = std::min(a_left, b_left);
        sorted.add(df.values[a] * dg.values[b] * take);
        a_left -= take;
        b_left -= take;
        if (a_left <= 0.0) {
            ++a;
            a_left = a < df.volumes.size() ? df.volumes[a] : 0.0;
        }
        if (b_left <= 0.0) {
            ++b;
            b_left = b < dg.volumes.size() ? dg.volumes[b] : 0.0;
        }
    }

    RadialField fc{f.grid, f.kind, clamped_values(f, "hardy_littlewood_gap")};
    RadialField gc{g.grid, g.kind, clamped_values(g, "hardy_littlewood_gap")};
    return sorted.value() - inner_product(fc, gc);
}

double dirichlet_energy(const RadialField& f) {
    if (f.values.size() != f.grid.n_cells())
        throw DomainError("dirichlet_energy: value count does not match grid");
    const RadialGrid& g = f.grid;
    double dr = g.spacing();
    KahanSum e;
    for (std::size_t i = 1; i < g.n_cells(); ++i) {
        double jump = f.values[i] - f.values[i - 1];
        e.add(g.sphere_area(g.node(i)) * jump * jump / dr);
    }
    // Half-cell distance from the last center to the boundary value 0.
    double u_last = f.values[g.n_cells() - 1];
    e.add(2.0 * g.sphere_area(g.radius()) * u_last * u_last / dr);
    return e.value();
}

double polya_szego_gap(const RadialField& f) {
    return dirichlet_energy(f) - dirichlet_energy(schwarz_rearrange(f));
}

}
