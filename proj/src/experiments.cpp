#include "talenti/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "talenti/errors.hpp"
#include "talenti/quadrature.hpp"
#include "talenti/rearrangement.hpp"

namespace talenti {

double RunConfig::volume() const {
    return V0_fraction * T * make_grid().domain_volume();
}

void RunConfig::check() const {
    if (!(R > 0.0)) throw DomainError("config: R must be positive");
    if (d < 1 || d > 10) throw DomainError("config: d out of range [1, 10]");
    if (!(T > 0.0)) throw DomainError("config: T must be positive");
    if (!(V0_fraction > 0.0) || !(V0_fraction < 1.0))
        throw DomainError("config: V0_fraction outside (0, 1)");
    if (n_r < 2) throw DomainError("config: n_r must be at least 2");
    if (n_t < 1) throw DomainError("config: n_t must be at least 1");
}

namespace {

// Quintic smoothstep: s^3 (10 - 15 s + 6 s^2), C^2 on [0, 1].
double smoothstep5(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }

}

double CutoffSpec::operator()(double r) const {
    if (r <= plateau_radius) return 1.0;
    if (r >= support_radius) return 0.0;
    double s = (r - plateau_radius) / (support_radius - plateau_radius);
    return 1.0 - smoothstep5(s);
}

CutoffSpec make_cutoff(double plateau_radius, double support_radius) {
    if (!(0.0 < plateau_radius) || !(plateau_radius < support_radius))
        throw DomainError("make_cutoff: need 0 < plateau < support");
    return CutoffSpec{plateau_radius, support_radius};
}

RadialField sample_cutoff(const CutoffSpec& spec, const RadialGrid& grid) {
    if (!(spec.support_radius <= grid.radius()))
        throw DomainError("sample_cutoff: support exceeds the domain");
    return RadialField::sample(grid, [&](double r) { return spec(r); }, FieldKind::adjoint);
}

double talenti_tolerance(const RadialGrid& grid, const TimeGrid& tgrid) {
    double dr = grid.spacing();
    // Scale calibrated on seeded refinement studies. Measured comparison
    // margins for rearranged controls stay at or below zero on every grid
    // tried, while genuinely non-maximal candidates lose to a rearranged
    // rival by at least 5e-4 at the default resolution, an order of
    // magnitude above this bound there.
    constexpr double kScale = 1.0;
    return kScale * (tgrid.dt() + dr * dr);
}

TalentiCheckResult verify_talenti(const SpaceTimeField& f, Scheme scheme) {
    HeatSolution direct = solve_heat(f, scheme);
    HeatSolution symmetrized = solve_heat(schwarz_rearrange(f), scheme);

    // Level 0 is identically zero on both sides and would pin the signed
    // margin at 0, so the scan starts at level 1.
    TalentiCheckResult result;
    std::size_t n = f.grid.n_cells();
    RadialField a = RadialField::zeros(f.grid), b = RadialField::zeros(f.grid);
    bool first = true;
    for (std::size_t level = 1; level <= f.tgrid.n_steps(); ++level) {
        const double* ua = direct.u.slice(level);
        const double* ub = symmetrized.u.slice(level);
        for (std::size_t j = 0; j < n; ++j) {
            a.values[j] = std::max(0.0, ua[j]);
            b.values[j] = std::max(0.0, ub[j]);
        }
        ConcentrationProfile pa = concentration_profile(a);
        ConcentrationProfile pb = concentration_profile(b);
        for (std::size_t i = 1; i <= n; ++i) {
            double diff = pa.node_cumulative[i] - pb.node_cumulative[i];
            if (first || diff > result.worst_margin) {
                result.worst_margin = diff;
                result.worst_level = level;
                result.worst_radius = f.grid.node(i);
                first = false;
            }
        }
    }
    return result;
}

double StepApproximation::evaluate_annulus(double r) const {
    if (r < 0.0 || r > radii.back()) return 0.0;
    if (r <= radii[1] || alpha.size() == 1) return alpha[0];
    // r in (radii[j], radii[j+1]] picks alpha[j].
    auto it = std::lower_bound(radii.begin(), radii.end(), r);
    std::size_t j = static_cast<std::size_t>(it - radii.begin()) - 1;
    return alpha[std::min(j, alpha.size() - 1)];
}

double StepApproximation::evaluate_nested(double r) const {
    double v = 0.0;
    for (std::size_t j = 1; j < radii.size(); ++j)
        if (r <= radii[j]) v += beta[j - 1];
    return v;
}

StepApproximation step_approximation(const std::function<double(double)>& profile, double R,
                                     std::size_t k) {
    if (!(R > 0.0)) throw DomainError("step_approximation: R must be positive");
    if (k < 1) throw DomainError("step_approximation: need at least one annulus");
    StepApproximation s;
    s.radii.resize(k + 1);
    for (std::size_t j = 0; j <= k; ++j)
        s.radii[j] = R * (static_cast<double>(j) / static_cast<double>(k));
    s.alpha.resize(k);
    for (std::size_t j = 0; j < k; ++j) s.alpha[j] = profile(s.radii[j + 1]);
    s.beta.resize(k);
    s.beta[k - 1] = s.alpha[k - 1];
    for (std::size_t j = 1; j < k; ++j) {
        double step = s.alpha[j - 1] - s.alpha[j];
        if (step < 0.0) {
            if (step < -1e-12)
                throw DomainError("step_approximation: profile increases between annuli " +
                                  std::to_string(j - 1) + " and " + std::to_string(j));
            step = 0.0;
        }
        s.beta[j - 1] = step;
    }
    if (s.beta[k - 1] < 0.0) {
        if (s.beta[k - 1] < -1e-12)
            throw DomainError("step_approximation: profile negative at the outer annulus");
        s.beta[k - 1] = 0.0;
    }
    return s;
}

namespace {

CutoffOptimum summarize_cutoff(const CutoffSpec& spec, const RunConfig& config,
                               const BathtubSolution& bath) {
    CutoffOptimum out;
    out.cutoff = spec;
    out.multiplier = bath.multiplier;
    out.objective = bath.objective;
    out.feasibility_residual = bath.feasibility_residual;
    out.certificate_gap = bath.certificate_gap;
    out.radius_curve = bath.radius_curve;
    out.radius_terminal = out.radius_curve[config.n_t];
    out.radius_preterminal = out.radius_curve[config.n_t - 1];
    return out;
}

}

CounterexampleReport run_counterexample(const RunConfig& config, CutoffSpec narrow_spec,
                                        CutoffSpec wide_spec, CounterexampleArtifacts* artifacts) {
    config.check();
    RadialGrid grid = config.make_grid();
    TimeGrid tgrid = config.make_time_grid();
    double volume = config.volume();

    CounterexampleReport report;
    report.config = config;
    report.volume = volume;

    RadialField phi = sample_cutoff(narrow_spec, grid);
    RadialField psi = sample_cutoff(wide_spec, grid);

    AdjointSolution adj_phi = solve_adjoint(phi, tgrid, config.scheme);
    AdjointSolution adj_psi = solve_adjoint(psi, tgrid, config.scheme);

    BathtubSolution bath_phi = bathtub_optimize(adj_phi, volume);
    BathtubSolution bath_psi = bathtub_optimize(adj_psi, volume);
    report.phi = summarize_cutoff(narrow_spec, config, bath_phi);
    report.psi = summarize_cutoff(wide_spec, config, bath_psi);
    const SpaceTimeField& f_phi = bath_phi.control.f;
    const SpaceTimeField& f_psi = bath_psi.control.f;

    SpaceTimeField diff = SpaceTimeField::zeros(grid, tgrid, FieldKind::state);
    for (std::size_t i = 0; i < diff.values.size(); ++i)
        diff.values[i] = std::abs(f_phi.values[i] - f_psi.values[i]);
    report.control_distance = integrate_spacetime(diff) / (tgrid.horizon() * grid.domain_volume());

    // The reported objectives come from forward solves, so the strict
    // inequalities are independent of the duality identity; the duality gaps
    // then bound the disagreement with the optimizer's own values.
    HeatSolution u_phi = solve_heat(f_phi, config.scheme);
    HeatSolution u_psi = solve_heat(f_psi, config.scheme);
    RadialField u_phi_T = u_phi.u.slice_field(config.n_t);
    RadialField u_psi_T = u_psi.u.slice_field(config.n_t);
    report.J_phi_on_f_phi = inner_product(u_phi_T, phi);
    report.J_phi_on_f_psi = inner_product(u_psi_T, phi);
    report.J_psi_on_f_psi = inner_product(u_psi_T, psi);
    report.J_psi_on_f_phi = inner_product(u_phi_T, psi);
    report.margin_phi = report.J_phi_on_f_phi - report.J_phi_on_f_psi;
    report.margin_psi = report.J_psi_on_f_psi - report.J_psi_on_f_phi;

    double gaps[4] = {
        std::abs(report.J_phi_on_f_phi - report.phi.objective),
        std::abs(report.J_phi_on_f_psi - objective(f_psi, adj_phi)),
        std::abs(report.J_psi_on_f_psi - report.psi.objective),
        std::abs(report.J_psi_on_f_phi - objective(f_phi, adj_psi)),
    };
    report.phi.duality_gap_value = gaps[0];
    report.psi.duality_gap_value = gaps[2];
    report.max_duality_gap = *std::max_element(gaps, gaps + 4);

    // Both radius curves sit apart on a fixed trailing window, the discrete
    // stand-in for a neighbourhood of the terminal time.
    std::size_t window = std::max<std::size_t>(2, config.n_t / 16);
    if (window > config.n_t) window = config.n_t;
    report.separation_levels = window;
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t level = config.n_t - window; level < config.n_t; ++level)
        min_sep = std::min(min_sep, std::abs(bath_phi.radius_curve[level] -
                                             bath_psi.radius_curve[level]));
    report.min_radius_separation = min_sep;

    if (artifacts) {
        artifacts->control_phi = std::move(bath_phi.control.f);
        artifacts->control_psi = std::move(bath_psi.control.f);
        artifacts->adjoint_phi = std::move(adj_phi.p);
        artifacts->adjoint_psi = std::move(adj_psi.p);
        artifacts->state_phi_terminal = std::move(u_phi_T);
        artifacts->state_psi_terminal = std::move(u_psi_T);
    }
    return report;
}

CounterexampleReport run_counterexample(const RunConfig& config,
                                        CounterexampleArtifacts* artifacts) {
    return run_counterexample(config, make_cutoff(config.R / 8.0, config.R / 4.0),
                              make_cutoff(config.R / 2.0, 3.0 * config.R / 4.0), artifacts);
}

RunConfig counterexample_defaults() {
    RunConfig cfg;
    cfg.n_t = 32768;
    return cfg;
}

void fit_volume(SpaceTimeField& f, double volume) {
    auto shifted_integral = [&](double shift) {
        KahanSum s;
        std::vector<double> w = trapezoid_weights(f.tgrid);
        for (std::size_t n = 0; n < f.tgrid.n_levels(); ++n) {
            const double* row = f.slice(n);
            for (std::size_t j = 0; j < f.grid.n_cells(); ++j)
                s.add(w[n] * f.grid.cell_volume(j) * std::clamp(row[j] + shift, 0.0, 1.0));
        }
        return s.value();
    };
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 120; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (shifted_integral(mid) < volume)
            lo = mid;
        else
            hi = mid;
    }
    for (double& v : f.values) v = std::clamp(v + hi, 0.0, 1.0);
    double cylinder = f.tgrid.horizon() * f.grid.domain_volume();
    if (std::abs(integrate_spacetime(f) - volume) > 1e-9 * cylinder)
        throw DomainError("fit_volume: target volume unreachable within [0, 1] bounds");
}

SpaceTimeField random_admissible(const RadialGrid& grid, const TimeGrid& tgrid, double volume,
                                 Xoshiro256ss& rng, std::size_t flavor) {
    double cylinder = tgrid.horizon() * grid.domain_volume();
    if (!(volume > 0.0) || !(volume < cylinder))
        throw DomainError("random_admissible: volume outside (0, T*|Omega|)");

    SpaceTimeField f;
    switch (flavor % 4) {
        case 0:
        case 1: {
            // Low-order random trigonometric field; fixed smooth structure so
            // refinement studies see the same underlying function.
            double a[3][3], th[3][3], et[3][3];
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    a[k][l] = rng.uniform(-1.0, 1.0);
                    th[k][l] = rng.uniform(0.0, 2.0 * M_PI);
                    et[k][l] = rng.uniform(0.0, 2.0 * M_PI);
                }
            double T = tgrid.horizon(), R = grid.radius();
            f = SpaceTimeField::sample(
                grid, tgrid,
                [&](double t, double x) {
                    double v = 0.0;
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l)
                            v += a[k][l] * std::cos(k * M_PI * t / T + th[k][l]) *
                                 std::cos(l * M_PI * x / R + et[k][l]);
                    return v;
                },
                FieldKind::control);
            double lo = *std::min_element(f.values.begin(), f.values.end());
            double hi = *std::max_element(f.values.begin(), f.values.end());
            double span = hi - lo > 0.0 ? hi - lo : 1.0;
            if (flavor % 4 == 0) {
                for (double& v : f.values) v = (v - lo) / span;
            } else {
                // Steep clamp around the median level: nearly bang-bang.
                double mid = 0.5 * (lo + hi);
                for (double& v : f.values) v = std::clamp(50.0 * (v - mid) / span + 0.5, 0.0, 1.0);
            }
            break;
        }
        case 2: {
            // Indicator of a space-time cylinder slab with random radius and
            // start time, sized so the target volume is reachable.
            double R = grid.radius(), T = tgrid.horizon();
            double rho = 0.0, slab = 0.0;
            for (int attempt = 0; attempt < 64; ++attempt) {
                rho = rng.uniform(0.2, 0.9) * R;
                slab = volume / grid.ball_volume(rho);
                if (slab <= 0.95 * T) break;
            }
            if (slab > T) slab = T;
            double t0 = rng.uniform(0.0, T - slab);
            f = SpaceTimeField::sample(
                grid, tgrid,
                [&](double t, double x) {
                    return (x <= rho && t >= t0 && t <= t0 + slab) ? 1.0 : 0.0;
                },
                FieldKind::control);
            break;
        }
        default: {
            // Indicator of an annulus block, an off-center mass profile the
            // ball flavors never produce.
            double R = grid.radius(), T = tgrid.horizon();
            double inner = 0.0, outer = 0.0, slab = 0.0;
            for (int attempt = 0; attempt < 64; ++attempt) {
                inner = rng.uniform(0.05, 0.6) * R;
                outer = std::min(R, inner + rng.uniform(0.15, 0.35) * R);
                slab = volume / (grid.ball_volume(outer) - grid.ball_volume(inner));
                if (slab <= 0.95 * T) break;
            }
            if (slab > T) slab = T;
            double t0 = rng.uniform(0.0, T - slab);
            f = SpaceTimeField::sample(
                grid, tgrid,
                [&](double t, double x) {
                    return (x > inner && x <= outer && t >= t0 && t <= t0 + slab) ? 1.0 : 0.0;
                },
                FieldKind::control);
            break;
        }
    }
    fit_volume(f, volume);
    return f;
}

SweepReport maximality_sweep(const SpaceTimeField& candidate, const RunConfig& config,
                             std::size_t n_samples) {
    config.check();
    RadialGrid grid = config.make_grid();
    TimeGrid tgrid = config.make_time_grid();
    if (!candidate.grid.same_as(grid) || !candidate.tgrid.same_as(tgrid))
        throw DomainError("maximality_sweep: candidate does not live on the configured grids");
    double volume = config.volume();

    SweepReport report;
    report.config = config;
    report.tolerance = talenti_tolerance(grid, tgrid);

    HeatSolution cand_state = solve_heat(candidate, config.scheme);
    RadialField cand_T = cand_state.u.slice_field(config.n_t);
    for (double& v : cand_T.values) v = std::max(0.0, v);

    RadialField phi = sample_cutoff(make_cutoff(config.R / 8.0, config.R / 4.0), grid);
    RadialField psi = sample_cutoff(make_cutoff(config.R / 2.0, 3.0 * config.R / 4.0), grid);
    BathtubSolution bath_phi = bathtub_optimize(phi, tgrid, volume, config.scheme);
    BathtubSolution bath_psi = bathtub_optimize(psi, tgrid, volume, config.scheme);

    if (n_samples < 2)
        throw DomainError("maximality_sweep: n_samples must cover the two optimal-cutoff witnesses");
    ConcentrationProfile pc = concentration_profile(cand_T);
    std::size_t total = n_samples;
    report.witnesses.resize(total);
    parallel_for(total, [&](std::size_t i) {
        SweepWitness w;
        SpaceTimeField g;
        if (i == 0) {
            w.name = "optimal-narrow-cutoff";
            g = bath_phi.control.f;
        } else if (i == 1) {
            w.name = "optimal-wide-cutoff";
            g = bath_psi.control.f;
        } else {
            std::size_t k = i - 2;
            w.name = "random-" + std::to_string(k);
            Xoshiro256ss rng(config.seed + 0x9E3779B97F4A7C15ULL * (k + 1));
            g = random_admissible(grid, tgrid, volume, rng, k);
        }
        HeatSolution st = solve_heat(g, config.scheme);
        RadialField gT = st.u.slice_field(config.n_t);
        for (double& v : gT.values) v = std::max(0.0, v);
        ConcentrationProfile pg = concentration_profile(gT);
        for (std::size_t node = 1; node <= grid.n_cells(); ++node) {
            double diff = pg.node_cumulative[node] - pc.node_cumulative[node];
            if (node == 1 || diff > w.margin) {
                w.margin = diff;
                w.worst_radius = grid.node(node);
            }
        }
        w.failure = w.margin > report.tolerance;
        report.witnesses[i] = std::move(w);
    });
    for (const SweepWitness& w : report.witnesses)
        if (w.failure) report.candidate_defeated = true;
    return report;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = 1;
    if (const char* env = std::getenv("TALENTI_LAB_THREADS")) {
        char* end = nullptr;
        long requested = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && requested > 1) workers = static_cast<std::size_t>(requested);
        workers = std::min<std::size_t>(workers, 64);
    }
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}
