#include "cli/dispatch.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "cli/json_writer.hpp"
#include "cli/run_config.hpp"
#include "talenti/control.hpp"
#include "talenti/errors.hpp"
#include "talenti/experiments.hpp"
#include "talenti/field_io.hpp"
#include "talenti/quadrature.hpp"
#include "talenti/rearrangement.hpp"

namespace talenti::cli {

namespace {

// Machine-readable reports go to stdout; --out duplicates them to a file,
// atomically. Human summaries go to stderr only.
void emit(const std::string& json, const std::string& out_path) {
    std::string line = json + "\n";
    std::fputs(line.c_str(), stdout);
    if (!out_path.empty()) write_text_atomic(out_path, line);
}

// Long per-level curves are thinned to at most ~1k points for reports; the
// stride is recorded so consumers can reconstruct the time axis. The final
// level is always kept.
struct DecimatedCurve {
    std::size_t stride = 1;
    std::vector<double> points;
};

DecimatedCurve decimate(const std::vector<double>& v, std::size_t max_points = 1025) {
    DecimatedCurve d;
    if (v.size() > max_points) d.stride = (v.size() + max_points - 1) / max_points;
    for (std::size_t i = 0; i < v.size(); i += d.stride) d.points.push_back(v[i]);
    if (!v.empty() && (v.size() - 1) % d.stride != 0) d.points.push_back(v.back());
    return d;
}

const char* flavor_name(std::size_t flavor) {
    switch (flavor % 4) {
        case 0: return "smooth";
        case 1: return "bang-bang";
        case 2: return "slab";
        default: return "annulus";
    }
}

int run_rearrange(const std::string& in_path, const std::string& out_path) {
    auto loaded = load_field(in_path);
    std::visit([&](const auto& f) { save_field(schwarz_rearrange(f), out_path); }, loaded);
    return 0;
}

int run_compare(const std::string& f_path, const std::string& g_path, double tol) {
    auto lf = load_field(f_path);
    auto lg = load_field(g_path);
    JsonWriter w;
    if (std::holds_alternative<RadialField>(lf) && std::holds_alternative<RadialField>(lg)) {
        DominanceResult res = dominates(std::get<RadialField>(lf), std::get<RadialField>(lg), tol);
        w.begin_object()
            .field("shape", "radial")
            .field("verdict", res.dominated)
            .field("margin", res.margin)
            .field("tol", tol)
            .end_object();
    } else if (std::holds_alternative<SpaceTimeField>(lf) &&
               std::holds_alternative<SpaceTimeField>(lg)) {
        const auto& f = std::get<SpaceTimeField>(lf);
        const auto& g = std::get<SpaceTimeField>(lg);
        if (!f.tgrid.same_as(g.tgrid)) throw DomainError("compare: time grids differ");
        bool dominated = true;
        double margin = 0.0;
        std::size_t worst_level = 0;
        for (std::size_t level = 0; level <= f.tgrid.n_steps(); ++level) {
            DominanceResult res = dominates(f.slice_field(level), g.slice_field(level), tol);
            if (!res.dominated) dominated = false;
            if (level == 0 || res.margin > margin) {
                margin = res.margin;
                worst_level = level;
            }
        }
        w.begin_object()
            .field("shape", "spacetime")
            .field("verdict", dominated)
            .field("margin", margin)
            .field_size("worst_level", worst_level)
            .field("tol", tol)
            .end_object();
    } else {
        throw DomainError("compare: one field is radial and the other space-time");
    }
    emit(w.str(), "");
    return 0;
}

int run_solve(const std::string& source_path, const std::string& scheme_name,
              const std::string& out_path) {
    SpaceTimeField f = load_spacetime_field(source_path);
    Scheme scheme = scheme_from_string(scheme_name);
    HeatSolution sol = solve_heat(f, scheme);
    save_field(sol.u, out_path);
    JsonWriter w;
    w.begin_object()
        .field("scheme", to_string(scheme))
        .field("residual_norm", sol.residual_norm)
        .field("min_value", maximum_principle_check(sol))
        .field("terminal_mass", integrate_cells(sol.u.slice_field(f.tgrid.n_steps())))
        .end_object();
    emit(w.str(), "");
    return 0;
}

int run_adjoint(const std::string& terminal_path, double horizon, std::size_t n_t,
                const std::string& scheme_name, const std::string& out_path,
                const std::string& derivative_path) {
    RadialField terminal = load_radial_field(terminal_path);
    TimeGrid tgrid(horizon, n_t);
    Scheme scheme = scheme_from_string(scheme_name);
    AdjointSolution adj = solve_adjoint(terminal, tgrid, scheme);
    save_field(adj.p, out_path);
    if (!derivative_path.empty()) save_field(adj.radial_derivative, derivative_path);
    JsonWriter w;
    w.begin_object()
        .field("scheme", to_string(scheme))
        .field("terminal_mass", integrate_cells(terminal))
        .field("initial_origin_value", adj.p.at(0, 0))
        .end_object();
    emit(w.str(), "");
    return 0;
}

int run_optimize(const std::string& terminal_path, double horizon, std::size_t n_t, double volume,
                 const std::string& scheme_name, const std::string& out_path,
                 const std::string& report_path) {
    RadialField terminal = load_radial_field(terminal_path);
    TimeGrid tgrid(horizon, n_t);
    Scheme scheme = scheme_from_string(scheme_name);
    AdjointSolution adj = solve_adjoint(terminal, tgrid, scheme);
    BathtubSolution bath = bathtub_optimize(adj, volume);
    save_field(bath.control.f, out_path);
    DecimatedCurve curve = decimate(bath.radius_curve);
    JsonWriter w;
    w.begin_object()
        .field("scheme", to_string(scheme))
        .field("volume", volume)
        .field("c", bath.multiplier)
        .field("objective", bath.objective)
        .field("feasibility_residual", bath.feasibility_residual)
        .field("certificate_gap", bath.certificate_gap)
        .field_size("radius_curve_stride", curve.stride)
        .field("radius_curve", curve.points)
        .end_object();
    emit(w.str(), report_path);
    return 0;
}

// Shared experiment configuration flags. A config file is applied on top of
// the subcommand's defaults, explicit flags win over both.
struct ConfigFlags {
    std::string config_path;
    std::size_t n_r = 0;
    std::size_t n_t = 0;
    std::uint64_t seed = 0;
    std::string scheme;
};

void add_config_flags(CLI::App* sub, ConfigFlags& cf) {
    sub->add_option("--config", cf.config_path, "JSON config file applied over the defaults")
        ->check(CLI::ExistingFile);
    sub->add_option("--nr", cf.n_r, "number of radial cells");
    sub->add_option("--nt", cf.n_t, "number of time steps");
    sub->add_option("--seed", cf.seed, "random seed");
    sub->add_option("--scheme", cf.scheme, "implicit-euler or crank-nicolson");
}

RunConfig resolve_config(const CLI::App* sub, const ConfigFlags& cf, RunConfig cfg) {
    if (sub->count("--config")) cfg = load_config(cf.config_path, cfg);
    if (sub->count("--nr")) cfg.n_r = cf.n_r;
    if (sub->count("--nt")) cfg.n_t = cf.n_t;
    if (sub->count("--seed")) cfg.seed = cf.seed;
    if (sub->count("--scheme")) cfg.scheme = scheme_from_string(cf.scheme);
    cfg.check();
    return cfg;
}

int run_talenti_experiment(const RunConfig& cfg, std::size_t samples, bool refine,
                           const std::string& out_path) {
    if (samples == 0) throw DomainError("experiment talenti: --samples must be at least 1");
    RadialGrid grid = cfg.make_grid();
    TimeGrid tgrid = cfg.make_time_grid();
    double volume = cfg.volume();
    double tol = talenti_tolerance(grid, tgrid);

    std::vector<TalentiCheckResult> rows(samples);
    parallel_for(samples, [&](std::size_t k) {
        Xoshiro256ss rng(cfg.seed + 0x9E3779B97F4A7C15ULL * (k + 1));
        SpaceTimeField f = random_admissible(grid, tgrid, volume, rng, k);
        rows[k] = verify_talenti(f, cfg.scheme);
    });

    double worst = rows[0].worst_margin;
    std::size_t worst_sample = 0;
    for (std::size_t k = 1; k < samples; ++k)
        if (rows[k].worst_margin > worst) {
            worst = rows[k].worst_margin;
            worst_sample = k;
        }
    bool all_ok = worst <= tol;

    JsonWriter w;
    w.begin_object();
    w.key("config");
    write_config(w, cfg);
    w.field("tolerance", tol)
        .field_size("samples", samples)
        .field("worst_margin", worst)
        .field_size("worst_sample", worst_sample)
        .field("all_within_tolerance", all_ok);
    w.key("rows").begin_array();
    for (std::size_t k = 0; k < samples; ++k) {
        w.begin_object()
            .field_size("sample", k)
            .field("flavor", flavor_name(k))
            .field("margin", rows[k].worst_margin)
            .field_size("worst_level", rows[k].worst_level)
            .field("worst_radius", rows[k].worst_radius)
            .field("within_tolerance", rows[k].worst_margin <= tol)
            .end_object();
    }
    w.end_array();
    if (refine) {
        // The first sample's construction is resampled on doubled grids; the
        // violation should shrink at least as fast as the tolerance.
        w.key("refinement").begin_array();
        for (std::size_t s = 0; s < 3; ++s) {
            std::size_t mul = std::size_t{1} << s;
            RadialGrid g2(cfg.R, cfg.d, cfg.n_r * mul);
            TimeGrid t2(cfg.T, cfg.n_t * mul);
            Xoshiro256ss rng(cfg.seed + 0x9E3779B97F4A7C15ULL);
            SpaceTimeField f = random_admissible(g2, t2, volume, rng, 0);
            TalentiCheckResult r2 = verify_talenti(f, cfg.scheme);
            w.begin_object()
                .field_size("n_r", cfg.n_r * mul)
                .field_size("n_t", cfg.n_t * mul)
                .field("tolerance", talenti_tolerance(g2, t2))
                .field("margin", r2.worst_margin)
                .end_object();
        }
        w.end_array();
    }
    w.end_object();
    emit(w.str(), out_path);
    std::fprintf(stderr, "talenti check: %zu samples, worst margin %.3e vs tolerance %.3e, %s\n",
                 samples, worst, tol, all_ok ? "all within tolerance" : "VIOLATED");
    return all_ok ? 0 : 4;
}

void write_cutoff_block(JsonWriter& w, const CutoffOptimum& c) {
    w.begin_object()
        .field("inner_radius", c.cutoff.plateau_radius)
        .field("outer_radius", c.cutoff.support_radius)
        .field("profile", "quintic")
        .field("objective", c.objective)
        .field("feasibility_residual", c.feasibility_residual)
        .field("certificate_gap", c.certificate_gap)
        .field("duality_gap", c.duality_gap_value)
        .field("radius_terminal", c.radius_terminal)
        .field("radius_preterminal", c.radius_preterminal)
        .end_object();
}

// Plotting CSVs beside the field files: the full-resolution radius curves
// and the terminal-state concentration profiles.
void save_profiles(const std::string& dir, const RunConfig& cfg,
                   const CounterexampleReport& rep, const CounterexampleArtifacts& arts) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto at = [&](const char* name) { return (fs::path(dir) / name).string(); };

    save_field(arts.control_phi, at("control_phi.csv"));
    save_field(arts.control_psi, at("control_psi.csv"));
    save_field(arts.adjoint_phi, at("adjoint_phi.csv"));
    save_field(arts.adjoint_psi, at("adjoint_psi.csv"));
    save_field(arts.state_phi_terminal, at("state_phi_terminal.csv"));
    save_field(arts.state_psi_terminal, at("state_psi_terminal.csv"));

    TimeGrid tgrid = cfg.make_time_grid();
    std::string rc = "level,t,r_phi,r_psi\n";
    for (std::size_t level = 0; level <= cfg.n_t; ++level) {
        rc += std::to_string(level);
        rc += ',';
        rc += format_g17(tgrid.time(level));
        rc += ',';
        rc += format_g17(rep.phi.radius_curve[level]);
        rc += ',';
        rc += format_g17(rep.psi.radius_curve[level]);
        rc += '\n';
    }
    write_text_atomic(at("radius_curves.csv"), rc);

    auto save_concentration = [&](const RadialField& state, const char* name) {
        ConcentrationProfile prof = concentration_profile(state);
        std::string out = "node,r,ball_volume,cumulative\n";
        const RadialGrid& grid = state.grid;
        for (std::size_t i = 0; i <= grid.n_cells(); ++i) {
            out += std::to_string(i);
            out += ',';
            out += format_g17(grid.node(i));
            out += ',';
            out += format_g17(grid.ball_volume(grid.node(i)));
            out += ',';
            out += format_g17(prof.node_cumulative[i]);
            out += '\n';
        }
        write_text_atomic(at(name), out);
    };
    save_concentration(arts.state_phi_terminal, "concentration_phi.csv");
    save_concentration(arts.state_psi_terminal, "concentration_psi.csv");
}

int run_counterexample_experiment(const RunConfig& cfg, const std::string& out_path,
                                  const std::string& profiles_dir) {
    CounterexampleArtifacts artifacts;
    CounterexampleReport rep = run_counterexample(cfg, profiles_dir.empty() ? nullptr : &artifacts);

    DecimatedCurve phi_curve = decimate(rep.phi.radius_curve);
    DecimatedCurve psi_curve = decimate(rep.psi.radius_curve);
    JsonWriter w;
    w.begin_object();
    w.key("config");
    write_config(w, cfg);
    w.field("volume", rep.volume).field("c_phi", rep.phi.multiplier).field("c_psi",
                                                                           rep.psi.multiplier);
    w.key("phi");
    write_cutoff_block(w, rep.phi);
    w.key("psi");
    write_cutoff_block(w, rep.psi);
    w.field_size("r_phi_curve_stride", phi_curve.stride)
        .field("r_phi_curve", phi_curve.points)
        .field_size("r_psi_curve_stride", psi_curve.stride)
        .field("r_psi_curve", psi_curve.points);
    w.key("cross_objectives")
        .begin_object()
        .field("J_phi_f_phi", rep.J_phi_on_f_phi)
        .field("J_phi_f_psi", rep.J_phi_on_f_psi)
        .field("J_psi_f_psi", rep.J_psi_on_f_psi)
        .field("J_psi_f_phi", rep.J_psi_on_f_phi)
        .end_object();
    w.field("margin_phi", rep.margin_phi)
        .field("margin_psi", rep.margin_psi)
        .field("control_distance", rep.control_distance)
        .field("max_duality_gap", rep.max_duality_gap)
        .field_size("separation_levels", rep.separation_levels)
        .field("min_radius_separation", rep.min_radius_separation)
        .end_object();
    emit(w.str(), out_path);

    if (!profiles_dir.empty()) save_profiles(profiles_dir, cfg, rep, artifacts);
    std::fprintf(stderr,
                 "counterexample: margins %.3e / %.3e, max duality gap %.3e, "
                 "terminal radii %.4f / %.4f\n",
                 rep.margin_phi, rep.margin_psi, rep.max_duality_gap, rep.phi.radius_terminal,
                 rep.psi.radius_terminal);
    return 0;
}

int run_sweep_experiment(const RunConfig& cfg, std::size_t samples, const std::string& candidate,
                         const std::string& out_path) {
    RadialGrid grid = cfg.make_grid();
    TimeGrid tgrid = cfg.make_time_grid();
    double volume = cfg.volume();

    SpaceTimeField cand;
    if (candidate == "narrow" || candidate == "wide" || candidate == "blend") {
        CutoffSpec narrow_spec = make_cutoff(cfg.R / 8.0, cfg.R / 4.0);
        CutoffSpec wide_spec = make_cutoff(cfg.R / 2.0, 3.0 * cfg.R / 4.0);
        if (candidate == "narrow") {
            cand = bathtub_optimize(sample_cutoff(narrow_spec, grid), tgrid, volume, cfg.scheme)
                       .control.f;
        } else if (candidate == "wide") {
            cand = bathtub_optimize(sample_cutoff(wide_spec, grid), tgrid, volume, cfg.scheme)
                       .control.f;
        } else {
            SpaceTimeField a =
                bathtub_optimize(sample_cutoff(narrow_spec, grid), tgrid, volume, cfg.scheme)
                    .control.f;
            SpaceTimeField b =
                bathtub_optimize(sample_cutoff(wide_spec, grid), tgrid, volume, cfg.scheme)
                    .control.f;
            for (std::size_t i = 0; i < a.values.size(); ++i)
                a.values[i] = 0.5 * (a.values[i] + b.values[i]);
            cand = make_admissible(std::move(a), volume).f;
        }
    } else {
        cand = load_spacetime_field(candidate);
        if (!cand.grid.same_as(grid) || !cand.tgrid.same_as(tgrid))
            throw DomainError("sweep: candidate file does not live on the configured grids");
        fit_volume(cand, volume);
        cand = make_admissible(std::move(cand), volume).f;
    }

    SweepReport rep = maximality_sweep(cand, cfg, samples);
    rep.candidate = candidate;

    JsonWriter w;
    w.begin_object();
    w.key("config");
    write_config(w, cfg);
    w.field("candidate", rep.candidate)
        .field("tolerance", rep.tolerance)
        .field("candidate_defeated", rep.candidate_defeated);
    w.key("witnesses").begin_array();
    for (const SweepWitness& wit : rep.witnesses) {
        w.begin_object()
            .field("name", wit.name)
            .field("margin", wit.margin)
            .field("worst_radius", wit.worst_radius)
            .field("failure", wit.failure)
            .end_object();
    }
    w.end_array().end_object();
    emit(w.str(), out_path);
    std::fprintf(stderr, "sweep: candidate '%s' %s over %zu witnesses\n", candidate.c_str(),
                 rep.candidate_defeated ? "DEFEATED" : "not defeated", rep.witnesses.size());
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"radial rearrangements, heat control, and concentration-order experiments"};
    app.name("talenti-lab");
    app.set_version_flag("--version", "talenti-lab 0.1.0");
    app.require_subcommand(1);

    std::string re_in, re_out;
    CLI::App* re = app.add_subcommand(
        "rearrange", "write the radially decreasing rearrangement of a field file");
    re->add_option("input", re_in, "field file, radial or space-time")
        ->required()
        ->check(CLI::ExistingFile);
    re->add_option("output", re_out, "destination file")->required();

    std::string cm_f, cm_g;
    double cm_tol = 1e-9;
    CLI::App* cm = app.add_subcommand(
        "compare", "test whether the first field precedes the second in the concentration order");
    cm->add_option("first", cm_f, "field file")->required()->check(CLI::ExistingFile);
    cm->add_option("second", cm_g, "field file")->required()->check(CLI::ExistingFile);
    cm->add_option("--tol", cm_tol, "slack allowed in the node comparisons");

    std::string so_src, so_scheme = "implicit-euler", so_out;
    CLI::App* so =
        app.add_subcommand("solve", "solve the Dirichlet heat problem for a space-time source");
    so->add_option("--source", so_src, "space-time source file")
        ->required()
        ->check(CLI::ExistingFile);
    so->add_option("--scheme", so_scheme, "implicit-euler or crank-nicolson");
    so->add_option("--out", so_out, "state output file")->required();

    std::string ad_term, ad_scheme = "implicit-euler", ad_out, ad_deriv;
    double ad_T = 1.0;
    std::size_t ad_nt = 256;
    CLI::App* ad = app.add_subcommand(
        "adjoint", "solve the backward heat problem for a radial terminal datum");
    ad->add_option("--terminal", ad_term, "radial terminal datum file")
        ->required()
        ->check(CLI::ExistingFile);
    ad->add_option("--T", ad_T, "time horizon");
    ad->add_option("--nt", ad_nt, "number of time steps");
    ad->add_option("--scheme", ad_scheme, "implicit-euler or crank-nicolson");
    ad->add_option("--out", ad_out, "adjoint output file")->required();
    ad->add_option("--derivative", ad_deriv, "also write the radial derivative here");

    std::string op_term, op_scheme = "implicit-euler", op_out, op_report;
    double op_T = 1.0, op_volume = 0.0;
    std::size_t op_nt = 256;
    CLI::App* op = app.add_subcommand(
        "optimize", "maximize the terminal pairing over volume-constrained sources");
    op->add_option("--terminal", op_term, "radial terminal datum file")
        ->required()
        ->check(CLI::ExistingFile);
    op->add_option("--volume", op_volume, "prescribed space-time source volume")->required();
    op->add_option("--T", op_T, "time horizon");
    op->add_option("--nt", op_nt, "number of time steps");
    op->add_option("--scheme", op_scheme, "implicit-euler or crank-nicolson");
    op->add_option("--out", op_out, "optimal control output file")->required();
    op->add_option("--report", op_report, "also write the JSON report here");

    CLI::App* ex = app.add_subcommand("experiment", "canned studies on the configured disk");
    ex->require_subcommand(1);

    ConfigFlags tl_cf;
    std::size_t tl_samples = 20;
    bool tl_refine = false;
    std::string tl_out;
    CLI::App* tl = ex->add_subcommand(
        "talenti", "check the parabolic comparison principle on random admissible sources");
    add_config_flags(tl, tl_cf);
    tl->add_option("--samples", tl_samples, "number of random sources");
    tl->add_flag("--refine", tl_refine, "rerun the first sample at doubled resolutions");
    tl->add_option("--out", tl_out, "also write the JSON report here");

    ConfigFlags cx_cf;
    std::string cx_out, cx_profiles;
    CLI::App* cx = ex->add_subcommand(
        "counterexample",
        "two-cutoff run showing no source is maximal for the concentration order");
    add_config_flags(cx, cx_cf);
    cx->add_option("--out", cx_out, "also write the JSON report here");
    cx->add_option("--profiles-dir", cx_profiles,
                   "directory for control, adjoint, state, and curve files");

    ConfigFlags sw_cf;
    std::size_t sw_samples = 6;
    std::string sw_candidate = "narrow", sw_out;
    CLI::App* sw = ex->add_subcommand(
        "sweep", "challenge a candidate control against optimal and random witnesses");
    add_config_flags(sw, sw_cf);
    sw->add_option("--samples", sw_samples,
                   "total witnesses, the two optimal cutoff controls included");
    sw->add_option("--candidate", sw_candidate, "narrow, wide, blend, or a control file path");
    sw->add_option("--out", sw_out, "also write the JSON report here");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("talenti-lab");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*re) return run_rearrange(re_in, re_out);
        if (*cm) return run_compare(cm_f, cm_g, cm_tol);
        if (*so) return run_solve(so_src, so_scheme, so_out);
        if (*ad) return run_adjoint(ad_term, ad_T, ad_nt, ad_scheme, ad_out, ad_deriv);
        if (*op) return run_optimize(op_term, op_T, op_nt, op_volume, op_scheme, op_out, op_report);
        if (*tl)
            return run_talenti_experiment(resolve_config(tl, tl_cf, RunConfig{}), tl_samples,
                                          tl_refine, tl_out);
        if (*cx)
            return run_counterexample_experiment(
                resolve_config(cx, cx_cf, counterexample_defaults()), cx_out, cx_profiles);
        if (*sw)
            return run_sweep_experiment(resolve_config(sw, sw_cf, RunConfig{}), sw_samples,
                                        sw_candidate, sw_out);
    } catch (const ContractError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}

}
