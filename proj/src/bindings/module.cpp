#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "talenti/control.hpp"
#include "talenti/errors.hpp"
#include "talenti/experiments.hpp"
#include "talenti/field_io.hpp"
#include "talenti/heat.hpp"
#include "talenti/quadrature.hpp"
#include "talenti/rearrangement.hpp"

namespace py = pybind11;
using namespace talenti;

PYBIND11_MODULE(_core, m) {
    m.doc() = "radial rearrangements, heat control, and concentration-order experiments";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_AssertionError);

    py::enum_<Scheme>(m, "Scheme")
        .value("implicit_euler", Scheme::implicit_euler)
        .value("crank_nicolson", Scheme::crank_nicolson);

    py::enum_<FieldKind>(m, "FieldKind")
        .value("control", FieldKind::control)
        .value("state", FieldKind::state)
        .value("adjoint", FieldKind::adjoint);

    py::class_<RadialGrid>(m, "RadialGrid")
        .def(py::init<double, std::size_t, std::size_t>(), py::arg("radius"), py::arg("dim"),
             py::arg("n_cells"))
        .def_property_readonly("radius", &RadialGrid::radius)
        .def_property_readonly("dim", &RadialGrid::dim)
        .def_property_readonly("n_cells", &RadialGrid::n_cells)
        .def_property_readonly("spacing", &RadialGrid::spacing)
        .def("cell_center", &RadialGrid::cell_center, py::arg("i"))
        .def("node", &RadialGrid::node, py::arg("i"))
        .def("cell_volume", &RadialGrid::cell_volume, py::arg("i"))
        .def("ball_volume", &RadialGrid::ball_volume, py::arg("r"))
        .def_property_readonly("domain_volume", &RadialGrid::domain_volume);

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init<double, std::size_t>(), py::arg("horizon"), py::arg("n_steps"))
        .def_property_readonly("horizon", &TimeGrid::horizon)
        .def_property_readonly("n_steps", &TimeGrid::n_steps)
        .def_property_readonly("dt", &TimeGrid::dt)
        .def("time", &TimeGrid::time, py::arg("level"));

    py::class_<RadialField>(m, "RadialField")
        .def(py::init([](const RadialGrid& g, std::vector<double> values, FieldKind kind) {
                 RadialField f = RadialField::zeros(g, kind);
                 if (!values.empty()) f.values = std::move(values);
                 validate(f, "RadialField");
                 return f;
             }),
             py::arg("grid"), py::arg("values") = std::vector<double>{},
             py::arg("kind") = FieldKind::state)
        .def_readonly("grid", &RadialField::grid)
        .def_readwrite("values", &RadialField::values)
        .def_readwrite("kind", &RadialField::kind)
        .def("sample", [](RadialField& f, const std::function<double(double)>& fn) {
            for (std::size_t i = 0; i < f.grid.n_cells(); ++i)
                f.values[i] = fn(f.grid.cell_center(i));
        });

    py::class_<SpaceTimeField>(m, "SpaceTimeField")
        .def(py::init([](const RadialGrid& g, const TimeGrid& t, std::vector<double> values,
                         FieldKind kind) {
                 SpaceTimeField f = SpaceTimeField::zeros(g, t, kind);
                 if (!values.empty()) f.values = std::move(values);
                 validate(f, "SpaceTimeField");
                 return f;
             }),
             py::arg("grid"), py::arg("tgrid"), py::arg("values") = std::vector<double>{},
             py::arg("kind") = FieldKind::control)
        .def_readonly("grid", &SpaceTimeField::grid)
        .def_readonly("tgrid", &SpaceTimeField::tgrid)
        .def_readwrite("values", &SpaceTimeField::values)
        .def_readwrite("kind", &SpaceTimeField::kind)
        .def("at", [](const SpaceTimeField& f, std::size_t level,
                      std::size_t cell) { return f.at(level, cell); })
        .def("slice", &SpaceTimeField::slice_field, py::arg("level"))
        .def("sample", [](SpaceTimeField& f, const std::function<double(double, double)>& fn) {
            for (std::size_t n = 0; n <= f.tgrid.n_steps(); ++n)
                for (std::size_t i = 0; i < f.grid.n_cells(); ++i)
                    f.at(n, i) = fn(f.tgrid.time(n), f.grid.cell_center(i));
        });

    m.def("load_radial_field", &load_radial_field, py::arg("path"));
    m.def("load_spacetime_field", &load_spacetime_field, py::arg("path"));
    m.def("save_field", py::overload_cast<const RadialField&, const std::string&>(&save_field),
          py::arg("field"), py::arg("path"));
    m.def("save_field", py::overload_cast<const SpaceTimeField&, const std::string&>(&save_field),
          py::arg("field"), py::arg("path"));

    m.def("integrate", py::overload_cast<const RadialField&>(&integrate_cells), py::arg("field"));
    m.def("integrate", &integrate_spacetime, py::arg("field"));
    m.def("inner_product",
          py::overload_cast<const RadialField&, const RadialField&>(&inner_product), py::arg("a"),
          py::arg("b"));

    m.def("rearrange", py::overload_cast<const RadialField&>(&schwarz_rearrange),
          py::arg("field"));
    m.def("rearrange", py::overload_cast<const SpaceTimeField&>(&schwarz_rearrange),
          py::arg("field"));

    py::class_<ConcentrationProfile>(m, "ConcentrationProfile")
        .def_readonly("node_cumulative", &ConcentrationProfile::node_cumulative)
        .def("at_volume", &ConcentrationProfile::at_volume, py::arg("volume"))
        .def("at_radius", &ConcentrationProfile::at_radius, py::arg("r"));
    m.def("concentration_profile", &concentration_profile, py::arg("field"));

    py::class_<DominanceResult>(m, "DominanceResult")
        .def_readonly("dominated", &DominanceResult::dominated)
        .def_readonly("margin", &DominanceResult::margin)
        .def("__repr__", [](const DominanceResult& r) {
            return "DominanceResult(dominated=" + std::string(r.dominated ? "True" : "False") +
                   ", margin=" + format_g17(r.margin) + ")";
        });
    m.def("dominates",
          py::overload_cast<const RadialField&, const RadialField&, double>(&dominates),
          py::arg("f"), py::arg("g"), py::arg("tol") = 1e-9);

    m.def("hardy_littlewood_gap", &hardy_littlewood_gap, py::arg("f"), py::arg("g"));
    m.def("polya_szego_gap", &polya_szego_gap, py::arg("f"));
    m.def("dirichlet_energy", &dirichlet_energy, py::arg("f"));

    py::class_<HeatSolution>(m, "HeatSolution")
        .def_readonly("u", &HeatSolution::u)
        .def_readonly("residual_norm", &HeatSolution::residual_norm);
    m.def("solve_heat", &solve_heat, py::arg("source"),
          py::arg("scheme") = Scheme::implicit_euler);

    py::class_<AdjointSolution>(m, "AdjointSolution")
        .def_readonly("p", &AdjointSolution::p)
        .def_readonly("terminal", &AdjointSolution::terminal)
        .def_readonly("radial_derivative", &AdjointSolution::radial_derivative);
    m.def("solve_adjoint", &solve_adjoint, py::arg("terminal"), py::arg("tgrid"),
          py::arg("scheme") = Scheme::implicit_euler);

    m.def("duality_gap", &duality_gap, py::arg("f"), py::arg("phi"));
    m.def("duality_defect", &duality_defect, py::arg("f"), py::arg("phi"));
    m.def("maximum_principle_check", &maximum_principle_check, py::arg("solution"));

    py::class_<AdmissibleControl>(m, "AdmissibleControl")
        .def_readonly("f", &AdmissibleControl::f)
        .def_readonly("volume", &AdmissibleControl::volume)
        .def_readonly("residual", &AdmissibleControl::residual);
    m.def("make_admissible", &make_admissible, py::arg("f"), py::arg("volume"));

    m.def("objective",
          py::overload_cast<const SpaceTimeField&, const RadialField&, Scheme>(&objective),
          py::arg("f"), py::arg("phi"), py::arg("scheme") = Scheme::implicit_euler);

    py::class_<BathtubSolution>(m, "BathtubSolution")
        .def_readonly("control", &BathtubSolution::control)
        .def_readonly("multiplier", &BathtubSolution::multiplier)
        .def_readonly("radius_curve", &BathtubSolution::radius_curve)
        .def_readonly("objective", &BathtubSolution::objective)
        .def_readonly("feasibility_residual", &BathtubSolution::feasibility_residual)
        .def_readonly("certificate_gap", &BathtubSolution::certificate_gap);
    m.def("bathtub_optimize",
          py::overload_cast<const AdjointSolution&, double>(&bathtub_optimize), py::arg("adjoint"),
          py::arg("volume"));
    m.def("bathtub_optimize",
          py::overload_cast<const RadialField&, const TimeGrid&, double, Scheme>(
              &bathtub_optimize),
          py::arg("terminal"), py::arg("tgrid"), py::arg("volume"),
          py::arg("scheme") = Scheme::implicit_euler);
    m.def("level_radius", &level_radius, py::arg("adjoint"), py::arg("t_index"), py::arg("c"));

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("R", &RunConfig::R)
        .def_readwrite("d", &RunConfig::d)
        .def_readwrite("T", &RunConfig::T)
        .def_readwrite("V0_fraction", &RunConfig::V0_fraction)
        .def_readwrite("n_r", &RunConfig::n_r)
        .def_readwrite("n_t", &RunConfig::n_t)
        .def_readwrite("scheme", &RunConfig::scheme)
        .def_readwrite("seed", &RunConfig::seed)
        .def("volume", &RunConfig::volume)
        .def("make_grid", &RunConfig::make_grid)
        .def("make_time_grid", &RunConfig::make_time_grid);
    m.def("counterexample_defaults", &counterexample_defaults);

    py::class_<CutoffSpec>(m, "CutoffSpec")
        .def_readonly("plateau_radius", &CutoffSpec::plateau_radius)
        .def_readonly("support_radius", &CutoffSpec::support_radius)
        .def("__call__", &CutoffSpec::operator(), py::arg("r"));
    m.def("make_cutoff", &make_cutoff, py::arg("plateau_radius"), py::arg("support_radius"));
    m.def("sample_cutoff", &sample_cutoff, py::arg("cutoff"), py::arg("grid"));
    m.def("talenti_tolerance", &talenti_tolerance, py::arg("grid"), py::arg("tgrid"));

    py::class_<TalentiCheckResult>(m, "TalentiCheckResult")
        .def_readonly("worst_margin", &TalentiCheckResult::worst_margin)
        .def_readonly("worst_level", &TalentiCheckResult::worst_level)
        .def_readonly("worst_radius", &TalentiCheckResult::worst_radius);
    m.def("verify_talenti", &verify_talenti, py::arg("f"),
          py::arg("scheme") = Scheme::implicit_euler);

    py::class_<StepApproximation>(m, "StepApproximation")
        .def_readonly("radii", &StepApproximation::radii)
        .def_readonly("alpha", &StepApproximation::alpha)
        .def_readonly("beta", &StepApproximation::beta);
    m.def("step_approximation", &step_approximation, py::arg("profile"), py::arg("R"),
          py::arg("k"));
    m.def(
        "step_approximation",
        [](const CutoffSpec& c, double R, std::size_t k) {
            return step_approximation([&c](double r) { return c(r); }, R, k);
        },
        py::arg("profile"), py::arg("R"), py::arg("k"));

    py::class_<CutoffOptimum>(m, "CutoffOptimum")
        .def_readonly("multiplier", &CutoffOptimum::multiplier)
        .def_readonly("objective", &CutoffOptimum::objective)
        .def_readonly("feasibility_residual", &CutoffOptimum::feasibility_residual)
        .def_readonly("certificate_gap", &CutoffOptimum::certificate_gap)
        .def_readonly("duality_gap", &CutoffOptimum::duality_gap_value)
        .def_readonly("radius_terminal", &CutoffOptimum::radius_terminal)
        .def_readonly("radius_preterminal", &CutoffOptimum::radius_preterminal)
        .def_readonly("radius_curve", &CutoffOptimum::radius_curve);

    py::class_<CounterexampleReport>(m, "CounterexampleReport")
        .def_readonly("volume", &CounterexampleReport::volume)
        .def_readonly("phi", &CounterexampleReport::phi)
        .def_readonly("psi", &CounterexampleReport::psi)
        .def_readonly("J_phi_on_f_phi", &CounterexampleReport::J_phi_on_f_phi)
        .def_readonly("J_phi_on_f_psi", &CounterexampleReport::J_phi_on_f_psi)
        .def_readonly("J_psi_on_f_psi", &CounterexampleReport::J_psi_on_f_psi)
        .def_readonly("J_psi_on_f_phi", &CounterexampleReport::J_psi_on_f_phi)
        .def_readonly("margin_phi", &CounterexampleReport::margin_phi)
        .def_readonly("margin_psi", &CounterexampleReport::margin_psi)
        .def_readonly("control_distance", &CounterexampleReport::control_distance)
        .def_readonly("max_duality_gap", &CounterexampleReport::max_duality_gap)
        .def_readonly("separation_levels", &CounterexampleReport::separation_levels)
        .def_readonly("min_radius_separation", &CounterexampleReport::min_radius_separation);
    m.def(
        "run_counterexample",
        [](const RunConfig& cfg) { return run_counterexample(cfg); }, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

    py::class_<SweepWitness>(m, "SweepWitness")
        .def_readonly("name", &SweepWitness::name)
        .def_readonly("margin", &SweepWitness::margin)
        .def_readonly("worst_radius", &SweepWitness::worst_radius)
        .def_readonly("failure", &SweepWitness::failure);
    py::class_<SweepReport>(m, "SweepReport")
        .def_readonly("tolerance", &SweepReport::tolerance)
        .def_readonly("witnesses", &SweepReport::witnesses)
        .def_readonly("candidate_defeated", &SweepReport::candidate_defeated);
    m.def("maximality_sweep", &maximality_sweep, py::arg("candidate"), py::arg("config"),
          py::arg("n_samples"), py::call_guard<py::gil_scoped_release>());

    m.def(
        "random_admissible",
        [](const RadialGrid& grid, const TimeGrid& tgrid, double volume, std::uint64_t seed,
           std::size_t flavor) {
            Xoshiro256ss rng(seed);
            return random_admissible(grid, tgrid, volume, rng, flavor);
        },
        py::arg("grid"), py::arg("tgrid"), py::arg("volume"), py::arg("seed"),
        py::arg("flavor") = 0);
}
