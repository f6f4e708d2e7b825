#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "popdyn/errors.hpp"
#include "popdyn/pipeline.hpp"
#include "popdyn/verification.hpp"

namespace py = pybind11;
using namespace popdyn;

namespace {

Sex parse_sex(const std::string& s) {
  if (s == "m") return Sex::male;
  if (s == "f") return Sex::female;
  throw InvalidArgument("sex must be 'm' or 'f'");
}

SexPair<AgeGrid> grids_of(const py::tuple& t) {
  if (t.size() != 2) throw InvalidArgument("expected (male_grid, female_grid)");
  return {t[0].cast<AgeGrid>(), t[1].cast<AgeGrid>()};
}

MaternityModuli constant_maternity(const AgeGrid& male, const AgeGrid& female,
                                   double value) {
  return MaternityModuli::constant({male, female}, value);
}

py::dict series_dict(const SexPair<AnnualSeries>& s) {
  py::dict d;
  d["m"] = s.male.values;
  d["f"] = s.female.values;
  return d;
}

py::dict check_dict(const CheckResult& r) {
  py::dict d;
  d["name"] = r.name;
  d["passed"] = r.passed;
  d["detail"] = r.detail;
  d["seconds"] = r.seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_popdyn, m) {
  m.doc() = "Two-sex age-structured population model: theta scheme and data pipeline";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<InvalidState>(m, "InvalidState", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ExtrapolationError>(m, "ExtrapolationError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FactorizationFailed>(m, "FactorizationFailed", base.ptr());
  py::register_exception<NotApplicable>(m, "NotApplicable", base.ptr());

  py::class_<AgeGrid>(m, "AgeGrid")
      .def(py::init(&build_age_grid), py::arg("a_dag"), py::arg("n"))
      .def_property_readonly("a_dag", &AgeGrid::a_dag)
      .def_property_readonly("n", &AgeGrid::n)
      .def_property_readonly("h", &AgeGrid::h)
      .def("nodes", &AgeGrid::nodes)
      .def("__repr__", [](const AgeGrid& g) {
        return "AgeGrid(a_dag=" + format_number(g.a_dag()) +
               ", n=" + std::to_string(g.n()) + ")";
      });

  m.def("survival_from_life_table",
        [](const std::vector<double>& qx) {
          const auto s = survival_from_life_table(qx);
          return std::vector<double>(s.pi().values().begin(), s.pi().values().end());
        },
        py::arg("qx"), "Survival at ages 0..len(qx) from annual death probabilities.");

  m.def("generator_matrix",
        [](const AgeGrid& male, const AgeGrid& female, double maternity) {
          const auto ops = assemble_operators(constant_maternity(male, female, maternity),
                                              {male, female});
          return py::make_tuple(ops.a_block, Eigen::MatrixXd(ops.b_rows));
        },
        py::arg("male"), py::arg("female"), py::arg("maternity") = 0.0,
        "(A, B) for constant maternity; A as scipy.sparse CSR, B as a 2 x N array.");

  m.def("omega0",
        [](const AgeGrid& male, const AgeGrid& female, double maternity) {
          return omega0(constant_maternity(male, female, maternity), {male, female});
        },
        py::arg("male"), py::arg("female"), py::arg("maternity") = 0.0);
  m.def("stability_window", &stability_window, py::arg("theta"), py::arg("omega0"));

  m.def("project_constant",
        [](const AgeGrid& male, const AgeGrid& female, double maternity,
           const Eigen::VectorXd& u0, double theta, double tau, double horizon) {
          const SexPair<AgeGrid> grids{male, female};
          const auto ops = assemble_operators(constant_maternity(male, female, maternity), grids);
          if (static_cast<std::size_t>(u0.size()) != ops.size()) {
            throw InvalidArgument("u0 must have male.n + female.n entries");
          }
          PopulationState st = PopulationState::zeros(grids, Units::transformed);
          st.interior = split_interior(u0, grids);
          st.boundary.reset();
          const auto cfg = make_scheme_config(ops, theta, tau, StabilityPolicy::ignore);
          const auto traj = run_projection(st, zero_forcing(ops.size()), ops, cfg,
                                           time_grid_with_step(horizon, tau));
          Eigen::MatrixXd states(traj.states.size(), ops.size());
          std::vector<double> times, energies;
          for (std::size_t k = 0; k < traj.states.size(); ++k) {
            states.row(static_cast<Eigen::Index>(k)) = stack_interior(traj.states[k]).transpose();
            times.push_back(traj.diagnostics[k].time);
            energies.push_back(traj.diagnostics[k].energy);
          }
          py::dict d;
          d["t"] = times;
          d["u"] = states;
          d["energy"] = energies;
          return d;
        },
        py::arg("male"), py::arg("female"), py::arg("maternity"), py::arg("u0"),
        py::arg("theta") = 0.5, py::arg("tau") = 1.0 / 12.0, py::arg("horizon") = 1.0,
        "Theta-scheme run in transformed units with constant maternity and no forcing.");

  m.def("disaggregate",
        [](const std::vector<std::tuple<int, int, double>>& bins, const std::string& kind) {
          GroupedSeries g;
          if (kind == "counts") g.kind = SeriesKind::counts;
          else if (kind == "rates") g.kind = SeriesKind::rates;
          else throw InvalidArgument("kind must be 'counts' or 'rates'");
          for (const auto& [lo, hi, v] : bins) g.bins.push_back({lo, hi, v});
          return disaggregate(g).values;
        },
        py::arg("bins"), py::arg("kind") = "counts",
        "Single-year values from inclusive (age_lo, age_hi, value) bins.");

  m.def("interpolate_to_grid",
        [](const std::vector<double>& values, const AgeGrid& grid, const std::string& kind) {
          AnnualSeries s;
          s.kind = kind == "rates" ? SeriesKind::rates : SeriesKind::counts;
          s.values = values;
          const auto f = interpolate_to_grid(s, grid);
          return std::vector<double>(f.values().begin(), f.values().end());
        },
        py::arg("values"), py::arg("grid"), py::arg("kind") = "counts");

  m.def("load_population",
        [](const std::filesystem::path& p) { return series_dict(load_population(p)); },
        py::arg("path"));

  m.def("error_norms",
        [](const std::vector<double>& simulated, const std::vector<double>& reported) {
          const auto e = series_errors(simulated, reported);
          py::dict d;
          d["l1"] = e.l1;
          d["l2"] = e.l2;
          d["linf"] = e.linf;
          d["rel_l1"] = e.rel_l1;
          d["rel_l2"] = e.rel_l2;
          d["rel_linf"] = e.rel_linf;
          return d;
        },
        py::arg("simulated"), py::arg("reported"));

  m.def("run_scenario",
        [](const std::filesystem::path& config_path, py::object out_dir) {
          ScenarioConfig cfg = load_scenario_config(config_path);
          ScenarioRun run = [&] {
            py::gil_scoped_release release;
            return run_scenario(cfg);
          }();
          if (!out_dir.is_none()) {
            export_results(run.results, out_dir.cast<std::filesystem::path>());
          }
          py::dict d;
          d["omega0"] = run.scheme.omega0;
          d["tau_bar"] = run.scheme.tau_bar;
          d["warnings"] = run.warnings;
          py::list years;
          for (const auto& snap : run.results.snapshots) {
            py::dict y;
            y["year"] = snap.year;
            y["population"] = series_dict(snap.population);
            years.append(y);
          }
          d["years"] = years;
          return d;
        },
        py::arg("config"), py::arg("out_dir") = py::none(),
        "Runs a scenario INI; exports CSVs when out_dir is given.");

  m.def("verify",
        [](std::uint64_t seed) {
          SuiteOptions opt;
          opt.seed = seed;
          py::list out;
          std::vector<CheckResult> results;
          {
            py::gil_scoped_release release;
            results = run_verification_suite(opt);
          }
          for (const auto& r : results) out.append(check_dict(r));
          return out;
        },
        py::arg("seed") = SuiteOptions{}.seed);

  m.def("convergence_study",
        [](std::size_t refinements, double theta, bool time_only) {
          const auto s = convergence_study(
              refinements, theta, time_only ? RefinementMode::time_only : RefinementMode::joint);
          py::dict d;
          d["differences"] = s.differences;
          d["ratios"] = s.ratios;
          std::vector<double> errors;
          for (const auto& l : s.levels) errors.push_back(l.error_vs_exact);
          d["errors_vs_exact"] = errors;
          return d;
        },
        py::arg("refinements") = 3, py::arg("theta") = 1.0, py::arg("time_only") = false);
}
