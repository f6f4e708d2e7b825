#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <optional>
#include <ostream>

#include "popdyn/errors.hpp"
#include "popdyn/pipeline.hpp"

namespace popdyn::cli {

namespace {

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, format);
  std::vsnprintf(buf, sizeof(buf), format, ap);
  va_end(ap);
  return buf;
}

struct ProjectArgs {
  std::string config;
  std::string out;
  std::optional<double> theta, tau, h;
};

struct ConvergenceArgs {
  std::size_t levels = 3;
  double theta = 1.0;
  bool time_only = false;
};

struct CompareArgs {
  std::string simulated;
  std::string reported;
};

int project(const ProjectArgs& a, std::ostream& out, std::ostream& err) {
  ScenarioConfig config = load_scenario_config(a.config);
  if (a.theta) config.theta = *a.theta;
  if (a.tau) config.tau = *a.tau;
  if (a.h) config.h = *a.h;
  if (!a.out.empty()) config.out_dir = a.out;
  if (config.out_dir.empty()) {
    throw InvalidArgument("no output directory: pass --out or set out_dir");
  }
  config.validate();

  const ScenarioRun run = run_scenario(config);
  out << fmt("omega0  = %.6g\n", run.scheme.omega0);
  if (run.scheme.tau_bar) {
    out << fmt("tau_bar = %.6g (= 1/%.6g)\n", *run.scheme.tau_bar,
               1.0 / *run.scheme.tau_bar);
  } else {
    out << "tau_bar = none (theta < 1/2)\n";
  }
  out << fmt("tau     = %.6g, h = %.6g, theta = %.6g, steps = %zu\n", config.tau,
             config.h, config.theta, run.trajectory.time_grid.n_steps());
  for (const auto& w : run.warnings) err << "warning: " << w << "\n";

  export_results(run.results, config.out_dir);

  out << fmt("\n%6s %16s %16s %16s\n", "year", "male", "female", "total");
  for (const auto& snap : run.results.snapshots) {
    const double m = snap.population.male.total();
    const double f = snap.population.female.total();
    out << fmt("%6d %16.1f %16.1f %16.1f\n", snap.year, m, f, m + f);
  }
  out << "\nresults written to " << config.out_dir.string() << "\n";
  return kOk;
}

int verify(const Hooks& hooks, std::ostream& out) {
  SuiteOptions opt;
  opt.assemble = hooks.assemble;
  const auto results = run_verification_suite(opt);
  bool ok = true;
  out << fmt("%-26s %-6s %9s  %s\n", "check", "result", "seconds", "detail");
  for (const auto& r : results) {
    out << fmt("%-26s %-6s %9.3f  ", r.name.c_str(), r.passed ? "PASS" : "FAIL",
               r.seconds)
        << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kVerificationFailure;
}

int convergence(const ConvergenceArgs& a, std::ostream& out) {
  const auto study = convergence_study(
      a.levels, a.theta, a.time_only ? RefinementMode::time_only : RefinementMode::joint);
  out << fmt("manufactured two-sex solution, theta = %g, %s refinement\n", a.theta,
             a.time_only ? "tau-only" : "joint (h, tau)");
  out << fmt("%5s %6s %7s %12s %12s %14s %14s %8s %7s\n", "level", "n", "steps", "h",
             "tau", "err(exact)", "diff(l,l+1)", "ratio", "order");
  for (std::size_t l = 0; l < study.levels.size(); ++l) {
    const auto& lv = study.levels[l];
    std::string diff = "", ratio = "", order = "";
    if (l < study.differences.size()) diff = fmt("%14.6e", study.differences[l]);
    if (l >= 1 && l - 1 < study.ratios.size()) {
      ratio = fmt("%8.3f", study.ratios[l - 1]);
      order = fmt("%7.3f", std::log2(study.ratios[l - 1]));
    }
    out << fmt("%5zu %6zu %7zu %12.6g %12.6g %14.6e %14s %8s %7s\n", l, lv.n_age,
               lv.n_steps, lv.h, lv.tau, lv.error_vs_exact, diff.c_str(),
               ratio.c_str(), order.c_str());
  }
  return kOk;
}

int compare(const CompareArgs& a, std::ostream& out) {
  const auto sim = load_population(a.simulated);
  const auto rep = load_population(a.reported);
  for (Sex s : kSexes) {
    if (sim[s].size() != rep[s].size()) {
      throw InvalidArgument(std::string("compare: age ranges differ for sex ") +
                            sex_label(s) + " (" + std::to_string(sim[s].size()) +
                            " vs " + std::to_string(rep[s].size()) + " ages)");
    }
  }
  const ErrorReport r = error_norms({sim.male.values, sim.female.values},
                                    {rep.male.values, rep.female.values});

  out << "Reported vs simulated totals\n";
  out << fmt("%-8s %16s %16s %12s\n", "sex", "reported", "simulated", "rel. error");
  for (Sex s : kSexes) {
    out << fmt("%-8s %16.1f %16.1f %11.2f%%\n", s == Sex::male ? "male" : "female",
               r.total_reported[s], r.total_simulated[s], 100.0 * r.rel_total[s]);
  }
  out << "\nErrors by single-year age\n";
  out << fmt("%-8s %14s %10s %14s %10s %14s %10s\n", "sex", "L1 abs", "L1 rel",
             "L2 abs", "L2 rel", "Linf abs", "Linf rel");
  for (Sex s : kSexes) {
    const auto& e = r.errors[s];
    out << fmt("%-8s %14.6g %9.2f%% %14.6g %9.2f%% %14.6g %9.2f%%\n",
               s == Sex::male ? "male" : "female", e.l1, 100.0 * e.rel_l1, e.l2,
               100.0 * e.rel_l2, e.linf, 100.0 * e.rel_linf);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, const Hooks& hooks) {
  CLI::App app{"Two-sex age-structured population projections"};
  app.name("popdyn");
  app.require_subcommand(1, 1);

  ProjectArgs pa;
  auto* project_cmd = app.add_subcommand("project", "Run a scenario and export results");
  project_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h/--h
  project_cmd->add_option("--config", pa.config, "Scenario INI file")->required();
  project_cmd->add_option("--out", pa.out, "Output directory (overrides out_dir)");
  project_cmd->add_option("--theta", pa.theta, "Implicitness parameter in [0, 1]");
  project_cmd->add_option("--tau", pa.tau, "Time step in years")->check(CLI::PositiveNumber);
  project_cmd->add_option("--h", pa.h, "Age step in years")->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "Run the discrete property checks");

  ConvergenceArgs ca;
  auto* conv_cmd = app.add_subcommand("convergence", "Self-convergence study");
  conv_cmd->add_option("--levels", ca.levels, "Number of refinements (>= 2)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{8}));
  conv_cmd->add_option("--theta", ca.theta, "Implicitness parameter")
      ->check(CLI::Range(0.0, 1.0));
  conv_cmd->add_flag("--time-only", ca.time_only,
                     "Keep a fine age grid and refine only the time step");

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Compare two population files");
  compare_cmd->add_option("--simulated", cmp.simulated, "sex,age,count CSV")->required();
  compare_cmd->add_option("--reported", cmp.reported, "sex,age,count CSV")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (project_cmd->parsed()) return project(pa, out, err);
    if (verify_cmd->parsed()) return verify(hooks, out);
    if (conv_cmd->parsed()) return convergence(ca, out);
    if (compare_cmd->parsed()) return compare(cmp, out);
  } catch (const FactorizationFailed& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace popdyn::cli
