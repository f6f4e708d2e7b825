// Acceptance criteria: one PASS/FAIL line each. Run without arguments for
// all criteria or with criterion ids to select.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "popdyn/errors.hpp"
#include "popdyn/pipeline.hpp"
#include "popdyn/verification.hpp"

using namespace popdyn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string statement;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

Outcome from_check(const CheckResult& r) { return {r.passed, r.detail}; }

Outcome self_convergence() {
  constexpr double kJointMin = 1.8;
  constexpr double kTimeOnlyMin = 3.5;
  bool ok = true;
  std::ostringstream d;
  for (double theta : {1.0, 0.5}) {
    const auto s = convergence_study(3, theta, RefinementMode::joint);
    d << "joint theta=" << theta << " ratios";
    for (double r : s.ratios) {
      d << " " << fmt("%.3f", r);
      ok = ok && r >= kJointMin;
    }
    d << "; ";
  }
  const auto t = convergence_study(3, 0.5, RefinementMode::time_only);
  d << "tau-only theta=0.5 ratios";
  for (double r : t.ratios) {
    d << " " << fmt("%.3f", r);
    ok = ok && r >= kTimeOnlyMin;
  }
  return {ok, d.str()};
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    rows.push_back(f);
  }
  return rows;
}

Outcome pipeline_golden() {
  constexpr double kTotalsRelTol = 1e-9;
  const fs::path config = fs::path(POPDYN_FIXTURE_DIR) / "scenario.ini";
  const fs::path out = fs::temp_directory_path() / "popdyn_acceptance_golden";
  fs::remove_all(out);

  ScenarioConfig cfg = load_scenario_config(config);
  if (cfg.h != 1.0 / 12.0 || cfg.tau != 1.0 / 12.0 || cfg.theta != 0.5 ||
      cfg.a_dag_m != 110.0 || cfg.a_dag_f != 110.0 || cfg.horizon != 10.0) {
    return {false, "fixture scenario does not match h = tau = 1/12, a_dag = 110, theta = 1/2, T = 10"};
  }
  const auto run = run_scenario(cfg);
  export_results(run.results, out);

  std::vector<std::string> expected = {"summary.csv", "diagnostics.csv"};
  for (int y = cfg.start_year; y <= cfg.start_year + 10; ++y) {
    expected.push_back("population_" + std::to_string(y) + ".csv");
    expected.push_back("pyramid_" + std::to_string(y) + ".csv");
  }
  std::size_t present = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    (void)e;
    ++present;
  }
  for (const auto& f : expected) {
    if (!fs::exists(out / f)) return {false, "missing " + f};
  }
  if (present != expected.size()) {
    return {false, "unexpected extra files in output (" + std::to_string(present) + ")"};
  }
  const auto diag = read_rows(out / "diagnostics.csv");
  if (diag.size() != 121) return {false, "diagnostics.csv has wrong row count"};

  double worst = 0.0;
  for (const auto& row : read_rows(out / "summary.csv")) {
    const std::string year = row.at(0);
    double m = 0.0, f = 0.0;
    for (const auto& p : read_rows(out / ("population_" + year + ".csv"))) {
      (p.at(0) == "m" ? m : f) += std::stod(p.at(2));
    }
    const double sm = std::stod(row.at(1)), sf = std::stod(row.at(2)), st = std::stod(row.at(3));
    worst = std::max({worst, std::abs(sm - m) / std::abs(m), std::abs(sf - f) / std::abs(f),
                      std::abs(st - (m + f)) / std::abs(m + f)});
    double pm = 0.0, pf = 0.0;
    for (const auto& p : read_rows(out / ("pyramid_" + year + ".csv"))) {
      pm -= std::stod(p.at(1));
      pf += std::stod(p.at(2));
    }
    worst = std::max({worst, std::abs(pm - m) / std::abs(m), std::abs(pf - f) / std::abs(f)});
  }

  const auto final_pop = out / ("population_" + std::to_string(cfg.start_year + 10) + ".csv");
  const auto sim = load_population(final_pop);
  const auto rep = error_norms({sim.male.values, sim.female.values},
                               {sim.male.values, sim.female.values});
  double max_err = 0.0;
  for (Sex s : kSexes) {
    const auto& e = rep.errors[s];
    max_err = std::max({max_err, rep.rel_total[s], e.l1, e.l2, e.linf, e.rel_l1, e.rel_l2,
                        e.rel_linf});
  }
  fs::remove_all(out);
  const bool ok = worst <= kTotalsRelTol && max_err == 0.0;
  return {ok, std::to_string(expected.size()) + " files" +
                  fmt(", max summary/per-year rel. gap %.2e, compare(sim, sim) max error %g",
                      worst, max_err)};
}

Outcome disaggregate_exact() {
  std::mt19937_64 rng(20140901);
  std::uniform_int_distribution<int> width(1, 15);
  std::uniform_int_distribution<long> count(0, 50000000);
  std::size_t trials = 0, drift = 0;
  for (; trials < 2000; ++trials) {
    GroupedSeries g;
    int lo = 0;
    double bin_sum = 0.0;
    const int bins = 1 + static_cast<int>(trials % 30);
    for (int b = 0; b < bins; ++b) {
      const int w = width(rng);
      g.bins.push_back({lo, lo + w - 1, static_cast<double>(count(rng))});
      bin_sum += g.bins.back().value;
      lo += w;
    }
    const auto a = disaggregate(g);
    double annual_sum = 0.0;
    for (double v : a.values) annual_sum += v;
    if (annual_sum != bin_sum) ++drift;
  }
  return {drift == 0, std::to_string(trials) + " random integer series, " + std::to_string(drift) +
                          " with nonzero drift"};
}

std::vector<Criterion> criteria() {
  static const SuiteOptions opt;  // 1000 SBP pairs, 100 states, 1000 (m,u), 20 sets, 500 states
  return {
      {"sbp", "summation by parts <= 1e-12 relative, 1000 pairs, n in 3..64", 1.0,
       [] { return from_check(check_summation_by_parts(opt)); }},
      {"matrix", "assembled A, B equal direct formulas <= 1e-13 relative, 100 states", 1.0,
       [] { return from_check(check_matrix_equivalence(opt)); }},
      {"dissipativity", "<A u, u> <= omega0 ||u||^2 (1e-10 rel.), 1000 random (m, u)", 5.0,
       [] { return from_check(check_dissipativity(opt)); }},
      {"stability", "||u(t_k)|| <= sqrt(2)(1+4 tau)e^{4T}||u0||, theta in {1/2,1}, tau = tau_bar/2, T = 2",
       10.0, [] { return from_check(check_stability_bound(opt)); }},
      {"energy_decay", "E(t) <= 2 max(a_dag) e^{-2 alpha t} E(0) (1 + 1e-6), 20 maternity sets, T = 5 max(a_dag)",
       30.0, [] { return from_check(check_energy_decay(opt)); }},
      {"convergence", "joint refinement ratios >= 1.8, theta = 1/2 tau-only ratios >= 3.5", 60.0,
       self_convergence},
      {"sandwich", "0 <= E <= F <= 2 max(a_dag) E on 500 random states (1e-12 slack)", 60.0,
       [] { return from_check(check_energy_sandwich(opt)); }},
      {"pipeline", "synthetic 10-year run: full file set, totals consistent to 1e-9, compare(sim, sim) = 0",
       60.0, pipeline_golden},
      {"disaggregate", "grouped integer totals preserved exactly", 5.0, disaggregate_exact},
  };
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0, ran = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) {
      continue;
    }
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool passed = o.passed && in_time;
    std::printf("%s %s: %s [%s; %.2f s of %.0f s]\n", passed ? "PASS" : "FAIL", c.id.c_str(),
                c.statement.c_str(), o.detail.c_str(), secs, c.time_limit_s);
    if (!passed) ++failures;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matched\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
