#include "popdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "popdyn/errors.hpp"

namespace popdyn {

namespace {

void require_transformed(const PopulationState& st, const char* what) {
  if (st.units != Units::transformed) {
    throw InvalidState(std::string(what) + ": state must be in transformed units");
  }
}

double ratio_or_zero(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

double energy(const PopulationState& state) {
  require_transformed(state, "energy");
  double e = 0.0;
  for (Sex s : kSexes) {
    const auto& u = state.interior[s];
    e += interior_inner(u, u, state.grids[s].h());
  }
  return 0.5 * e;
}

double lyapunov(const PopulationState& state) {
  require_transformed(state, "lyapunov");
  double f = 0.0;
  for (Sex s : kSexes) {
    const auto& g = state.grids[s];
    const auto& u = state.interior[s];
    double acc = 0.0;
    for (std::size_t i = 1; i <= g.n(); ++i) {
      acc += (2.0 * g.a_dag() - g.node(i)) * u[i - 1] * u[i - 1];
    }
    f += g.h() * acc;
  }
  return f;
}

DecayReport decay_report(const MaternityModuli& maternity,
                         const SexPair<AgeGrid>& grids) {
  DecayReport r;
  const double a_max = std::max(grids.male.a_dag(), grids.female.a_dag());
  double worst_margin = std::numeric_limits<double>::infinity();
  for (Sex c : kSexes) {
    double cond = 0.0;
    for (Sex p : kSexes) {
      const double m = maternity(c, p).sup_abs();
      cond += grids[c].a_dag() * grids[p].a_dag() * m * m;
      r.beta0 += 2.0 * grids[p].a_dag() * m * m;
    }
    r.condition_value[c] = cond;
    worst_margin = std::min(worst_margin, 1.0 - 4.0 * cond);
  }
  r.condition_met =
      r.condition_value.male < 0.25 && r.condition_value.female < 0.25;
  r.alpha = worst_margin / (2.0 * a_max);
  r.C = 2.0 * a_max;
  return r;
}

EnergyDecayCheck verify_energy_decay(const Trajectory& trajectory,
                                     const DecayReport& report) {
  if (!report.condition_met) {
    throw NotApplicable("energy decay: maternity violates the 1/4 condition");
  }
  EnergyDecayCheck out;
  if (trajectory.states.empty()) return out;
  const double e0 = energy(trajectory.states.front());
  const double t0 = trajectory.states.front().time;
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const auto& st = trajectory.states[k];
    const double e = energy(st);
    const double bound =
        report.C * std::exp(-2.0 * report.alpha * (st.time - t0)) * e0;
    const double ratio = ratio_or_zero(e, bound);
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_step = k;
    }
  }
  out.passed = out.worst_ratio <= 1.0 + 1e-6;
  return out;
}

SeriesErrors series_errors(std::span<const double> simulated,
                           std::span<const double> reported) {
  if (simulated.size() != reported.size()) {
    throw InvalidArgument("error_norms: series lengths differ (" +
                          std::to_string(simulated.size()) + " vs " +
                          std::to_string(reported.size()) + ")");
  }
  SeriesErrors e;
  double r1 = 0.0, r2 = 0.0, rinf = 0.0;
  for (std::size_t j = 0; j < simulated.size(); ++j) {
    const double d = std::abs(simulated[j] - reported[j]);
    const double r = std::abs(reported[j]);
    e.l1 += d;
    e.l2 += d * d;
    e.linf = std::max(e.linf, d);
    r1 += r;
    r2 += r * r;
    rinf = std::max(rinf, r);
  }
  e.l2 = std::sqrt(e.l2);
  r2 = std::sqrt(r2);
  e.rel_l1 = ratio_or_zero(e.l1, r1);
  e.rel_l2 = ratio_or_zero(e.l2, r2);
  e.rel_linf = ratio_or_zero(e.linf, rinf);
  return e;
}

ErrorReport error_norms(const SexPair<std::vector<double>>& simulated,
                        const SexPair<std::vector<double>>& reported) {
  ErrorReport r;
  for (Sex s : kSexes) {
    r.errors[s] = series_errors(simulated[s], reported[s]);
    double ts = 0.0, tr = 0.0;
    for (double v : simulated[s]) ts += v;
    for (double v : reported[s]) tr += v;
    r.total_simulated[s] = ts;
    r.total_reported[s] = tr;
    r.rel_total[s] = ratio_or_zero(std::abs(ts - tr), std::abs(tr));
  }
  return r;
}

}  // namespace popdyn
