#pragma once

#include <span>
#include <vector>

#include "popdyn/scheme.hpp"

namespace popdyn {

/// E = 1/2 sum_s h_s sum_{i>=1} u_{s,i}^2. Throws InvalidState for natural
/// units.
double energy(const PopulationState& state);

/// F = sum_s h_s sum_{i>=1} (2 a_dag_s - a_{s,i}) u_{s,i}^2.
double lyapunov(const PopulationState& state);

/// Constants of the exponential energy-decay estimate
/// E(t) <= C exp(-2 alpha t) E(0).
struct DecayReport {
  /// sum_p a_dag_c a_dag_p ||m[c][p]||_inf^2 for each child sex c.
  SexPair<double> condition_value{};
  bool condition_met = false;  // both values < 1/4
  double alpha = 0.0;          // min_c (1 - 4 condition_c) / (2 max a_dag)
  double C = 0.0;              // 2 max a_dag
  double beta0 = 0.0;          // sum_{c,p} 2 a_dag_p ||m[c][p]||_inf^2
};

DecayReport decay_report(const MaternityModuli& maternity,
                         const SexPair<AgeGrid>& grids);

struct EnergyDecayCheck {
  bool passed = true;
  /// max_k E(t_k) / (C exp(-2 alpha t_k) E(0)); <= 1 + 1e-6 means pass.
  double worst_ratio = 0.0;
  std::size_t worst_step = 0;
};

/// Checks E(t_k) <= C exp(-2 alpha t_k) E(0) (1 + 1e-6) along a trajectory
/// computed without forcing. Throws NotApplicable if the decay condition
/// is not met.
EnergyDecayCheck verify_energy_decay(const Trajectory& trajectory,
                                     const DecayReport& report);

struct SeriesErrors {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double rel_l1 = 0.0;
  double rel_l2 = 0.0;
  double rel_linf = 0.0;
};

/// Unweighted discrete norms of simulated - reported over single-year ages;
/// relative values divide by the same norm of the reported series.
SeriesErrors series_errors(std::span<const double> simulated,
                           std::span<const double> reported);

struct ErrorReport {
  SexPair<double> total_simulated{};
  SexPair<double> total_reported{};
  SexPair<double> rel_total{};  // |sim - rep| / rep of the totals
  SexPair<SeriesErrors> errors{};
};

ErrorReport error_norms(const SexPair<std::vector<double>>& simulated,
                        const SexPair<std::vector<double>>& reported);

}  // namespace popdyn
