#pragma once

#include <string>
#include <vector>

#include "popdyn/dataio.hpp"

namespace popdyn {

struct ScenarioInputs {
  SexPair<AnnualSeries> population;
  SexPair<AnnualSeries> life_table;  // qx
  AnnualSeries fertility;            // births per woman-year
  SexPair<AnnualSeries> migration;   // net immigrants per year
};

ScenarioInputs load_inputs(const ScenarioConfig& config);

/// Everything the stepper needs, in transformed units.
struct PreparedScenario {
  SexPair<AgeGrid> grids;
  SexPair<SurvivalCurve> survival;
  FertilityModuli fertility;
  MaternityModuli maternity;
  PopulationState initial;   // u(0) = p(0) / pi
  Eigen::VectorXd forcing;   // f = g / pi, constant in time
};

/// Grids from (a_dag, h), survival from the life tables (mortality beyond
/// the table held at its last rate), maternity pi_p beta[c][p], initial
/// density and migration reconstructed from the annual series.
PreparedScenario prepare_scenario(const ScenarioConfig& config,
                                  const ScenarioInputs& inputs);

struct ScenarioRun {
  PreparedScenario prepared;
  SchemeConfig scheme;
  std::vector<std::string> warnings;
  Trajectory trajectory;
  ResultBundle results;
};

/// load -> survival -> maternity -> transform -> assemble -> step ->
/// back-transform -> annual restriction. Nothing is written to disk.
ScenarioRun run_scenario(const ScenarioConfig& config,
                         StabilityPolicy policy = StabilityPolicy::warn);
ScenarioRun run_scenario(const ScenarioConfig& config,
                         const ScenarioInputs& inputs,
                         StabilityPolicy policy = StabilityPolicy::warn);

}  // namespace popdyn
