#include "popdyn/pipeline.hpp"

#include <cmath>

#include "popdyn/errors.hpp"

namespace popdyn {

ScenarioInputs load_inputs(const ScenarioConfig& config) {
  return {load_population(config.population), load_life_table(config.life_table),
          load_fertility(config.fertility), load_migration(config.migration)};
}

namespace {

AnnualSeries padded_to(const AnnualSeries& s, const AgeGrid& grid) {
  const auto ages = static_cast<std::size_t>(std::ceil(grid.a_dag()));
  return s.size() < ages ? resized(s, ages) : s;
}

}  // namespace

PreparedScenario prepare_scenario(const ScenarioConfig& config,
                                  const ScenarioInputs& inputs) {
  config.validate();
  const SexPair<AgeGrid> grids{age_grid_with_step(config.a_dag_m, config.h),
                               age_grid_with_step(config.a_dag_f, config.h)};

  SexPair<SurvivalCurve> survival{
      resample_survival(survival_from_life_table(inputs.life_table.male.values),
                        grids.male),
      resample_survival(survival_from_life_table(inputs.life_table.female.values),
                        grids.female)};

  FertilityModuli fertility =
      fertility_from_schedule(inputs.fertility, grids, config.sex_ratio);
  MaternityModuli maternity = maternity_from_fertility(fertility, survival);

  SexPair<LatticeFunction> density{interpolate_to_grid(inputs.population.male, grids.male),
                                   interpolate_to_grid(inputs.population.female, grids.female)};
  PopulationState initial =
      to_transformed(PopulationState::from_lattice(density, Units::natural), survival);

  // Net migration g (persons per year of age per year) becomes f = g / pi.
  SexPair<std::vector<double>> forcing;
  for (Sex s : kSexes) {
    const LatticeFunction g =
        interpolate_to_grid(padded_to(inputs.migration[s], grids[s]), grids[s]);
    forcing[s].resize(grids[s].n());
    for (std::size_t i = 1; i <= grids[s].n(); ++i) {
      forcing[s][i - 1] = g[i] / survival[s][i];
    }
  }

  return {grids,
          std::move(survival),
          std::move(fertility),
          std::move(maternity),
          std::move(initial),
          stack_interior(forcing)};
}

ScenarioRun run_scenario(const ScenarioConfig& config, StabilityPolicy policy) {
  return run_scenario(config, load_inputs(config), policy);
}

ScenarioRun run_scenario(const ScenarioConfig& config,
                         const ScenarioInputs& inputs, StabilityPolicy policy) {
  PreparedScenario prepared = prepare_scenario(config, inputs);
  const DiscreteOperators ops = assemble_operators(prepared.maternity, prepared.grids);
  const SchemeConfig scheme = make_scheme_config(ops, config.theta, config.tau, policy);
  const StepperWorkspace ws = build_stepper(ops, scheme);
  const TimeGrid time_grid = time_grid_with_step(config.horizon, config.tau);

  Trajectory trajectory = run_projection(prepared.initial, constant_forcing(prepared.forcing),
                                         ops, ws, time_grid);
  ResultBundle results =
      annual_snapshots(trajectory, prepared.survival, config.start_year);
  return {std::move(prepared), scheme, ws.warnings(), std::move(trajectory),
          std::move(results)};
}

}  // namespace popdyn
