#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "popdyn/scheme.hpp"

namespace popdyn {

/// counts: persons per single-year age cell; rates: per person-year.
enum class SeriesKind { counts, rates };

/// Values for single-year ages 0..size()-1; value j covers [j, j+1).
struct AnnualSeries {
  Sex sex = Sex::female;
  SeriesKind kind = SeriesKind::counts;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double total() const;
};

/// Inclusive single-year age range [age_lo, age_hi] with a bin value.
struct GroupBin {
  int age_lo = 0;
  int age_hi = 0;
  double value = 0.0;
};

/// Grouped data: bin totals for counts, bin averages for rates.
struct GroupedSeries {
  Sex sex = Sex::female;
  SeriesKind kind = SeriesKind::counts;
  std::vector<GroupBin> bins;
};

/// Spreads every bin over its single-year ages: counts as total / width,
/// rates copied. Counts are rounded to multiples of 2^-20 with the last age
/// of each bin absorbing the remainder, so integer bin totals below 2^32 are
/// preserved exactly by any summation order.
AnnualSeries disaggregate(const GroupedSeries& grouped);

/// `sex,age,count` (single years) or `sex,age_lo,age_hi,count` (grouped,
/// disaggregated on load).
SexPair<AnnualSeries> load_population(const std::filesystem::path& path);
/// `sex,age,qx` with 0 <= qx < 1.
SexPair<AnnualSeries> load_life_table(const std::filesystem::path& path);
/// `age,rate`: births per woman-year by age of mother. Ages below the first
/// listed one are filled with zero.
AnnualSeries load_fertility(const std::filesystem::path& path);
/// `sex,age,net_per_year`: annual net immigrants per single-year age.
SexPair<AnnualSeries> load_migration(const std::filesystem::path& path);

/// Node values of a density whose integral over each cell [j, j+1) equals
/// the series value. The density is piecewise linear with breakpoints at
/// integer ages (neighbour-cell averages) and at cell midpoints (chosen to
/// preserve the cell integral), so lattices with h dividing 1/2 integrate
/// back to the series exactly. For non-negative data, integer-age
/// breakpoints are lowered where needed so the density stays non-negative
/// without giving up exact cell integrals.
/// Throws ExtrapolationError if the grid extends past the series.
LatticeFunction interpolate_to_grid(const AnnualSeries& series,
                                    const AgeGrid& grid);

/// Series padded with zeros (or truncated) to exactly `ages` entries.
AnnualSeries resized(const AnnualSeries& series, std::size_t ages);

/// Annual counts from a natural-units state: trapezoid integral of the
/// density over each cell [j, j+1), j < floor(a_dag). Requires 1/h integral.
SexPair<AnnualSeries> restrict_to_annual(const PopulationState& state);

/// Mother-age schedule on the female grid split by the sex ratio.
FertilityModuli fertility_from_schedule(const AnnualSeries& rate,
                                        const SexPair<AgeGrid>& grids,
                                        double sex_ratio);

struct ScenarioConfig {
  double a_dag_m = 110.0;
  double a_dag_f = 110.0;
  double h = 1.0 / 12.0;
  double tau = 1.0 / 12.0;
  double theta = 0.5;
  double horizon = 10.0;
  double sex_ratio = 1.05;
  int start_year = 0;
  std::filesystem::path population;
  std::filesystem::path life_table;
  std::filesystem::path fertility;
  std::filesystem::path migration;
  std::filesystem::path out_dir;

  /// Throws InvalidArgument on non-positive fields or theta outside [0,1].
  void validate() const;
};

/// INI-style key = value file. Relative paths resolve against the file's
/// directory. Numbers may be written as fractions, e.g. `h = 1/12`.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct AnnualSnapshot {
  double time = 0.0;
  int year = 0;
  SexPair<AnnualSeries> population;
};

/// Everything export_results writes.
struct ResultBundle {
  std::vector<AnnualSnapshot> snapshots;
  std::vector<StepDiagnostics> diagnostics;
};

/// Back-transforms the states at whole-year times and restricts them to
/// annual counts.
ResultBundle annual_snapshots(const Trajectory& trajectory,
                              const SexPair<SurvivalCurve>& survival,
                              int start_year);

/// Writes population_<year>.csv, pyramid_<year>.csv, diagnostics.csv and
/// summary.csv into out_dir. Files are staged in a sibling directory and
/// moved into place only after every write succeeded; other files already in
/// out_dir are left alone. Without snapshots only summary.csv is written.
void export_results(const ResultBundle& bundle,
                    const std::filesystem::path& out_dir);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

}  // namespace popdyn
