#pragma once

#include <optional>
#include <vector>

#include "popdyn/demography.hpp"

namespace popdyn {

/// natural: population density p (persons per year of age);
/// transformed: u = p / pi.
enum class Units { natural, transformed };

/// Population at one instant: interior nodes 1..n per sex plus the age-0
/// boundary value.
struct PopulationState {
  double time = 0.0;
  Units units = Units::natural;
  SexPair<AgeGrid> grids;
  SexPair<std::vector<double>> interior;
  std::optional<SexPair<double>> boundary;

  /// Throws InvalidArgument if lengths disagree with the grids or a value is
  /// not finite.
  void validate() const;

  /// Full lattice function (node 0 from the boundary, zero if absent).
  LatticeFunction lattice(Sex s) const;

  static PopulationState zeros(const SexPair<AgeGrid>& grids, Units units,
                               double time = 0.0);
  /// Builds from full lattice functions (node 0 becomes the boundary).
  static PopulationState from_lattice(const SexPair<LatticeFunction>& f,
                                      Units units, double time = 0.0);
};

/// u = p / pi node-wise. Throws InvalidState if already transformed.
PopulationState to_transformed(const PopulationState& p,
                               const SexPair<SurvivalCurve>& pi);

/// p = pi * u node-wise. Throws InvalidState if already natural.
PopulationState from_transformed(const PopulationState& u,
                                 const SexPair<SurvivalCurve>& pi);

}  // namespace popdyn
