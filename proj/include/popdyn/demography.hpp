#pragma once

#include <span>

#include "popdyn/lattice.hpp"

namespace popdyn {

/// Lower clamp for survival probabilities so that u = p / pi stays finite
/// near the maximal age.
inline constexpr double kDefaultSurvivalFloor = 1e-12;

/// Age-specific mortality rate mu (1/year) on the lattice nodes.
class MortalityCurve {
 public:
  /// Throws InvalidArgument if any rate is negative.
  explicit MortalityCurve(LatticeFunction mu);

  const AgeGrid& grid() const { return mu_.grid(); }
  const LatticeFunction& mu() const { return mu_; }

 private:
  LatticeFunction mu_;
};

/// Survival probability pi on the lattice: pi[0] == 1, non-increasing,
/// bounded below by a positive floor.
class SurvivalCurve {
 public:
  explicit SurvivalCurve(LatticeFunction pi,
                         double floor = kDefaultSurvivalFloor);

  const AgeGrid& grid() const { return pi_.grid(); }
  const LatticeFunction& pi() const { return pi_; }
  double operator[](std::size_t i) const { return pi_[i]; }
  double floor() const { return floor_; }

 private:
  LatticeFunction pi_;
  double floor_;
};

/// pi_i = exp(-Q_i), Q the cumulative trapezoid integral of mu.
SurvivalCurve survival_from_mortality(const MortalityCurve& mu,
                                      double floor = kDefaultSurvivalFloor);

/// Survival at exact ages 0..K from annual death probabilities qx
/// (x = 0..K-1) as the running product of (1 - qx).
SurvivalCurve survival_from_life_table(std::span<const double> qx,
                                       double floor = kDefaultSurvivalFloor);

/// Resamples a survival curve onto another grid by linear interpolation of
/// log(pi), i.e. piecewise-constant mortality. Past the last source node the
/// last segment's mortality rate is held constant.
SurvivalCurve resample_survival(const SurvivalCurve& source,
                                const AgeGrid& target,
                                double floor = kDefaultSurvivalFloor);

/// Four age-indexed kernels k[child][parent], each on the parent sex's grid.
using SexKernel = SexPair<SexPair<LatticeFunction>>;

/// Fertility moduli beta[child][parent] (children per parent-person-year)
/// and the sex ratio at birth s.
class FertilityModuli {
 public:
  FertilityModuli(SexKernel beta, double sex_ratio);

  /// Splits a mother-age birth-rate schedule by sex of child:
  /// beta[m][f] = s/(1+s) * rate, beta[f][f] = 1/(1+s) * rate, and the
  /// father-indexed moduli vanish.
  static FertilityModuli from_mother_schedule(const LatticeFunction& rate,
                                              const AgeGrid& male_grid,
                                              double sex_ratio);

  const LatticeFunction& operator()(Sex child, Sex parent) const {
    return beta_[child][parent];
  }
  const SexKernel& kernel() const { return beta_; }
  double sex_ratio() const { return sex_ratio_; }

 private:
  SexKernel beta_;
  double sex_ratio_;
};

/// Maternity functions m[child][parent] = pi_parent * beta[child][parent].
class MaternityModuli {
 public:
  /// Validates grids (kernel [c][p] lives on grids[p]) and non-negativity.
  MaternityModuli(SexKernel m, SexPair<AgeGrid> grids);

  static MaternityModuli zero(const SexPair<AgeGrid>& grids);
  static MaternityModuli constant(const SexPair<AgeGrid>& grids, double value);

  const LatticeFunction& operator()(Sex child, Sex parent) const {
    return m_[child][parent];
  }
  const SexKernel& kernel() const { return m_; }
  const SexPair<AgeGrid>& grids() const { return grids_; }

  /// M: largest lattice value over all four kernels.
  double sup_norm() const;

 private:
  SexKernel m_;
  SexPair<AgeGrid> grids_;
};

MaternityModuli maternity_from_fertility(const FertilityModuli& beta,
                                         const SexPair<SurvivalCurve>& pi);

}  // namespace popdyn
