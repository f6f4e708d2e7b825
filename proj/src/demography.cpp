#include "popdyn/demography.hpp"

#include <algorithm>
#include <cmath>

#include "popdyn/errors.hpp"

namespace popdyn {

MortalityCurve::MortalityCurve(LatticeFunction mu) : mu_(std::move(mu)) {
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    if (mu_[i] < 0.0) {
      throw InvalidArgument("mortality: negative rate at node " +
                            std::to_string(i));
    }
  }
}

SurvivalCurve::SurvivalCurve(LatticeFunction pi, double floor)
    : pi_(std::move(pi)), floor_(floor) {
  if (!(floor > 0.0)) throw InvalidArgument("survival: floor must be positive");
  if (pi_[0] != 1.0) throw InvalidArgument("survival: pi(0) must equal 1");
  for (std::size_t i = 0; i < pi_.size(); ++i) {
    if (pi_[i] < floor_ || pi_[i] > 1.0) {
      throw InvalidArgument("survival: pi out of [floor, 1] at node " +
                            std::to_string(i));
    }
    if (i > 0 && pi_[i] > pi_[i - 1]) {
      throw InvalidArgument("survival: pi increases at node " +
                            std::to_string(i));
    }
  }
}

SurvivalCurve survival_from_mortality(const MortalityCurve& mu, double floor) {
  const auto& g = mu.grid();
  const auto& m = mu.mu();
  std::vector<double> pi(g.n() + 1);
  double cumulative = 0.0;
  pi[0] = 1.0;
  for (std::size_t i = 1; i <= g.n(); ++i) {
    cumulative += 0.5 * g.h() * (m[i - 1] + m[i]);
    pi[i] = std::max(std::exp(-cumulative), floor);
  }
  return SurvivalCurve(LatticeFunction(g, std::move(pi)), floor);
}

SurvivalCurve survival_from_life_table(std::span<const double> qx,
                                       double floor) {
  if (qx.empty()) throw InvalidArgument("life table: no ages");
  std::vector<double> pi(qx.size() + 1);
  pi[0] = 1.0;
  for (std::size_t j = 0; j < qx.size(); ++j) {
    if (!(qx[j] >= 0.0 && qx[j] < 1.0)) {
      throw InvalidArgument("life table: qx outside [0,1) at age " +
                            std::to_string(j));
    }
    pi[j + 1] = std::max(pi[j] * (1.0 - qx[j]), floor);
  }
  const AgeGrid grid(static_cast<double>(qx.size()), qx.size());
  return SurvivalCurve(LatticeFunction(grid, std::move(pi)), floor);
}

SurvivalCurve resample_survival(const SurvivalCurve& source,
                                const AgeGrid& target, double floor) {
  const auto& sg = source.grid();
  const std::size_t n = sg.n();
  std::vector<double> log_pi(n + 1);
  for (std::size_t i = 0; i <= n; ++i) log_pi[i] = std::log(source[i]);
  const double tail_slope = (log_pi[n] - log_pi[n - 1]) / sg.h();

  std::vector<double> pi(target.n() + 1);
  pi[0] = 1.0;
  for (std::size_t i = 1; i <= target.n(); ++i) {
    const double a = target.node(i);
    double lp;
    if (a >= sg.a_dag()) {
      lp = log_pi[n] + tail_slope * (a - sg.a_dag());
    } else {
      const double x = a / sg.h();
      const auto j = std::min(static_cast<std::size_t>(x), n - 1);
      const double w = x - static_cast<double>(j);
      lp = (1.0 - w) * log_pi[j] + w * log_pi[j + 1];
    }
    // Keep monotone against rounding in the interpolation weights.
    pi[i] = std::clamp(std::exp(lp), floor, pi[i - 1]);
  }
  return SurvivalCurve(LatticeFunction(target, std::move(pi)), floor);
}

FertilityModuli::FertilityModuli(SexKernel beta, double sex_ratio)
    : beta_(std::move(beta)), sex_ratio_(sex_ratio) {
  if (!(sex_ratio > 0.0) || !std::isfinite(sex_ratio)) {
    throw InvalidArgument("fertility: sex ratio must be positive");
  }
  for (Sex c : kSexes) {
    for (Sex p : kSexes) {
      const auto& f = beta_[c][p];
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0.0) throw InvalidArgument("fertility: negative modulus");
      }
    }
  }
}

FertilityModuli FertilityModuli::from_mother_schedule(
    const LatticeFunction& rate, const AgeGrid& male_grid, double sex_ratio) {
  if (!(sex_ratio > 0.0)) {
    throw InvalidArgument("fertility: sex ratio must be positive");
  }
  const double boys = sex_ratio / (1.0 + sex_ratio);
  const double girls = 1.0 / (1.0 + sex_ratio);
  std::vector<double> b(rate.size()), g(rate.size());
  for (std::size_t i = 0; i < rate.size(); ++i) {
    b[i] = boys * rate[i];
    g[i] = girls * rate[i];
  }
  SexKernel k;
  k.male.male = LatticeFunction(male_grid, 0.0);
  k.male.female = LatticeFunction(rate.grid(), std::move(b));
  k.female.male = LatticeFunction(male_grid, 0.0);
  k.female.female = LatticeFunction(rate.grid(), std::move(g));
  return FertilityModuli(std::move(k), sex_ratio);
}

MaternityModuli::MaternityModuli(SexKernel m, SexPair<AgeGrid> grids)
    : m_(std::move(m)), grids_(grids) {
  for (Sex c : kSexes) {
    for (Sex p : kSexes) {
      const auto& f = m_[c][p];
      if (!(f.grid() == grids_[p])) {
        throw InvalidArgument(
            std::string("maternity: kernel [") + sex_label(c) + "][" +
            sex_label(p) + "] is not on the parent grid");
      }
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0.0) throw InvalidArgument("maternity: negative value");
      }
    }
  }
}

MaternityModuli MaternityModuli::constant(const SexPair<AgeGrid>& grids,
                                          double value) {
  SexKernel k;
  for (Sex c : kSexes) {
    for (Sex p : kSexes) k[c][p] = LatticeFunction(grids[p], value);
  }
  return MaternityModuli(std::move(k), grids);
}

MaternityModuli MaternityModuli::zero(const SexPair<AgeGrid>& grids) {
  return constant(grids, 0.0);
}

double MaternityModuli::sup_norm() const {
  double m = 0.0;
  for (Sex c : kSexes) {
    for (Sex p : kSexes) m = std::max(m, m_[c][p].sup_abs());
  }
  return m;
}

MaternityModuli maternity_from_fertility(const FertilityModuli& beta,
                                         const SexPair<SurvivalCurve>& pi) {
  SexKernel k;
  SexPair<AgeGrid> grids{pi.male.grid(), pi.female.grid()};
  for (Sex c : kSexes) {
    for (Sex p : kSexes) {
      const auto& b = beta(c, p);
      if (!(b.grid() == grids[p])) {
        throw InvalidArgument("maternity_from_fertility: grid mismatch");
      }
      std::vector<double> v(b.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = pi[p][i] * b[i];
      k[c][p] = LatticeFunction(grids[p], std::move(v));
    }
  }
  return MaternityModuli(std::move(k), grids);
}

}  // namespace popdyn
