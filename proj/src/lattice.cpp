#include "popdyn/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "popdyn/errors.hpp"

namespace popdyn {

LatticeFunction::LatticeFunction(AgeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n() + 1) {
    throw InvalidArgument("lattice function: expected " +
                          std::to_string(grid_.n() + 1) + " values, got " +
                          std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("lattice function: non-finite value");
    }
  }
}

LatticeFunction::LatticeFunction(AgeGrid grid, double value)
    : LatticeFunction(grid, std::vector<double>(grid.n() + 1, value)) {}

double LatticeFunction::sup_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double interior_inner(std::span<const double> u, std::span<const double> v,
                      double h) {
  if (u.size() != v.size()) {
    throw InvalidArgument("interior_inner: length mismatch");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return h * s;
}

double discrete_l2_inner(const LatticeFunction& u, const LatticeFunction& v,
                         L2Range range) {
  if (!(u.grid() == v.grid())) {
    throw InvalidArgument("discrete_l2_inner: grid mismatch");
  }
  if (range == L2Range::interior) {
    return interior_inner(u.interior(), v.interior(), u.grid().h());
  }
  return interior_inner(u.values(), v.values(), u.grid().h());
}

double discrete_l2_norm(const LatticeFunction& u, L2Range range) {
  return std::sqrt(discrete_l2_inner(u, u, range));
}

std::vector<double> backward_diff(const LatticeFunction& u) {
  const auto& g = u.grid();
  std::vector<double> d(g.n());
  for (std::size_t k = 1; k <= g.n(); ++k) d[k - 1] = (u[k] - u[k - 1]) / g.h();
  return d;
}

std::vector<double> forward_diff(const LatticeFunction& u) {
  const auto& g = u.grid();
  std::vector<double> d(g.n());
  for (std::size_t k = 0; k < g.n(); ++k) d[k] = (u[k + 1] - u[k]) / g.h();
  return d;
}

}  // namespace popdyn
