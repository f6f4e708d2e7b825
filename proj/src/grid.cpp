#include "popdyn/grid.hpp"

#include <cmath>
#include <string>

#include "popdyn/errors.hpp"

namespace popdyn {

namespace {

std::size_t integral_ratio(double total, double step, const char* what) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidArgument(std::string(what) + ": step must be positive");
  }
  const double ratio = total / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw InvalidArgument(std::string(what) + ": " + std::to_string(total) +
                          " is not an integer multiple of step " +
                          std::to_string(step));
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

AgeGrid::AgeGrid(double a_dag, std::size_t n) : a_dag_(a_dag), n_(n) {
  if (!(a_dag > 0.0) || !std::isfinite(a_dag)) {
    throw InvalidArgument("age grid: a_dag must be positive and finite");
  }
  if (n < 1) throw InvalidArgument("age grid: need at least one cell");
  h_ = a_dag / static_cast<double>(n);
}

double AgeGrid::node(std::size_t i) const {
  return a_dag_ * static_cast<double>(i) / static_cast<double>(n_);
}

std::vector<double> AgeGrid::nodes() const {
  std::vector<double> out(n_ + 1);
  for (std::size_t i = 0; i <= n_; ++i) out[i] = node(i);
  return out;
}

AgeGrid build_age_grid(double a_dag, std::size_t n) {
  if (n < 2) throw InvalidArgument("build_age_grid: n must be >= 2");
  return AgeGrid(a_dag, n);
}

AgeGrid age_grid_with_step(double a_dag, double h) {
  return build_age_grid(a_dag, integral_ratio(a_dag, h, "age grid"));
}

TimeGrid::TimeGrid(double horizon, std::size_t n_steps)
    : horizon_(horizon), n_steps_(n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("time grid: horizon must be positive and finite");
  }
  if (n_steps < 1) throw InvalidArgument("time grid: need at least one step");
  tau_ = horizon / static_cast<double>(n_steps);
}

double TimeGrid::time(std::size_t k) const {
  return horizon_ * static_cast<double>(k) / static_cast<double>(n_steps_);
}

TimeGrid time_grid_with_step(double horizon, double tau) {
  return TimeGrid(horizon, integral_ratio(horizon, tau, "time grid"));
}

}  // namespace popdyn
