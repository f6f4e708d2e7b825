#pragma once

#include <cstddef>
#include <vector>

namespace popdyn {

/// Equidistant age lattice a_i = i*h, i = 0..n, on [0, a_dag].
class AgeGrid {
 public:
  AgeGrid() = default;
  AgeGrid(double a_dag, std::size_t n);

  double a_dag() const { return a_dag_; }
  std::size_t n() const { return n_; }
  double h() const { return h_; }

  /// Node a_i; evaluated as a_dag*i/n so that node(n) == a_dag exactly.
  double node(std::size_t i) const;
  std::vector<double> nodes() const;

  bool operator==(const AgeGrid& other) const {
    return a_dag_ == other.a_dag_ && n_ == other.n_;
  }

 private:
  double a_dag_ = 1.0;
  std::size_t n_ = 1;
  double h_ = 1.0;
};

/// Throws InvalidArgument unless a_dag > 0 (finite) and n >= 2.
AgeGrid build_age_grid(double a_dag, std::size_t n);

/// Builds the grid whose step is (approximately) h; a_dag/h must be an
/// integer up to a relative tolerance of 1e-9.
AgeGrid age_grid_with_step(double a_dag, double h);

/// Time lattice t_k = k*tau, k = 0..n_steps, tau = horizon/n_steps.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double horizon, std::size_t n_steps);

  double horizon() const { return horizon_; }
  std::size_t n_steps() const { return n_steps_; }
  double tau() const { return tau_; }
  double time(std::size_t k) const;

 private:
  double horizon_ = 0.0;
  std::size_t n_steps_ = 0;
  double tau_ = 0.0;
};

/// Time grid with step tau; horizon/tau must be integral (rel. tol. 1e-9).
TimeGrid time_grid_with_step(double horizon, double tau);

}  // namespace popdyn
