#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "popdyn/demography.hpp"
#include "popdyn/state.hpp"

namespace popdyn {

// Interior unknowns are stacked as vec(u) = (u_m,1..u_m,Nm, u_f,1..u_f,Nf).

/// Discrete transport generator A and birth operator B in matrix form.
///
///   [A u]_{c,1} = -(u_{c,1} - B_c u) / h_c
///   [A u]_{c,i} = -(u_{c,i} - u_{c,i-1}) / h_c,   i = 2..N_c
///   B_c u       = sum_p h_p sum_i m[c][p](a_{p,i}) u_{p,i}
struct DiscreteOperators {
  SexPair<AgeGrid> grids;
  MaternityModuli maternity;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a_block;
  Eigen::Matrix<double, 2, Eigen::Dynamic> b_rows;

  std::size_t size() const { return grids.male.n() + grids.female.n(); }
  std::size_t offset(Sex s) const {
    return s == Sex::male ? 0 : grids.male.n();
  }
};

DiscreteOperators assemble_operators(const MaternityModuli& maternity,
                                     const SexPair<AgeGrid>& grids);

Eigen::VectorXd stack_interior(const SexPair<std::vector<double>>& interior);
Eigen::VectorXd stack_interior(const PopulationState& state);
SexPair<std::vector<double>> split_interior(const Eigen::VectorXd& v,
                                            const SexPair<AgeGrid>& grids);

/// omega0 = max{a_dag_m, a_dag_f, M^2 / 2}, M the lattice sup of m.
double omega0(const MaternityModuli& maternity, const SexPair<AgeGrid>& grids);

/// tau_bar = 1 / (2 theta omega0); empty when theta < 1/2.
std::optional<double> stability_window(double theta, double omega0);

struct DissipativityReport {
  double lhs = 0.0;  // <A u, u> in the interior lattice inner product
  double rhs = 0.0;  // omega0 * ||u||^2
  bool holds = true;
};

DissipativityReport dissipativity_check(const DiscreteOperators& ops,
                                        const Eigen::VectorXd& u);

enum class StabilityPolicy { warn, enforce, ignore };

struct SchemeConfig {
  double theta = 0.5;
  double tau = 1.0 / 12.0;
  StabilityPolicy policy = StabilityPolicy::warn;
  double omega0 = 0.0;
  std::optional<double> tau_bar;
};

/// Validates theta in [0,1], tau > 0 and fills omega0 / tau_bar from ops.
SchemeConfig make_scheme_config(const DiscreteOperators& ops, double theta,
                                double tau,
                                StabilityPolicy policy = StabilityPolicy::warn);

enum class SolverKind { bordered, dense };

/// Factorized H1 = (1/tau) I - theta A, reused for every step.
///
/// The bordered solver writes H1 = T - U B, with T block lower bidiagonal
/// and U holding theta/h_c in the first row of each sex block, and applies
/// the Woodbury identity with a 2x2 capacitance matrix.
class StepperWorkspace {
 public:
  double tau() const { return tau_; }
  double theta() const { return theta_; }
  SolverKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// x = H1^{-1} rhs
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  /// H2 u = u / tau + (1 - theta) A u
  Eigen::VectorXd apply_h2(const Eigen::VectorXd& u) const;

 private:
  friend StepperWorkspace build_stepper(const DiscreteOperators&,
                                        const SchemeConfig&, SolverKind);

  void forward_solve(Eigen::Ref<Eigen::VectorXd> x) const;

  double tau_ = 0.0;
  double theta_ = 0.0;
  SolverKind kind_ = SolverKind::bordered;
  std::size_t size_ = 0;
  std::vector<std::string> warnings_;

  Eigen::SparseMatrix<double, Eigen::RowMajor> a_;
  Eigen::Matrix<double, 2, Eigen::Dynamic> b_;
  SexPair<double> diag_{};
  SexPair<double> sub_{};
  std::size_t n_male_ = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> z_;
  Eigen::Matrix2d capacitance_inv_;
  Eigen::FullPivLU<Eigen::MatrixXd> dense_lu_;
};

/// Throws FactorizationFailed if H1 is singular, InvalidArgument if the
/// policy is enforce and tau >= tau_bar.
StepperWorkspace build_stepper(const DiscreteOperators& ops,
                               const SchemeConfig& config,
                               SolverKind kind = SolverKind::bordered);

struct StepResult {
  Eigen::VectorXd interior;
  SexPair<double> boundary;
};

/// Solves (1/tau - theta A) u_next = (1/tau + (1-theta) A) u_prev
///   + theta f_next + (1 - theta) f_prev, then boundary = B u_next.
StepResult theta_step(const StepperWorkspace& ws, const DiscreteOperators& ops,
                      const Eigen::VectorXd& u_prev,
                      const Eigen::VectorXd& f_prev,
                      const Eigen::VectorXd& f_next);

/// Interior forcing f(t_k) in transformed units, stacked like vec(u).
using ForcingFn = std::function<Eigen::VectorXd(std::size_t k, double t)>;

ForcingFn zero_forcing(std::size_t size);
ForcingFn constant_forcing(Eigen::VectorXd f);

struct StepDiagnostics {
  double time = 0.0;
  double energy = 0.0;
  SexPair<double> boundary{};
};

struct Trajectory {
  TimeGrid time_grid;
  std::vector<PopulationState> states;
  std::vector<StepDiagnostics> diagnostics;
};

/// Runs the theta scheme over time_grid. The initial state must be in
/// transformed units; a missing boundary value is computed as B u(0).
Trajectory run_projection(const PopulationState& initial,
                          const ForcingFn& forcing,
                          const DiscreteOperators& ops,
                          const StepperWorkspace& ws, const TimeGrid& time_grid);

Trajectory run_projection(const PopulationState& initial,
                          const ForcingFn& forcing,
                          const DiscreteOperators& ops,
                          const SchemeConfig& config,
                          const TimeGrid& time_grid);

}  // namespace popdyn
