#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "popdyn/analysis.hpp"

namespace popdyn {

/// Outcome of one property check.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Builds the discrete operators under test. Replaceable so a deliberately
/// broken assembly can be fed through the suites.
using OperatorFactory = std::function<DiscreteOperators(
    const MaternityModuli&, const SexPair<AgeGrid>&)>;

/// Matrix-free evaluation of A u straight from the difference formulas.
Eigen::VectorXd apply_generator_direct(const MaternityModuli& maternity,
                                       const SexPair<AgeGrid>& grids,
                                       const Eigen::VectorXd& u);

/// B u as explicit double sums over the maternity kernels.
Eigen::Vector2d apply_birth_direct(const MaternityModuli& maternity,
                                   const SexPair<AgeGrid>& grids,
                                   const Eigen::VectorXd& u);

struct SuiteOptions {
  std::uint64_t seed = 20140901;
  std::size_t sbp_cases = 1000;
  std::size_t matrix_cases = 100;
  std::size_t dissipativity_cases = 1000;
  std::size_t stability_cases = 20;
  std::size_t decay_sets = 20;
  std::size_t sandwich_states = 500;
  /// Upper bound for random maternity values in the dissipativity and
  /// stability checks (children per person-year).
  double max_maternity = 0.7071;
  OperatorFactory assemble = assemble_operators;
};

/// sum (D-u)_k v_k = -sum u_k (D+v)_k + u_n v_n - u_0 v_0, relative 1e-12.
CheckResult check_summation_by_parts(const SuiteOptions& opt);
/// Assembled A and B against the direct formulas, relative 1e-13.
CheckResult check_matrix_equivalence(const SuiteOptions& opt);
/// <A u, u> <= omega0 ||u||^2 (1 + 1e-10) for random (m, u).
CheckResult check_dissipativity(const SuiteOptions& opt);
/// Zero maternity, explicit upwind at tau = h shifts one cell per step and
/// empties the grid after n steps; implicit steps follow the upwind recursion.
CheckResult check_transport(const SuiteOptions& opt);
/// ||u(t_k)|| <= sqrt(2) (1 + 4 tau) e^{4T} ||u0|| for theta in {1/2, 1},
/// tau = tau_bar / 2, T = 2.
CheckResult check_stability_bound(const SuiteOptions& opt);
/// E(t) <= C e^{-2 alpha t} E(0) for random maternity under the 1/4 condition
/// over T = 5 max a_dag.
CheckResult check_energy_decay(const SuiteOptions& opt);
/// 0 <= E <= F <= 2 max a_dag E on random states, slack 1e-12.
CheckResult check_energy_sandwich(const SuiteOptions& opt);

/// Summation by parts, dissipativity, matrix equivalence, transport and
/// energy decay.
std::vector<CheckResult> run_verification_suite(const SuiteOptions& opt);

enum class RefinementMode { joint, time_only };

struct ConvergenceLevel {
  std::size_t n_age = 0;   // cells per sex
  std::size_t n_steps = 0;
  double h = 0.0;
  double tau = 0.0;
  /// max_k || u_this(t_k) - u_exact(t_k) || on this level's lattice.
  double error_vs_exact = 0.0;
};

/// Self-convergence study on a smooth manufactured two-sex scenario.
/// differences[l] = max over level-l times of the interior lattice L2
/// distance between levels l and l+1; ratios[l] = differences[l] /
/// differences[l+1].
struct ConvergenceStudy {
  RefinementMode mode = RefinementMode::joint;
  double theta = 1.0;
  std::vector<ConvergenceLevel> levels;
  std::vector<double> differences;
  std::vector<double> ratios;
};

/// Runs refinements + 1 solves (so refinements >= 2 yields at least one
/// ratio). joint halves h and tau together starting from h = tau = 1/16;
/// time_only keeps h = 1/512 and halves tau starting from 1/8.
ConvergenceStudy convergence_study(std::size_t refinements, double theta,
                                   RefinementMode mode);

}  // namespace popdyn
