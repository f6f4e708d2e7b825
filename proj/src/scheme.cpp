#include "popdyn/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "popdyn/analysis.hpp"
#include "popdyn/errors.hpp"

namespace popdyn {

DiscreteOperators assemble_operators(const MaternityModuli& maternity,
                                     const SexPair<AgeGrid>& grids) {
  for (Sex s : kSexes) {
    if (!(maternity.grids()[s] == grids[s])) {
      throw InvalidArgument(
          std::string("assemble_operators: maternity grid mismatch for sex ") +
          sex_label(s));
    }
  }
  DiscreteOperators ops{grids, maternity, {}, {}};
  const auto n = static_cast<Eigen::Index>(ops.size());

  ops.b_rows.setZero(2, n);
  for (Sex c : kSexes) {
    for (Sex p : kSexes) {
      const auto& m = maternity(c, p);
      const auto off = static_cast<Eigen::Index>(ops.offset(p));
      for (std::size_t i = 1; i <= grids[p].n(); ++i) {
        ops.b_rows(static_cast<int>(c), off + static_cast<Eigen::Index>(i) - 1) =
            grids[p].h() * m[i];
      }
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(4 * n));
  for (Sex c : kSexes) {
    const double inv_h = 1.0 / grids[c].h();
    const auto off = static_cast<Eigen::Index>(ops.offset(c));
    for (Eigen::Index j = 0; j < n; ++j) {
      const double b = ops.b_rows(static_cast<int>(c), j);
      if (b != 0.0) triplets.emplace_back(off, j, inv_h * b);
    }
    triplets.emplace_back(off, off, -inv_h);
    for (std::size_t i = 2; i <= grids[c].n(); ++i) {
      const auto r = off + static_cast<Eigen::Index>(i) - 1;
      triplets.emplace_back(r, r, -inv_h);
      triplets.emplace_back(r, r - 1, inv_h);
    }
  }
  ops.a_block.resize(n, n);
  ops.a_block.setFromTriplets(triplets.begin(), triplets.end());
  return ops;
}

Eigen::VectorXd stack_interior(const SexPair<std::vector<double>>& interior) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(interior.male.size() +
                                              interior.female.size()));
  std::copy(interior.male.begin(), interior.male.end(), v.data());
  std::copy(interior.female.begin(), interior.female.end(),
            v.data() + interior.male.size());
  return v;
}

Eigen::VectorXd stack_interior(const PopulationState& state) {
  return stack_interior(state.interior);
}

SexPair<std::vector<double>> split_interior(const Eigen::VectorXd& v,
                                            const SexPair<AgeGrid>& grids) {
  const std::size_t nm = grids.male.n();
  if (static_cast<std::size_t>(v.size()) != nm + grids.female.n()) {
    throw InvalidArgument("split_interior: length mismatch");
  }
  SexPair<std::vector<double>> out;
  out.male.assign(v.data(), v.data() + nm);
  out.female.assign(v.data() + nm, v.data() + v.size());
  return out;
}

double omega0(const MaternityModuli& maternity, const SexPair<AgeGrid>& grids) {
  const double m = maternity.sup_norm();
  return std::max({grids.male.a_dag(), grids.female.a_dag(), 0.5 * m * m});
}

std::optional<double> stability_window(double theta, double omega0) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument("stability_window: theta must lie in [0,1]");
  }
  if (!(omega0 > 0.0)) {
    throw InvalidArgument("stability_window: omega0 must be positive");
  }
  if (theta < 0.5) return std::nullopt;
  return 1.0 / (2.0 * theta * omega0);
}

DissipativityReport dissipativity_check(const DiscreteOperators& ops,
                                        const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(u.size()) != ops.size()) {
    throw InvalidArgument("dissipativity_check: length mismatch");
  }
  const Eigen::VectorXd au = ops.a_block * u;
  DissipativityReport r;
  double norm2 = 0.0;
  for (Sex s : kSexes) {
    const auto off = static_cast<Eigen::Index>(ops.offset(s));
    const auto len = static_cast<Eigen::Index>(ops.grids[s].n());
    const double h = ops.grids[s].h();
    r.lhs += h * au.segment(off, len).dot(u.segment(off, len));
    norm2 += h * u.segment(off, len).squaredNorm();
  }
  r.rhs = omega0(ops.maternity, ops.grids) * norm2;
  r.holds = r.lhs <= r.rhs + 1e-10 * r.rhs;
  return r;
}

SchemeConfig make_scheme_config(const DiscreteOperators& ops, double theta,
                                double tau, StabilityPolicy policy) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument("scheme: theta must lie in [0,1]");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("scheme: tau must be positive");
  }
  SchemeConfig cfg;
  cfg.theta = theta;
  cfg.tau = tau;
  cfg.policy = policy;
  cfg.omega0 = omega0(ops.maternity, ops.grids);
  cfg.tau_bar = stability_window(theta, cfg.omega0);
  return cfg;
}

StepperWorkspace build_stepper(const DiscreteOperators& ops,
                               const SchemeConfig& config, SolverKind kind) {
  if (!(config.theta >= 0.0 && config.theta <= 1.0) || !(config.tau > 0.0)) {
    throw InvalidArgument("build_stepper: invalid theta or tau");
  }
  StepperWorkspace ws;
  ws.tau_ = config.tau;
  ws.theta_ = config.theta;
  ws.kind_ = kind;
  ws.size_ = ops.size();
  ws.a_ = ops.a_block;
  ws.b_ = ops.b_rows;
  ws.n_male_ = ops.grids.male.n();

  if (config.tau_bar && config.tau >= *config.tau_bar &&
      config.policy != StabilityPolicy::ignore) {
    std::ostringstream msg;
    msg << "tau = " << config.tau << " exceeds tau_bar = 1/"
        << 1.0 / *config.tau_bar << " (omega0 = " << config.omega0
        << ", theta = " << config.theta
        << "); the stability estimate does not cover this step";
    if (config.policy == StabilityPolicy::enforce) {
      throw InvalidArgument(msg.str());
    }
    ws.warnings_.push_back(msg.str());
  }

  const double inv_tau = 1.0 / config.tau;
  const double theta = config.theta;
  const auto n = static_cast<Eigen::Index>(ws.size_);

  if (kind == SolverKind::dense) {
    Eigen::MatrixXd h1 = -theta * Eigen::MatrixXd(ops.a_block);
    h1.diagonal().array() += inv_tau;
    ws.dense_lu_.compute(h1);
    if (!ws.dense_lu_.isInvertible()) {
      throw FactorizationFailed("dense factorization of H1 is singular",
                                config.tau, theta);
    }
    return ws;
  }

  for (Sex s : kSexes) {
    ws.diag_[s] = inv_tau + theta / ops.grids[s].h();
    ws.sub_[s] = -theta / ops.grids[s].h();
  }
  ws.z_.setZero(n, 2);
  for (Sex c : kSexes) {
    const auto col = static_cast<int>(c);
    ws.z_(static_cast<Eigen::Index>(ops.offset(c)), col) =
        theta / ops.grids[c].h();
    ws.forward_solve(ws.z_.col(col));
  }
  const Eigen::Matrix2d cap = Eigen::Matrix2d::Identity() - ops.b_rows * ws.z_;
  const double scale = std::max(1.0, cap.cwiseAbs().maxCoeff());
  if (!std::isfinite(cap.determinant()) ||
      std::abs(cap.determinant()) <= 1e-13 * scale * scale) {
    throw FactorizationFailed(
        "bordered factorization of H1 is singular (capacitance determinant " +
            std::to_string(cap.determinant()) + ")",
        config.tau, theta);
  }
  ws.capacitance_inv_ = cap.inverse();
  return ws;
}

void StepperWorkspace::forward_solve(Eigen::Ref<Eigen::VectorXd> x) const {
  const auto block = [&](Eigen::Index off, Eigen::Index len, Sex s) {
    const double d = diag_[s];
    const double sub = sub_[s];
    x(off) /= d;
    for (Eigen::Index i = off + 1; i < off + len; ++i) {
      x(i) = (x(i) - sub * x(i - 1)) / d;
    }
  };
  const auto nm = static_cast<Eigen::Index>(n_male_);
  block(0, nm, Sex::male);
  block(nm, static_cast<Eigen::Index>(size_) - nm, Sex::female);
}

Eigen::VectorXd StepperWorkspace::solve(const Eigen::VectorXd& rhs) const {
  if (static_cast<std::size_t>(rhs.size()) != size_) {
    throw InvalidArgument("stepper solve: dimension mismatch");
  }
  if (kind_ == SolverKind::dense) return dense_lu_.solve(rhs);
  Eigen::VectorXd y = rhs;
  forward_solve(y);
  const Eigen::Vector2d w = capacitance_inv_ * (b_ * y);
  y.noalias() += z_ * w;
  return y;
}

Eigen::VectorXd StepperWorkspace::apply_h2(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = u / tau_;
  if (theta_ != 1.0) out.noalias() += (1.0 - theta_) * (a_ * u);
  return out;
}

StepResult theta_step(const StepperWorkspace& ws, const DiscreteOperators& ops,
                      const Eigen::VectorXd& u_prev,
                      const Eigen::VectorXd& f_prev,
                      const Eigen::VectorXd& f_next) {
  const auto n = static_cast<Eigen::Index>(ops.size());
  if (ws.size() != ops.size() || u_prev.size() != n || f_prev.size() != n ||
      f_next.size() != n) {
    throw InvalidArgument("theta_step: dimension mismatch");
  }
  const double theta = ws.theta();
  Eigen::VectorXd rhs = ws.apply_h2(u_prev);
  rhs.noalias() += theta * f_next + (1.0 - theta) * f_prev;
  StepResult r;
  r.interior = ws.solve(rhs);
  const Eigen::Vector2d b = ops.b_rows * r.interior;
  r.boundary = {b(0), b(1)};
  return r;
}

ForcingFn zero_forcing(std::size_t size) {
  return [z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size)).eval()](
             std::size_t, double) { return z; };
}

ForcingFn constant_forcing(Eigen::VectorXd f) {
  return [f = std::move(f)](std::size_t, double) { return f; };
}

namespace {

StepDiagnostics diagnose(const PopulationState& st) {
  return {st.time, energy(st), *st.boundary};
}

}  // namespace

Trajectory run_projection(const PopulationState& initial,
                          const ForcingFn& forcing,
                          const DiscreteOperators& ops,
                          const StepperWorkspace& ws,
                          const TimeGrid& time_grid) {
  if (initial.units != Units::transformed) {
    throw InvalidState("run_projection: initial state must be transformed");
  }
  initial.validate();
  for (Sex s : kSexes) {
    if (!(initial.grids[s] == ops.grids[s])) {
      throw InvalidArgument("run_projection: state grid mismatch");
    }
  }
  if (std::abs(time_grid.tau() - ws.tau()) > 1e-12 * ws.tau()) {
    throw InvalidArgument("run_projection: time grid step differs from stepper tau");
  }

  Trajectory traj;
  traj.time_grid = time_grid;
  traj.states.reserve(time_grid.n_steps() + 1);
  traj.diagnostics.reserve(time_grid.n_steps() + 1);

  PopulationState current = initial;
  current.time = time_grid.time(0);
  Eigen::VectorXd u = stack_interior(current);
  if (!current.boundary) {
    const Eigen::Vector2d b = ops.b_rows * u;
    current.boundary = SexPair<double>{b(0), b(1)};
  }
  traj.diagnostics.push_back(diagnose(current));
  traj.states.push_back(std::move(current));

  Eigen::VectorXd f_prev = forcing(0, time_grid.time(0));
  for (std::size_t k = 1; k <= time_grid.n_steps(); ++k) {
    const double t = time_grid.time(k);
    Eigen::VectorXd f_next = forcing(k, t);
    StepResult step = theta_step(ws, ops, u, f_prev, f_next);
    for (Eigen::Index i = 0; i < step.interior.size(); ++i) {
      if (!std::isfinite(step.interior(i))) {
        throw FactorizationFailed("non-finite value at step " + std::to_string(k),
                                  ws.tau(), ws.theta());
      }
    }
    PopulationState next;
    next.time = t;
    next.units = Units::transformed;
    next.grids = ops.grids;
    next.interior = split_interior(step.interior, ops.grids);
    next.boundary = step.boundary;
    traj.diagnostics.push_back(diagnose(next));
    traj.states.push_back(std::move(next));
    u = std::move(step.interior);
    f_prev = std::move(f_next);
  }
  return traj;
}

Trajectory run_projection(const PopulationState& initial,
                          const ForcingFn& forcing,
                          const DiscreteOperators& ops,
                          const SchemeConfig& config,
                          const TimeGrid& time_grid) {
  const StepperWorkspace ws = build_stepper(ops, config);
  return run_projection(initial, forcing, ops, ws, time_grid);
}

}  // namespace popdyn
