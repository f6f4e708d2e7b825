#include "popdyn/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "popdyn/errors.hpp"

namespace popdyn {

Eigen::VectorXd apply_generator_direct(const MaternityModuli& maternity,
                                       const SexPair<AgeGrid>& grids,
                                       const Eigen::VectorXd& u) {
  const Eigen::Vector2d births = apply_birth_direct(maternity, grids, u);
  Eigen::VectorXd out(u.size());
  Eigen::Index off = 0;
  for (Sex c : kSexes) {
    const double h = grids[c].h();
    const auto n = static_cast<Eigen::Index>(grids[c].n());
    out(off) = -(u(off) - births(static_cast<int>(c))) / h;
    for (Eigen::Index i = 1; i < n; ++i) {
      out(off + i) = -(u(off + i) - u(off + i - 1)) / h;
    }
    off += n;
  }
  return out;
}

Eigen::Vector2d apply_birth_direct(const MaternityModuli& maternity,
                                   const SexPair<AgeGrid>& grids,
                                   const Eigen::VectorXd& u) {
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (Sex c : kSexes) {
    double total = 0.0;
    std::size_t off = 0;
    for (Sex p : kSexes) {
      const auto& m = maternity(c, p);
      double sum = 0.0;
      for (std::size_t i = 1; i <= grids[p].n(); ++i) {
        sum += m[i] * u(static_cast<Eigen::Index>(off + i - 1));
      }
      total += grids[p].h() * sum;
      off += grids[p].n();
    }
    b(static_cast<int>(c)) = total;
  }
  return b;
}

namespace {

using Rng = std::mt19937_64;
using Clock = std::chrono::steady_clock;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

std::vector<double> normal_vector(Rng& rng, std::size_t n) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

Eigen::VectorXd normal_eigen(Rng& rng, std::size_t n) {
  const auto v = normal_vector(rng, n);
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(n));
}

SexPair<AgeGrid> random_grids(Rng& rng, double a_lo, double a_hi,
                              std::size_t n_lo, std::size_t n_hi) {
  return {AgeGrid(log_uniform(rng, a_lo, a_hi), uniform_int(rng, n_lo, n_hi)),
          AgeGrid(log_uniform(rng, a_lo, a_hi), uniform_int(rng, n_lo, n_hi))};
}

/// Uniform [0, scale] entries on every node of every kernel.
MaternityModuli random_maternity(Rng& rng, const SexPair<AgeGrid>& grids,
                                 double scale) {
  SexKernel k;
  for (Sex c : kSexes) {
    for (Sex p : kSexes) {
      k[c][p] = LatticeFunction::sample(
          grids[p], [&](double) { return uniform(rng, 0.0, scale); });
    }
  }
  return MaternityModuli(std::move(k), grids);
}

MaternityModuli scaled(const MaternityModuli& m, double factor) {
  SexKernel k;
  for (Sex c : kSexes) {
    for (Sex p : kSexes) {
      const auto& f = m(c, p);
      std::vector<double> v(f.values().begin(), f.values().end());
      for (auto& x : v) x *= factor;
      k[c][p] = LatticeFunction(f.grid(), std::move(v));
    }
  }
  return MaternityModuli(std::move(k), m.grids());
}

double interior_norm(const Eigen::VectorXd& u, const SexPair<AgeGrid>& grids) {
  const auto nm = static_cast<Eigen::Index>(grids.male.n());
  return std::sqrt(grids.male.h() * u.head(nm).squaredNorm() +
                   grids.female.h() * u.tail(u.size() - nm).squaredNorm());
}

PopulationState transformed_state(const Eigen::VectorXd& u,
                                  const SexPair<AgeGrid>& grids) {
  PopulationState st;
  st.units = Units::transformed;
  st.grids = grids;
  st.interior = split_interior(u, grids);
  return st;
}

class Timer {
 public:
  Timer() : start_(Clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  Clock::time_point start_;
};

CheckResult finish(std::string name, bool passed, const std::string& detail,
                   const Timer& timer) {
  return {std::move(name), passed, detail, timer.seconds()};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

CheckResult check_summation_by_parts(const SuiteOptions& opt) {
  Timer timer;
  Rng rng(opt.seed ^ 0x5b9ULL);
  double worst = 0.0;
  for (std::size_t c = 0; c < opt.sbp_cases; ++c) {
    const AgeGrid g(log_uniform(rng, 0.5, 110.0), uniform_int(rng, 3, 64));
    const LatticeFunction u(g, normal_vector(rng, g.n() + 1));
    const LatticeFunction v(g, normal_vector(rng, g.n() + 1));
    const auto du = backward_diff(u);
    const auto dv = forward_diff(v);
    const double h = g.h();
    const std::size_t n = g.n();
    double lhs = 0.0, rhs = 0.0, scale = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      lhs += h * du[k - 1] * v[k];
      scale += std::abs(h * du[k - 1] * v[k]);
    }
    for (std::size_t k = 0; k < n; ++k) {
      rhs -= h * u[k] * dv[k];
      scale += std::abs(h * u[k] * dv[k]);
    }
    rhs += u[n] * v[n] - u[0] * v[0];
    scale += std::abs(u[n] * v[n]) + std::abs(u[0] * v[0]);
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return finish("summation-by-parts", worst <= 1e-12,
                std::to_string(opt.sbp_cases) + " cases, worst rel " + fmt(worst),
                timer);
}

CheckResult check_matrix_equivalence(const SuiteOptions& opt) {
  Timer timer;
  Rng rng(opt.seed ^ 0xa55ULL);
  double worst_a = 0.0, worst_b = 0.0;
  for (std::size_t c = 0; c < opt.matrix_cases; ++c) {
    const auto grids = random_grids(rng, 0.5, 110.0, 2, 64);
    const auto m = random_maternity(rng, grids, uniform(rng, 0.0, 2.0));
    const auto ops = opt.assemble(m, grids);
    const Eigen::VectorXd u = normal_eigen(rng, ops.size());
    const Eigen::VectorXd direct = apply_generator_direct(m, grids, u);
    const Eigen::VectorXd via_matrix = ops.a_block * u;
    worst_a = std::max(worst_a, (via_matrix - direct).cwiseAbs().maxCoeff() /
                                    direct.cwiseAbs().maxCoeff());
    const Eigen::Vector2d b_direct = apply_birth_direct(m, grids, u);
    const Eigen::Vector2d b_matrix = ops.b_rows * u;
    const double b_scale = (ops.b_rows.cwiseAbs() * u.cwiseAbs()).maxCoeff();
    if (b_scale > 0.0) {
      worst_b = std::max(worst_b,
                         (b_matrix - b_direct).cwiseAbs().maxCoeff() / b_scale);
    }
  }
  const bool ok = worst_a <= 1e-13 && worst_b <= 1e-13;
  return finish("matrix-equivalence", ok,
                std::to_string(opt.matrix_cases) + " states, worst rel A " +
                    fmt(worst_a) + ", B " + fmt(worst_b),
                timer);
}

CheckResult check_dissipativity(const SuiteOptions& opt) {
  Timer timer;
  Rng rng(opt.seed ^ 0xd15ULL);
  std::size_t failures = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < opt.dissipativity_cases; ++c) {
    const auto grids = random_grids(rng, 0.5, 110.0, 3, 64);
    const auto m = random_maternity(
        rng, grids, uniform(rng, 0.0, opt.max_maternity));
    const auto ops = opt.assemble(m, grids);
    const auto r = dissipativity_check(ops, normal_eigen(rng, ops.size()));
    if (!r.holds) ++failures;
    worst = std::max(worst, r.lhs / r.rhs);
  }
  return finish("dissipativity", failures == 0,
                std::to_string(opt.dissipativity_cases) + " cases, " +
                    std::to_string(failures) + " violations, max <Au,u>/(w0|u|^2) " +
                    fmt(worst),
                timer);
}

CheckResult check_transport(const SuiteOptions& opt) {
  Timer timer;
  Rng rng(opt.seed ^ 0x7a7ULL);
  double worst = 0.0;
  bool monotone = true;
  for (std::size_t trial = 0; trial < 8; ++trial) {
    const std::size_t n = trial == 0 ? 4 : uniform_int(rng, 2, 32);
    const SexPair<AgeGrid> grids{AgeGrid(1.0, n), AgeGrid(1.0, n)};
    const auto ops = opt.assemble(MaternityModuli::zero(grids), grids);
    const double h = grids.male.h();
    const Eigen::VectorXd u0 = normal_eigen(rng, ops.size());
    const auto initial = transformed_state(u0, grids);
    const TimeGrid tg(h * static_cast<double>(n), n);

    // Explicit upwind at Courant number one: exact shift by one cell.
    auto cfg = make_scheme_config(ops, 0.0, tg.tau());
    auto traj = run_projection(initial, zero_forcing(ops.size()), ops, cfg, tg);
    for (std::size_t k = 0; k <= n; ++k) {
      const auto& st = traj.states[k];
      for (Sex s : kSexes) {
        const auto off = static_cast<Eigen::Index>(ops.offset(s));
        for (std::size_t i = 0; i < n; ++i) {
          const double expect =
              i >= k ? u0(off + static_cast<Eigen::Index>(i - k)) : 0.0;
          worst = std::max(worst, std::abs(st.interior[s][i] - expect));
        }
      }
    }

    // Implicit upwind: u_i^k (1 + r) = u_i^{k-1} + r u_{i-1}^k, u_0^k = 0.
    cfg = make_scheme_config(ops, 1.0, tg.tau());
    traj = run_projection(initial, zero_forcing(ops.size()), ops, cfg, tg);
    const double r = tg.tau() / h;
    Eigen::VectorXd prev = u0;
    for (std::size_t k = 1; k <= n; ++k) {
      Eigen::VectorXd next(prev.size());
      for (Sex s : kSexes) {
        const auto off = static_cast<Eigen::Index>(ops.offset(s));
        double left = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const auto idx = off + static_cast<Eigen::Index>(i);
          next(idx) = (prev(idx) + r * left) / (1.0 + r);
          left = next(idx);
        }
      }
      const Eigen::VectorXd got = stack_interior(traj.states[k]);
      worst = std::max(worst, (got - next).cwiseAbs().maxCoeff());
      if (traj.diagnostics[k].energy > traj.diagnostics[k - 1].energy * (1 + 1e-12)) {
        monotone = false;
      }
      prev = next;
    }
  }
  return finish("transport", worst <= 1e-12 && monotone,
                "max deviation from upwind recursion " + fmt(worst) +
                    (monotone ? "" : ", energy increased"),
                timer);
}

CheckResult check_stability_bound(const SuiteOptions& opt) {
  Timer timer;
  Rng rng(opt.seed ^ 0x57bULL);
  const double horizon = 2.0;
  double worst = 0.0;
  std::size_t failures = 0, runs = 0;
  for (std::size_t c = 0; c < opt.stability_cases; ++c) {
    const auto grids = random_grids(rng, 0.5, 110.0, 4, 64);
    const auto m = random_maternity(rng, grids,
                                    uniform(rng, 0.0, opt.max_maternity));
    const auto ops = opt.assemble(m, grids);
    const Eigen::VectorXd u0 = normal_eigen(rng, ops.size());
    const double norm0 = interior_norm(u0, grids);
    for (double theta : {0.5, 1.0}) {
      const double tau_bar = *stability_window(theta, omega0(m, grids));
      const auto steps =
          static_cast<std::size_t>(std::ceil(horizon / (0.5 * tau_bar)));
      const TimeGrid tg(horizon, steps);
      const auto cfg = make_scheme_config(ops, theta, tg.tau());
      const auto traj = run_projection(transformed_state(u0, grids),
                                       zero_forcing(ops.size()), ops, cfg, tg);
      const double bound =
          std::sqrt(2.0) * (1.0 + 4.0 * tg.tau()) * std::exp(4.0 * horizon) * norm0;
      for (const auto& st : traj.states) {
        const double ratio = interior_norm(stack_interior(st), grids) / bound;
        worst = std::max(worst, ratio);
        if (ratio > 1.0) ++failures;
      }
      ++runs;
    }
  }
  return finish("stability-bound", failures == 0,
                std::to_string(runs) + " runs, max ||u||/bound " + fmt(worst),
                timer);
}

CheckResult check_energy_decay(const SuiteOptions& opt) {
  Timer timer;
  Rng rng(opt.seed ^ 0xe4eULL);
  double worst = 0.0;
  std::size_t failures = 0, runs = 0;
  for (std::size_t c = 0; c < opt.decay_sets; ++c) {
    const SexPair<AgeGrid> grids{AgeGrid(uniform(rng, 0.5, 2.0), 40),
                                 AgeGrid(uniform(rng, 0.5, 2.0), 40)};
    const auto raw = random_maternity(rng, grids, 1.0);
    const auto raw_report = decay_report(raw, grids);
    const double cond = std::max(raw_report.condition_value.male,
                                 raw_report.condition_value.female);
    const double target = uniform(rng, 0.0, 0.249);
    const auto m = scaled(raw, std::sqrt(target / cond));
    const auto report = decay_report(m, grids);
    if (!report.condition_met) continue;
    const auto ops = opt.assemble(m, grids);
    const double a_max = std::max(grids.male.a_dag(), grids.female.a_dag());
    const double horizon = 5.0 * a_max;
    const double h = std::min(grids.male.h(), grids.female.h());
    const TimeGrid tg(horizon, static_cast<std::size_t>(std::ceil(horizon / h)));
    const Eigen::VectorXd u0 = normal_eigen(rng, ops.size()).cwiseAbs();
    for (double theta : {0.5, 1.0}) {
      const auto cfg =
          make_scheme_config(ops, theta, tg.tau(), StabilityPolicy::ignore);
      const auto traj = run_projection(transformed_state(u0, grids),
                                       zero_forcing(ops.size()), ops, cfg, tg);
      const auto check = verify_energy_decay(traj, report);
      worst = std::max(worst, check.worst_ratio);
      if (!check.passed) ++failures;
      ++runs;
    }
  }
  return finish("energy-decay", failures == 0 && runs > 0,
                std::to_string(runs) + " runs, max E/(C e^{-2at} E0) " + fmt(worst),
                timer);
}

CheckResult check_energy_sandwich(const SuiteOptions& opt) {
  Timer timer;
  Rng rng(opt.seed ^ 0x5a4ULL);
  std::size_t lower = 0, middle = 0, upper = 0;
  double worst_upper = 0.0;
  for (std::size_t c = 0; c < opt.sandwich_states; ++c) {
    const auto grids = random_grids(rng, 0.5, 110.0, 3, 64);
    const auto st = transformed_state(
        normal_eigen(rng, grids.male.n() + grids.female.n()), grids);
    const double e = energy(st);
    const double f = lyapunov(st);
    const double a_max = std::max(grids.male.a_dag(), grids.female.a_dag());
    const double slack = 1e-12 * std::max(f, e);
    if (e < -slack) ++lower;
    if (e > f + slack) ++middle;
    if (f > 2.0 * a_max * e + slack) ++upper;
    worst_upper = std::max(worst_upper, f / (2.0 * a_max * e));
  }
  const bool ok = lower == 0 && middle == 0 && upper == 0;
  return finish("energy-sandwich", ok,
                std::to_string(opt.sandwich_states) + " states; violations: E<0 " +
                    std::to_string(lower) + ", E>F " + std::to_string(middle) +
                    ", F>2max(a)E " + std::to_string(upper) +
                    " (max F/(2max(a)E) " + fmt(worst_upper) + ")",
                timer);
}

std::vector<CheckResult> run_verification_suite(const SuiteOptions& opt) {
  return {check_summation_by_parts(opt), check_dissipativity(opt),
          check_matrix_equivalence(opt), check_transport(opt),
          check_energy_decay(opt)};
}

namespace {

/// u_c(t, a) = phi(t) (kappa_c + q_c(a)) on a_dag = 1 for both sexes, with
/// kappa chosen so the continuous birth law holds exactly.
class ManufacturedScenario {
 public:
  ManufacturedScenario() {
    // (I - I0) kappa = I1 - q(0), I0 = int m, I1 = int m q.
    Eigen::Matrix2d lhs = Eigen::Matrix2d::Identity();
    Eigen::Vector2d rhs;
    for (Sex c : kSexes) {
      const int ci = static_cast<int>(c);
      rhs(ci) = -q(c, 0.0);
      for (Sex p : kSexes) {
        const int pi = static_cast<int>(p);
        lhs(ci, pi) -= simpson([&](double a) { return m(c, p, a); });
        rhs(ci) += simpson([&](double a) { return m(c, p, a) * q(p, a); });
      }
    }
    const Eigen::Vector2d k = lhs.partialPivLu().solve(rhs);
    kappa_ = {k(0), k(1)};
  }

  static double m(Sex c, Sex p, double a) {
    if (c == Sex::male) {
      return p == Sex::male ? 0.05 * (1.0 + a) : 1.8 * a * (1.0 - a);
    }
    return p == Sex::male ? 0.04 * (2.0 - a) : 1.6 * a * (1.0 - a);
  }
  static double q(Sex s, double a) {
    return s == Sex::male ? std::cos(1.3 * a) : std::exp(-a);
  }
  static double dq(Sex s, double a) {
    return s == Sex::male ? -1.3 * std::sin(1.3 * a) : -std::exp(-a);
  }
  static double phi(double t) { return 1.0 + 0.5 * std::sin(2.0 * t); }
  static double dphi(double t) { return std::cos(2.0 * t); }

  double exact(Sex s, double t, double a) const {
    return phi(t) * (kappa_[s] + q(s, a));
  }
  double forcing(Sex s, double t, double a) const {
    return dphi(t) * (kappa_[s] + q(s, a)) + phi(t) * dq(s, a);
  }

  MaternityModuli maternity(const SexPair<AgeGrid>& grids) const {
    SexKernel k;
    for (Sex c : kSexes) {
      for (Sex p : kSexes) {
        k[c][p] = LatticeFunction::sample(grids[p],
                                          [&](double a) { return m(c, p, a); });
      }
    }
    return MaternityModuli(std::move(k), grids);
  }

  Eigen::VectorXd sample(const SexPair<AgeGrid>& grids, double t,
                         bool forcing_term) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grids.male.n() + grids.female.n()));
    Eigen::Index idx = 0;
    for (Sex s : kSexes) {
      for (std::size_t i = 1; i <= grids[s].n(); ++i) {
        const double a = grids[s].node(i);
        v(idx++) = forcing_term ? forcing(s, t, a) : exact(s, t, a);
      }
    }
    return v;
  }

 private:
  template <typename F>
  static double simpson(F&& f) {
    const int n = 4096;
    const double h = 1.0 / n;
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
  }

  SexPair<double> kappa_{};
};

struct LevelRun {
  ConvergenceLevel level;
  SexPair<AgeGrid> grids;
  std::vector<Eigen::VectorXd> states;
};

LevelRun run_level(const ManufacturedScenario& sc, std::size_t n_age,
                   std::size_t n_steps, double theta) {
  constexpr double horizon = 1.0;
  LevelRun run;
  run.grids = {AgeGrid(1.0, n_age), AgeGrid(1.0, n_age)};
  const auto ops = assemble_operators(sc.maternity(run.grids), run.grids);
  const TimeGrid tg(horizon, n_steps);
  const auto cfg =
      make_scheme_config(ops, theta, tg.tau(), StabilityPolicy::ignore);
  const auto grids = run.grids;
  const ForcingFn forcing = [&sc, grids](std::size_t, double t) {
    return sc.sample(grids, t, true);
  };
  const auto traj = run_projection(
      transformed_state(sc.sample(grids, 0.0, false), grids), forcing, ops, cfg,
      tg);
  run.level = {n_age, n_steps, grids.male.h(), tg.tau(), 0.0};
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    run.states.push_back(stack_interior(traj.states[k]));
    const Eigen::VectorXd err =
        run.states.back() - sc.sample(grids, tg.time(k), false);
    run.level.error_vs_exact =
        std::max(run.level.error_vs_exact, interior_norm(err, grids));
  }
  return run;
}

double level_distance(const LevelRun& coarse, const LevelRun& fine) {
  const std::size_t t_stride = fine.level.n_steps / coarse.level.n_steps;
  const std::size_t a_stride = fine.level.n_age / coarse.level.n_age;
  const auto nc = static_cast<Eigen::Index>(coarse.level.n_age);
  const auto nf = static_cast<Eigen::Index>(fine.level.n_age);
  double worst = 0.0;
  for (std::size_t k = 0; k < coarse.states.size(); ++k) {
    const auto& uc = coarse.states[k];
    const auto& uf = fine.states[k * t_stride];
    Eigen::VectorXd diff(uc.size());
    for (Eigen::Index s = 0; s < 2; ++s) {
      for (Eigen::Index i = 0; i < nc; ++i) {
        // coarse node i+1 sits at fine node (i+1)*stride
        const auto fi = (i + 1) * static_cast<Eigen::Index>(a_stride) - 1;
        diff(s * nc + i) = uc(s * nc + i) - uf(s * nf + fi);
      }
    }
    worst = std::max(worst, interior_norm(diff, coarse.grids));
  }
  return worst;
}

}  // namespace

ConvergenceStudy convergence_study(std::size_t refinements, double theta,
                                   RefinementMode mode) {
  if (refinements < 2) {
    throw InvalidArgument("convergence: need at least 2 refinement levels");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument("convergence: theta must lie in [0,1]");
  }
  const ManufacturedScenario sc;
  ConvergenceStudy study;
  study.mode = mode;
  study.theta = theta;
  std::vector<LevelRun> runs;
  for (std::size_t l = 0; l <= refinements; ++l) {
    const std::size_t scale = std::size_t{1} << l;
    const std::size_t n_age = mode == RefinementMode::joint ? 16 * scale : 512;
    const std::size_t n_steps = mode == RefinementMode::joint ? 16 * scale : 8 * scale;
    runs.push_back(run_level(sc, n_age, n_steps, theta));
    study.levels.push_back(runs.back().level);
  }
  for (std::size_t l = 0; l + 1 < runs.size(); ++l) {
    study.differences.push_back(level_distance(runs[l], runs[l + 1]));
  }
  for (std::size_t l = 0; l + 1 < study.differences.size(); ++l) {
    study.ratios.push_back(study.differences[l] / study.differences[l + 1]);
  }
  return study;
}

}  // namespace popdyn
