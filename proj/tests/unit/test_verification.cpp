#include <doctest.h>

#include <random>

#include "popdyn/errors.hpp"
#include "popdyn/verification.hpp"

using namespace popdyn;

namespace {

SuiteOptions quick() {
  SuiteOptions o;
  o.sbp_cases = 100;
  o.matrix_cases = 20;
  o.dissipativity_cases = 100;
  o.stability_cases = 3;
  o.decay_sets = 3;
  o.sandwich_states = 50;
  return o;
}

// Assembly with the transport direction reversed in every generator row.
DiscreteOperators flipped(const MaternityModuli& m, const SexPair<AgeGrid>& g) {
  DiscreteOperators ops = assemble_operators(m, g);
  ops.a_block = -ops.a_block;
  return ops;
}

}  // namespace

TEST_CASE("direct operator oracles agree with hand values") {
  const SexPair<AgeGrid> g{build_age_grid(1.0, 2), build_age_grid(1.0, 2)};
  const auto m = MaternityModuli::constant(g, 1.0);
  Eigen::VectorXd u(4);
  u << 1, 2, 3, 4;
  const Eigen::Vector2d b = apply_birth_direct(m, g, u);
  CHECK(b(0) == doctest::Approx(5.0));  // h * (1 + 2 + 3 + 4), h = 1/2
  const Eigen::VectorXd au = apply_generator_direct(m, g, u);
  CHECK(au(0) == doctest::Approx(-(1.0 - 5.0) / 0.5));
  CHECK(au(1) == doctest::Approx(-(2.0 - 1.0) / 0.5));
  CHECK(au(2) == doctest::Approx(-(3.0 - 5.0) / 0.5));
  CHECK(au(3) == doctest::Approx(-(4.0 - 3.0) / 0.5));
}

TEST_CASE("property checks pass on the real assembly") {
  const auto o = quick();
  for (const auto& r : {check_summation_by_parts(o), check_matrix_equivalence(o),
                        check_dissipativity(o), check_transport(o),
                        check_stability_bound(o), check_energy_decay(o)}) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("suites catch a sign flip in the generator") {
  auto o = quick();
  o.assemble = flipped;
  const auto diss = check_dissipativity(o);
  const auto transport = check_transport(o);
  const bool both_pass = diss.passed && transport.passed;
  CHECK_FALSE(both_pass);
  CHECK_FALSE(check_matrix_equivalence(o).passed);

  bool any_failed = false;
  for (const auto& r : run_verification_suite(o)) any_failed = any_failed || !r.passed;
  CHECK(any_failed);
}

TEST_CASE("suites are deterministic for a fixed seed") {
  const auto o = quick();
  CHECK(check_dissipativity(o).detail == check_dissipativity(o).detail);
  CHECK(check_energy_decay(o).detail == check_energy_decay(o).detail);
}

TEST_CASE("self-convergence on the manufactured solution") {
  const auto joint = convergence_study(2, 1.0, RefinementMode::joint);
  REQUIRE(joint.levels.size() == 3);
  REQUIRE(joint.ratios.size() == 1);
  CHECK(joint.ratios[0] >= 1.8);
  // The discrete solution approaches the exact one as well.
  CHECK(joint.levels[2].error_vs_exact < joint.levels[0].error_vs_exact);

  CHECK_THROWS_AS(convergence_study(1, 1.0, RefinementMode::joint), InvalidArgument);
  CHECK_THROWS_AS(convergence_study(3, 1.5, RefinementMode::joint), InvalidArgument);
}
