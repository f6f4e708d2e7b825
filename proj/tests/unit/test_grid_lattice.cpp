#include <doctest.h>

#include <cmath>
#include <random>

#include "popdyn/errors.hpp"
#include "popdyn/lattice.hpp"

using namespace popdyn;

TEST_CASE("age grid construction") {
  const AgeGrid monthly = build_age_grid(110.0, 1320);
  CHECK(monthly.h() == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(monthly.node(1320) == 110.0);

  const AgeGrid quarter = build_age_grid(1.0, 4);
  const std::vector<double> expected{0.0, 0.25, 0.5, 0.75, 1.0};
  CHECK(quarter.nodes() == expected);

  CHECK(build_age_grid(2.0, 2).h() == 1.0);

  CHECK_THROWS_AS(build_age_grid(1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(build_age_grid(-1.0, 4), InvalidArgument);
  CHECK_THROWS_AS(build_age_grid(NAN, 4), InvalidArgument);
  CHECK(age_grid_with_step(110.0, 1.0 / 12.0).n() == 1320);
  CHECK_THROWS_AS(age_grid_with_step(1.0, 0.3), InvalidArgument);
}

TEST_CASE("time grid") {
  const TimeGrid t = time_grid_with_step(10.0, 1.0 / 12.0);
  CHECK(t.n_steps() == 120);
  CHECK(t.time(120) == 10.0);
  CHECK_THROWS_AS(time_grid_with_step(1.0, 0.3), InvalidArgument);
}

TEST_CASE("lattice function validation") {
  const AgeGrid g = build_age_grid(1.0, 4);
  CHECK_THROWS_AS(LatticeFunction(g, std::vector<double>(4, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(LatticeFunction(g, std::vector<double>{0, 1, INFINITY, 0, 0}),
                  InvalidArgument);
  const LatticeFunction f(g, std::vector<double>{0, -3, 1, 2, 0.5});
  CHECK(f.sup_abs() == 3.0);
  CHECK(f.interior().size() == 4);
}

TEST_CASE("discrete inner products") {
  const AgeGrid g = build_age_grid(1.0, 4);
  const LatticeFunction one(g, 1.0), zero(g, 0.0);
  CHECK(discrete_l2_inner(one, one, L2Range::interior) == 1.0);
  CHECK(discrete_l2_inner(one, one, L2Range::full) == 1.25);
  CHECK(discrete_l2_inner(zero, one, L2Range::interior) == 0.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const AgeGrid g7 = build_age_grid(2.0, 7);
  const auto u = LatticeFunction::sample(g7, [&](double) { return U(rng); });
  const auto v = LatticeFunction::sample(g7, [&](double) { return U(rng); });
  double interior = 0.0;
  for (std::size_t k = 1; k <= 7; ++k) interior += u[k] * v[k];
  interior *= g7.h();
  CHECK(discrete_l2_inner(u, v, L2Range::interior) == interior);
  CHECK(discrete_l2_norm(u, L2Range::full) ==
        doctest::Approx(std::sqrt(discrete_l2_inner(u, u, L2Range::full))));
}

TEST_CASE("difference quotients") {
  const AgeGrid g = build_age_grid(1.0, 5);
  const LatticeFunction c(g, 3.5);
  for (double d : backward_diff(c)) CHECK(d == 0.0);
  for (double d : forward_diff(c)) CHECK(d == 0.0);

  const auto id = LatticeFunction::sample(g, [](double a) { return a; });
  for (double d : backward_diff(id)) CHECK(d == doctest::Approx(1.0).epsilon(1e-14));
  for (double d : forward_diff(id)) CHECK(d == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto u = LatticeFunction::sample(g, [&](double) { return U(rng); });
  const auto bd = backward_diff(u);
  const auto fd = forward_diff(u);
  REQUIRE(bd.size() == 5);
  REQUIRE(fd.size() == 5);
  for (std::size_t k = 1; k <= 5; ++k) CHECK(bd[k - 1] == doctest::Approx((u[k] - u[k - 1]) / g.h()).epsilon(1e-14));
  for (std::size_t k = 0; k < 5; ++k) CHECK(fd[k] == doctest::Approx((u[k + 1] - u[k]) / g.h()).epsilon(1e-14));
}
