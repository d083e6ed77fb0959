#include <doctest.h>

#include <stdexcept>

#include <random>

#include "hysim/errors.hpp"
#include "hysim/market.hpp"
#include "oracles.hpp"

using namespace hysim;

namespace {
const ExternalityModel kConst = make_constant_model(1.0, 0.5, 6.0);
const ExternalityModel kReference8 = make_power_family({1.8, 0.8, 0.8, 1.0, 1.2, 0.6}, 8.0);

void check_shares(const MarketShares& got, double l, double a, double tol) {
  CHECK(std::abs(got.eta_l - l) <= tol);
  CHECK(std::abs(got.eta_a - a) <= tol);
}
}  // namespace

TEST_SUITE("market") {

TEST_CASE("thresholds by hand") {
  const auto t = thresholds(kConst, {2.0, 0.3}, {0.1, 0.1});
  CHECK(t.theta_lb == doctest::Approx(0.4));
  CHECK(t.theta_ab == doctest::Approx(0.6));
  CHECK(t.theta_la == doctest::Approx(1.7 / 4.5));
  const auto u = thresholds(kConst, {2.9, 0.2}, {0.0, 0.0});
  CHECK(u.theta_lb == doctest::Approx(0.58));
  CHECK(u.theta_ab == doctest::Approx(0.4));
  CHECK(u.theta_la == doctest::Approx(0.6));
  const auto z = thresholds(kReference8, {0.0, 0.0}, {0.2, 0.2});
  CHECK(z.theta_lb == 0.0);
  CHECK(z.theta_ab == 0.0);
  CHECK(z.theta_la == 0.0);
}

TEST_CASE("derived shares against the type-grid oracle") {
  for (const PriceVector p : {PriceVector{2.0, 0.3}, PriceVector{10.0, 0.2}, PriceVector{0, 0}}) {
    const auto got = derived_shares(kConst, p, {0.2, 0.2});
    const auto want = oracle::theta_grid_shares(kConst, p, {0.2, 0.2});
    CHECK(std::abs(got.eta_l - want.eta_l) <= 2e-6);
    CHECK(std::abs(got.eta_a - want.eta_a) <= 2e-6);
  }
  check_shares(derived_shares(kConst, {2.0, 0.3}, {0, 0}), 0.6, 0.0, 1e-12);
  check_shares(derived_shares(kConst, {10.0, 0.2}, {0, 0}), 0.0, 0.6, 1e-12);
  check_shares(derived_shares(kReference8, {0.0, 0.0}, {0.3, 0.3}), 1.0, 0.0, 0.0);
  CHECK_THROWS_AS(derived_shares(kConst, {1, 1}, {0.7, 0.7}), std::invalid_argument);
}

TEST_CASE("degenerate leasing utility") {
  const auto low = make_linear_family({1.0, 0.5, 0.3}, 0.85);
  CHECK_THROWS_AS(derived_shares(low, {1, 0.1}, {0.5, 0.5}), DegenerateModelError);
}

TEST_CASE("dynamics") {
  const auto tr = iterate_dynamics(kConst, {2.9, 0.2}, {0, 0}, 1e-12, 100, 1.0);
  CHECK(tr.converged);
  CHECK(tr.steps() == 1);
  check_shares(tr.shares.back(), 0.4, 0.2, 1e-12);

  const auto d = iterate_dynamics(kReference8, {3.0, 0.3}, {0.6, 0.0}, 1e-10, 100000, 1.0);
  CHECK(d.converged);
  const auto eq = solve_equilibrium(kReference8, {3.0, 0.3});
  check_shares(d.shares.back(), eq.shares.eta_l, eq.shares.eta_a, 1e-8);

  const auto z = iterate_dynamics(kReference8, {0, 0}, {0.1, 0.5});
  CHECK(z.converged);
  check_shares(z.shares.back(), 1.0, 0.0, 1e-9);
  CHECK(z.deltas.size() + 1 == z.shares.size());
}

TEST_CASE("equilibrium solver") {
  const auto b = solve_equilibrium(kConst, {2.9, 0.2});
  check_shares(b.shares, 0.4, 0.2, 1e-10);
  CHECK(b.equilibrium_case == EquilibriumCase::B);
  CHECK_FALSE(b.multiplicity_warning);

  const auto a = solve_equilibrium(kConst, {2.0, 0.5});
  check_shares(a.shares, 0.6, 0.0, 1e-10);
  CHECK(a.equilibrium_case == EquilibriumCase::A);

  const auto z = solve_equilibrium(kReference8, {0, 0});
  check_shares(z.shares, 1.0, 0.0, 1e-10);

  for (const PriceVector p : {PriceVector{3.0, 0.3}, PriceVector{2.5, 0.6}, PriceVector{5, 0.1}}) {
    const auto eq = solve_equilibrium(kReference8, p);
    const auto again = derived_shares(kReference8, p, eq.shares);
    CHECK(std::abs(again.eta_l - eq.shares.eta_l) <= 1e-10);
    CHECK(std::abs(again.eta_a - eq.shares.eta_a) <= 1e-10);
    CHECK(eq.shares.on_simplex());
  }
}

TEST_CASE("dynamics from the corners agree with the solver when condition holds") {
  const auto m = make_power_family({1.5, 0.5, 0.7, 0.8, 0.9, 1.0}, 8.0);
  REQUIRE(check_me_uniqueness(m).forall_pass);
  const PriceVector p{3.0, 0.2};
  const auto eq = solve_equilibrium(m, p);
  for (const MarketShares c : {MarketShares{0, 0}, MarketShares{1, 0}, MarketShares{0, 1}}) {
    const auto tr = iterate_dynamics(m, p, c);
    REQUIRE(tr.converged);
    check_shares(tr.shares.back(), eq.shares.eta_l, eq.shares.eta_a, 1e-8);
  }
}

TEST_CASE("multiple equilibria are reported") {
  const auto lin = make_linear_family({1.0, 0.5, 0.3}, 6.0);
  // Information worthless at eta_a = 0, so no-one buying it is self-confirming.
  const auto eq = solve_equilibrium(lin, {3.153, 0.027});
  CHECK(eq.multiplicity_warning);
  CHECK(eq.all_equilibria.size() == 3);
  CHECK(eq.shares.eta_a == 0.0);
}

TEST_CASE("uniqueness condition readings") {
  const auto c = check_me_uniqueness(kConst);
  CHECK(c.forall_pass);
  CHECK(c.exists_pass);
  CHECK(c.worst_lhs == 0.0);

  const auto p = check_me_uniqueness(make_power_family({1.8, 0.8, 0.8, 1.0, 1.2, 0.6}, 6.0));
  CHECK_FALSE(p.forall_pass);
  CHECK(p.exists_pass);
  CHECK(p.worst_at_boundary);

  const auto l = check_me_uniqueness(make_linear_family({1.0, 0.5, 0.3}, 6.0));
  CHECK_FALSE(l.forall_pass);
  CHECK(l.worst_at_boundary);
  CHECK(l.excluded_points > 0);
}

TEST_CASE("pure information market") {
  CHECK(pure_info_equilibrium(kConst, 0.25).eta_a == doctest::Approx(0.5));
  CHECK(pure_info_equilibrium(kConst, 0.0).eta_a == 1.0);
  CHECK(pure_info_equilibrium(kConst, 0.6).eta_a == 0.0);
  // The oracle: basic against advanced only.
  const auto want = oracle::theta_grid_shares(make_constant_model(1.0, 0.5, 1e9), {1e12, 0.25},
                                              {0.0, 0.5});
  CHECK(std::abs(want.eta_a - 0.5) <= 2e-6);
}

TEST_CASE("threshold monotone in the licensee price") {
  double prev_lb = -1.0, prev_la = -1.0;
  for (int i = 0; i <= 50; ++i) {
    const auto t = thresholds(kReference8, {0.1 * i, 0.4}, {0.3, 0.2});
    CHECK(t.theta_lb >= prev_lb);
    CHECK(t.theta_la >= prev_la);
    prev_lb = t.theta_lb;
    prev_la = t.theta_la;
  }
}

}
