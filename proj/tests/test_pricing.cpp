#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "hysim/market.hpp"
#include "hysim/pricing.hpp"
#include "oracles.hpp"

using namespace hysim;

namespace {
const ExternalityModel kConst = make_constant_model(1.0, 0.5, 6.0);
const PowerParams kReference{1.8, 0.8, 0.8, 1.0, 1.2, 0.6};
const ExternalityModel kReference8 = make_power_family(kReference, 8.0);
const ExternalityModel kLinear = make_linear_family({1.0, 0.5, 0.3}, 6.0);
const ExternalityModel kNoInfo = make_constant_model(1.0, 0.0, 6.0);
}  // namespace

TEST_SUITE("pricing") {

TEST_CASE("inverse price map") {
  const auto p = prices_from_shares(kConst, {0.4, 0.2});
  CHECK(p.p_l == doctest::Approx(2.9));
  CHECK(p.p_a == doctest::Approx(0.2));
  const auto eq = solve_equilibrium(kConst, p);
  CHECK(std::abs(eq.shares.eta_l - 0.4) < 1e-10);
  CHECK(std::abs(eq.shares.eta_a - 0.2) < 1e-10);

  const auto corner = prices_from_shares(kReference8, {1.0, 0.0});
  CHECK(corner.p_l == 0.0);
  CHECK(corner.p_a == 0.0);

  const auto q = prices_from_shares(kConst, {19.0 / 39.0, 10.0 / 39.0});
  CHECK(q.p_l == doctest::Approx(2.435897).epsilon(1e-6));
  CHECK(q.p_a == doctest::Approx(0.128205).epsilon(1e-5));
}

TEST_CASE("payoffs") {
  const auto u = payoffs_mscg(kConst, {0.4, 0.2}, 0.25);
  CHECK(u.u_sl == doctest::Approx(0.87));
  CHECK(u.u_db == doctest::Approx(0.33));
  const auto full = payoffs_mscg(kConst, {0.4, 0.2}, 1.0);
  CHECK(full.u_sl == doctest::Approx(0.0));
  CHECK(full.u_db == doctest::Approx(1.2));
  const auto zero = payoffs_mscg(kReference8, {0.0, 0.0}, 0.6);
  CHECK(zero.u_sl == 0.0);
  CHECK(zero.u_db == 0.0);
  const auto third = payoffs_split(kConst, {0.4, 0.2}, RevenueSplit::third_party(0.3));
  CHECK(third.u_sl == doctest::Approx(1.16 * 0.7));
  CHECK(third.u_db == doctest::Approx(0.04));
}

TEST_CASE("licensee best response") {
  CHECK(best_response_sl(kConst, 0.2, 0.0) == doctest::Approx(0.49).epsilon(1e-9));
  CHECK(best_response_sl(kConst, 1.0, 0.0) == 0.0);
  const auto grid = oracle::grid_max_1d(
      [](double l) { return payoffs_mscg(kLinear, {l, 0.0}, 0.0).u_sl; }, 0.0, 1.0, 1000000);
  CHECK(std::abs(best_response_sl(kLinear, 0.0, 0.0) - grid.x) < 1e-4);
  // Positive scaling leaves the argmax unchanged.
  for (double d : {0.0, 0.3, 0.7, 0.99}) {
    CHECK(best_response_sl(kReference8, 0.2, d) == best_response_sl(kReference8, 0.2, 0.0));
  }
}

TEST_CASE("database best response") {
  CHECK(best_response_db(kConst, 0.4, 0.0) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(best_response_db(kConst, 1.0, 0.0) == 0.0);
  const auto grid = oracle::grid_max_1d(
      [](double a) { return payoffs_mscg(kReference8, {0.4, a}, 0.2).u_db; }, 0.0, 0.6, 1000000);
  CHECK(std::abs(best_response_db(kReference8, 0.4, 0.2) - grid.x) < 1e-4);
}

TEST_CASE("best responses never lose to a fine grid") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 30; ++k) {
    const auto rm = oracle::random_model(rng, k);
    const double other = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
    const double delta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double l = best_response_sl(rm.model, other, delta);
    const double a = best_response_db(rm.model, other, delta);
    const auto gl = oracle::grid_max_1d(
        [&](double x) { return payoffs_mscg(rm.model, {x, other}, delta).u_sl; }, 0.0, 1.0 - other,
        10000);
    const auto ga = oracle::grid_max_1d(
        [&](double x) { return payoffs_mscg(rm.model, {other, x}, delta).u_db; }, 0.0, 1.0 - other,
        10000);
    CHECK(payoffs_mscg(rm.model, {l, other}, delta).u_sl >= gl.value - 1e-12);
    CHECK(payoffs_mscg(rm.model, {other, a}, delta).u_db >= ga.value - 1e-12);
  }
}

TEST_CASE("constant model equilibrium") {
  const auto eq = solve_mscg(kConst, 0.0);
  CHECK(eq.unique);
  CHECK(std::abs(eq.shares.eta_l - 19.0 / 39.0) < 1e-7);
  CHECK(std::abs(eq.shares.eta_a - 10.0 / 39.0) < 1e-7);
  CHECK(std::abs(eq.prices.p_l - 95.0 / 39.0) < 1e-6);
  CHECK(std::abs(eq.prices.p_a - 5.0 / 39.0) < 1e-6);
}

TEST_CASE("worthless information") {
  const auto grid = oracle::grid_max_1d(
      [](double l) { return (1.0 - l) * (6.0 - 1.0) * l; }, 0.0, 1.0, 1000000);
  for (double d : {0.0, 0.4, 0.9}) {
    const auto eq = pcg_equilibrium(kNoInfo, d);
    CHECK(eq.shares.eta_a == 0.0);
    CHECK(eq.prices.p_a == 0.0);
    CHECK(std::abs(eq.shares.eta_l - grid.x) < 1e-6);
  }
}

TEST_CASE("bracket agreement and certificate on the reference family") {
  const auto eq = solve_mscg(kReference8, 0.3);
  CHECK(eq.unique);
  CHECK(eq.bracket_gap <= 1e-8);
  const auto gain = deviation_gain(kReference8, eq.shares, RevenueSplit::revenue_sharing(0.3));
  CHECK(gain.licensee <= 1e-6);
  CHECK(gain.database <= 1e-6);
}

TEST_CASE("uniqueness checks") {
  const auto c = check_ne_uniqueness(kConst, 0.0);
  CHECK(c.licensee_margin == doctest::Approx(9.5).epsilon(1e-6));
  CHECK(c.database_margin == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(c.passed());
  CHECK(linear_uniqueness_condition({1.0, 0.5, 0.3}, 6.0));
  CHECK_FALSE(linear_uniqueness_condition({1.0, 0.5, 5.0}, 1.6));
  const auto l = check_ne_uniqueness(kLinear, 0.2);
  REQUIRE(l.linear_condition.has_value());
  CHECK(*l.linear_condition);
}

TEST_CASE("round trip through the user-choice layer") {
  const auto eq = pcg_equilibrium(kConst, 0.0);
  REQUIRE(eq.market_roundtrip_error.has_value());
  CHECK(*eq.market_roundtrip_error < 1e-6);
}

TEST_CASE("licensee price rises with leasing quality") {
  const auto lo = pcg_equilibrium(make_power_family(kReference, 6.0), 0.3);
  const auto hi = pcg_equilibrium(make_power_family(kReference, 10.0), 0.3);
  CHECK(hi.prices.p_l > lo.prices.p_l);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(RevenueSplit::revenue_sharing(1.5), std::invalid_argument);
  CHECK_THROWS_AS(solve_mscg(kConst, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(check_ne_uniqueness(kConst, 0.0, 2), std::invalid_argument);
}

}
