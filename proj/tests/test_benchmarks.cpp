#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "hysim/bargaining.hpp"
#include "hysim/benchmarks.hpp"
#include "oracles.hpp"

using namespace hysim;

namespace {
const ExternalityModel kConst = make_constant_model(1.0, 0.5, 6.0);
const PowerParams kReference{1.8, 0.8, 0.8, 1.0, 1.2, 0.6};
}  // namespace

TEST_SUITE("benchmarks") {

TEST_CASE("coordination closed forms") {
  const auto c = coordination_benchmark(kConst);
  CHECK(c.network_profit == doctest::Approx(1.25).epsilon(1e-10));
  CHECK(std::abs(c.shares.eta_l - 0.5) < 1e-6);
  CHECK(std::abs(c.shares.eta_a) < 1e-6);

  const auto q = coordination_benchmark(make_constant_model(0.0, 0.0, 1.0));
  CHECK(q.network_profit == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(std::abs(q.shares.eta_l - 0.5) < 1e-6);
}

TEST_CASE("coordination against an exhaustive simplex grid") {
  const auto m = make_power_family(kReference, 6.0);
  const auto grid = oracle::grid_max_simplex(
      [&](double l, double a) {
        const double b = 1.0 - l - a;
        const double p_a = b * m.g(a);
        const double p_l = p_a + (1.0 - l) * (m.leasing_utility() - m.f(1.0 - l) - m.g(a));
        return p_l * l + p_a * a;
      },
      1413);
  const auto c = coordination_benchmark(m);
  CHECK(c.network_profit >= grid.value - 1e-12);
  CHECK(std::abs(c.network_profit - grid.value) < 1e-5);
}

TEST_CASE("noncooperation") {
  CHECK(noncooperation_benchmark(kConst).network_profit == doctest::Approx(0.125));
  CHECK(noncooperation_benchmark(make_constant_model(1.0, 0.0, 6.0)).network_profit == 0.0);
  const auto m = make_power_family(kReference, 7.0);
  CHECK(noncooperation_benchmark(m).u_db == disagreement_points(m).u_db);
  CHECK(noncooperation_benchmark(m).u_sl == 0.0);
}

TEST_CASE("third party") {
  const auto t = third_party_benchmark(kConst, 0.0);
  const auto eq = solve_mscg(kConst, 0.0);
  CHECK(t.u_sl == doctest::Approx(eq.payoffs.u_sl));
  CHECK(t.u_db == doctest::Approx(eq.payoffs.u_db));
  CHECK(t.reconstructed);
  CHECK_THROWS_AS(third_party_benchmark(kConst, 1.0), std::invalid_argument);

  const auto none = make_constant_model(1.0, 0.0, 6.0);
  const auto tn = third_party_benchmark(none, 0.0);
  const auto pn = pcg_equilibrium(none, 0.0);
  CHECK(tn.u_db == 0.0);
  CHECK(tn.shares.eta_l == doctest::Approx(pn.shares.eta_l));

  const auto cut = third_party_benchmark(kConst, 0.3);
  CHECK(cut.outside_cut == doctest::Approx(0.3 * cut.prices.p_l * cut.shares.eta_l));
  CHECK(cut.network_profit == doctest::Approx(cut.u_sl + cut.u_db));
}

TEST_CASE("dominance chain at the reference parameters") {
  const auto m = make_power_family(kReference, 8.0);
  const auto rss = solve_bargaining(m);
  const double net_rss = rss.payoffs.u_sl + rss.payoffs.u_db;
  const auto coord = coordination_benchmark(m);
  CHECK(coord.network_profit >= net_rss - 1e-6);
  CHECK(net_rss >= noncooperation_benchmark(m).network_profit - 1e-6);
  CHECK(net_rss >= third_party_benchmark(m, 0.3).network_profit - 1e-6);
  for (double d : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CHECK(coord.network_profit >= solve_mscg(m, d).payoffs.u_sl + solve_mscg(m, d).payoffs.u_db - 1e-9);
  }
}

}
