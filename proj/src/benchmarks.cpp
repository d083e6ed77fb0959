#include "hysim/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hysim/optimize.hpp"

namespace hysim {

double network_profit(const ExternalityModel& model, const MarketShares& shares) {
  const PriceVector p = prices_from_shares(model, shares);
  return p.p_l * shares.eta_l + p.p_a * shares.eta_a;
}

BenchmarkResult coordination_benchmark(const ExternalityModel& model, double tol) {
  auto profit = [&](double l, double a) { return network_profit(model, {l, a}); };

  constexpr int kGrid = 200;
  const int last = kGrid - 1;
  double best_l = 0.0;
  double best_a = 0.0;
  double best = profit(0.0, 0.0);
  for (int i = 0; i <= last; ++i) {
    for (int j = 0; i + j <= last; ++j) {
      const double l = static_cast<double>(i) / last;
      const double a = static_cast<double>(j) / last;
      const double v = profit(l, a);
      if (v > best) {
        best = v;
        best_l = l;
        best_a = a;
      }
    }
  }

  // Coordinate line searches: leasing share, advanced share, and the exchange
  // direction that keeps the white-space share fixed.
  for (int cycle = 0; cycle < 200; ++cycle) {
    const double before = best;
    {
      const Maximum m = maximize_1d([&](double l) { return profit(l, best_a); }, 0.0,
                                    1.0 - best_a, tol, 64);
      if (m.value > best) {
        best = m.value;
        best_l = m.x;
      }
    }
    {
      const Maximum m = maximize_1d([&](double a) { return profit(best_l, a); }, 0.0,
                                    1.0 - best_l, tol, 64);
      if (m.value > best) {
        best = m.value;
        best_a = m.x;
      }
    }
    {
      const double s = best_l + best_a;
      const Maximum m =
          maximize_1d([&](double l) { return profit(l, s - l); }, 0.0, s, tol, 64);
      if (m.value > best) {
        best = m.value;
        best_l = m.x;
        best_a = s - m.x;
      }
    }
    if (best - before <= 1e-15) break;
  }

  BenchmarkResult r;
  r.name = "coordination";
  r.shares = MarketShares{best_l, best_a}.clamped();
  r.prices = prices_from_shares(model, r.shares);
  r.u_sl = r.prices.p_l * r.shares.eta_l;
  r.u_db = r.prices.p_a * r.shares.eta_a;
  r.network_profit = r.u_sl + r.u_db;
  return r;
}

BenchmarkResult noncooperation_benchmark(const ExternalityModel& model, double tol) {
  const PureInfoOptimum opt = pure_info_optimum(model, tol);
  BenchmarkResult r;
  r.name = "noncooperation";
  r.shares = {0.0, opt.eta_a};
  r.prices = {0.0, opt.p_a};
  r.u_sl = 0.0;
  r.u_db = opt.profit;
  r.network_profit = opt.profit;
  return r;
}

BenchmarkResult third_party_benchmark(const ExternalityModel& model, double delta_3p, double tol,
                                      int max_iter) {
  if (!(delta_3p >= 0.0 && delta_3p < 1.0)) {
    throw std::invalid_argument("third-party cut must lie in [0,1)");
  }
  const NashEquilibrium eq = solve_mscg(model, RevenueSplit::third_party(delta_3p), tol, max_iter);
  BenchmarkResult r;
  r.name = "third_party";
  r.shares = eq.shares;
  r.prices = eq.prices;
  r.u_sl = eq.payoffs.u_sl;
  r.u_db = eq.payoffs.u_db;
  r.network_profit = r.u_sl + r.u_db;
  r.outside_cut = delta_3p * eq.prices.p_l * eq.shares.eta_l;
  r.reconstructed = true;
  r.unique = eq.unique;
  return r;
}

}  // namespace hysim
