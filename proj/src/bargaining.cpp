#include "hysim/bargaining.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hysim/errors.hpp"
#include "hysim/optimize.hpp"
#include "hysim/parallel.hpp"

namespace hysim {

Pairing parse_pairing(const std::string& name) {
  if (name == "own") return Pairing::own;
  if (name == "as_printed") return Pairing::as_printed;
  throw ConfigError("unknown bargaining pairing '" + name + "' (expected own or as_printed)");
}

std::string_view to_string(Pairing pairing) {
  return pairing == Pairing::own ? "own" : "as_printed";
}

PureInfoOptimum pure_info_optimum(const ExternalityModel& model, double tol) {
  auto profit = [&](double y) { return (1.0 - y) * model.g(y) * y; };
  const Maximum m = maximize_1d(profit, 0.0, 1.0, tol, 1024);
  PureInfoOptimum out;
  out.eta_a = m.x;
  out.p_a = (1.0 - m.x) * model.g(m.x);
  out.profit = std::max(m.value, 0.0);
  return out;
}

PayoffPair disagreement_points(const ExternalityModel& model, double tol) {
  return {0.0, pure_info_optimum(model, tol).profit};
}

double NashFactors::objective() const {
  if (database >= 0.0 && licensee >= 0.0) return database * licensee;
  const double violation = std::min(database, 0.0) + std::min(licensee, 0.0);
  return violation - std::abs(database * licensee);
}

NashFactors nash_factors(const PayoffPair& payoffs, const PayoffPair& disagreement,
                         Pairing pairing) {
  if (pairing == Pairing::own) {
    return {payoffs.u_db - disagreement.u_db, payoffs.u_sl - disagreement.u_sl};
  }
  return {payoffs.u_db - disagreement.u_sl, payoffs.u_sl - disagreement.u_db};
}

namespace {

struct Evaluation {
  double delta = 0.0;
  NashEquilibrium equilibrium;
  NashFactors factors;
};

Evaluation evaluate(const ExternalityModel& model, double delta, const PayoffPair& disagreement,
                    const BargainingOptions& options) {
  Evaluation e;
  e.delta = delta;
  e.equilibrium = solve_mscg(model, delta, options.solver_tol, options.max_iter);
  e.factors = nash_factors(e.equilibrium.payoffs, disagreement, options.pairing);
  return e;
}

BargainingOutcome report(const Evaluation& e, const PayoffPair& disagreement, bool feasible) {
  BargainingOutcome out;
  out.delta_star = e.delta;
  out.payoffs = e.equilibrium.payoffs;
  out.disagreement = disagreement;
  out.nash_product = e.factors.product();
  out.feasible = feasible;
  out.equilibrium = e.equilibrium;
  out.w_equiv = equivalent_wholesale_price(e.delta, e.equilibrium);
  out.revenue_transfer = e.delta * e.equilibrium.prices.p_l * e.equilibrium.shares.eta_l;
  if (!feasible) out.flags.emplace_back("infeasible");
  if (!e.equilibrium.unique) out.flags.emplace_back("multiple_equilibria");
  return out;
}

}  // namespace

double nash_objective(const ExternalityModel& model, double delta,
                      const BargainingOptions& options, NashEquilibrium* equilibrium) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0,1]");
  const PayoffPair disagreement = disagreement_points(model);
  Evaluation e = evaluate(model, delta, disagreement, options);
  if (equilibrium) *equilibrium = std::move(e.equilibrium);
  return e.factors.objective();
}

BargainingOutcome solve_bargaining(const ExternalityModel& model,
                                   const BargainingOptions& options) {
  if (options.grid_n < 11) throw std::invalid_argument("bargaining grid needs at least 11 points");
  if (!(options.tol > 0.0)) throw std::invalid_argument("bargaining tolerance must be positive");
  const PayoffPair disagreement = disagreement_points(model);
  const int n = options.grid_n;

  std::vector<Evaluation> grid(n);
  parallel_for(n, [&](std::size_t i) {
    grid[i] = evaluate(model, static_cast<double>(i) / (n - 1), disagreement, options);
  });

  const double ftol = options.feasibility_tol;
  int best = -1;
  for (int i = 0; i < n; ++i) {
    if (!grid[i].factors.feasible(ftol)) continue;
    if (best < 0 || grid[i].factors.objective() > grid[best].factors.objective()) best = i;
  }

  if (best < 0) {
    // No feasible share: report the maximizer of the raw product.
    int raw = 0;
    for (int i = 1; i < n; ++i) {
      if (grid[i].factors.product() > grid[raw].factors.product()) raw = i;
    }
    return report(grid[raw], disagreement, false);
  }

  const double lo = static_cast<double>(std::max(best - 1, 0)) / (n - 1);
  const double hi = static_cast<double>(std::min(best + 1, n - 1)) / (n - 1);
  auto objective = [&](double d) {
    return evaluate(model, d, disagreement, options).factors.objective();
  };
  const Maximum refined = detail::golden_section(objective, lo, hi, options.tol);
  Evaluation winner = grid[best];
  if (refined.value > winner.factors.objective()) {
    Evaluation cand = evaluate(model, refined.x, disagreement, options);
    if (cand.factors.feasible(ftol)) winner = std::move(cand);
  }
  return report(winner, disagreement, true);
}

BargainingOutcome fixed_share_outcome(const ExternalityModel& model, double delta,
                                      const BargainingOptions& options) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0,1]");
  const PayoffPair disagreement = disagreement_points(model);
  const Evaluation e = evaluate(model, delta, disagreement, options);
  return report(e, disagreement, e.factors.feasible(options.feasibility_tol));
}

double equivalent_wholesale_price(double delta_star, const NashEquilibrium& equilibrium) {
  return delta_star * equilibrium.shares.eta_l;
}

}  // namespace hysim
