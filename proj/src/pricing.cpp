#include "hysim/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hysim/errors.hpp"
#include "hysim/optimize.hpp"

namespace hysim {

namespace {

constexpr int kCoarseGrid = 256;

double sup_distance(const MarketShares& a, const MarketShares& b) {
  return std::max(std::abs(a.eta_l - b.eta_l), std::abs(a.eta_a - b.eta_a));
}

// Leasing revenue p_l * eta_l before the split.
double leasing_revenue(const ExternalityModel& model, double eta_l, double eta_a) {
  return prices_from_shares(model, {eta_l, eta_a}).p_l * eta_l;
}

double database_payoff(const ExternalityModel& model, double eta_l, double eta_a,
                       const RevenueSplit& split) {
  const auto p = prices_from_shares(model, {eta_l, eta_a});
  return p.p_a * eta_a + split.database_cut * p.p_l * eta_l;
}

void check_delta(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0,1]");
}

}  // namespace

RevenueSplit RevenueSplit::revenue_sharing(double delta) {
  check_delta(delta);
  return {1.0 - delta, delta};
}

RevenueSplit RevenueSplit::third_party(double delta_3p) {
  check_delta(delta_3p);
  return {1.0 - delta_3p, 0.0};
}

PriceVector prices_from_shares(const ExternalityModel& model, const MarketShares& shares) {
  const double eta_l = shares.eta_l;
  const double eta_a = shares.eta_a;
  const double gv = model.g(eta_a);
  const double p_a = std::max((1.0 - eta_l - eta_a) * gv, 0.0);
  const double p_l =
      std::max((1.0 - eta_l) * (model.leasing_utility() - model.f(1.0 - eta_l) - gv) + p_a, 0.0);
  return {p_l, p_a};
}

PayoffPair payoffs_split(const ExternalityModel& model, const MarketShares& shares,
                         const RevenueSplit& split) {
  const auto p = prices_from_shares(model, shares);
  const double revenue = p.p_l * shares.eta_l;
  return {revenue * split.licensee_keep, p.p_a * shares.eta_a + revenue * split.database_cut};
}

PayoffPair payoffs_mscg(const ExternalityModel& model, const MarketShares& shares, double delta) {
  return payoffs_split(model, shares, RevenueSplit::revenue_sharing(delta));
}

double best_response_sl(const ExternalityModel& model, double eta_a, const RevenueSplit& split,
                        double tol) {
  const double hi = std::max(1.0 - eta_a, 0.0);
  if (split.licensee_keep > 0.0) {
    // Positive scaling leaves the argmax unchanged, so maximize raw revenue.
    return maximize_1d([&](double l) { return leasing_revenue(model, l, eta_a); }, 0.0, hi, tol,
                       kCoarseGrid)
        .x;
  }
  // Licensee indifferent: pick the share that is best for the database.
  return maximize_1d([&](double l) { return database_payoff(model, l, eta_a, split); }, 0.0, hi,
                     tol, kCoarseGrid)
      .x;
}

double best_response_db(const ExternalityModel& model, double eta_l, const RevenueSplit& split,
                        double tol) {
  const double hi = std::max(1.0 - eta_l, 0.0);
  return maximize_1d([&](double a) { return database_payoff(model, eta_l, a, split); }, 0.0, hi,
                     tol, kCoarseGrid)
      .x;
}

double best_response_sl(const ExternalityModel& model, double eta_a, double delta, double tol) {
  return best_response_sl(model, eta_a, RevenueSplit::revenue_sharing(delta), tol);
}

double best_response_db(const ExternalityModel& model, double eta_l, double delta, double tol) {
  return best_response_db(model, eta_l, RevenueSplit::revenue_sharing(delta), tol);
}

NashEquilibrium solve_mscg(const ExternalityModel& model, const RevenueSplit& split, double tol,
                           int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_mscg tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("solve_mscg needs max_iter >= 1");
  const double br_tol = tol * 1e-2;

  NashEquilibrium eq;
  MarketShares lower{1.0, 0.0};
  MarketShares upper{0.0, 1.0};
  eq.lower_trace.push_back(lower);
  eq.upper_trace.push_back(upper);

  auto round = [&](MarketShares x) {
    x.eta_l = best_response_sl(model, x.eta_a, split, br_tol);
    x.eta_a = best_response_db(model, x.eta_l, split, br_tol);
    return x;
  };

  for (int it = 0; it < max_iter; ++it) {
    const MarketShares next_lower = round(lower);
    const MarketShares next_upper = round(upper);
    const double moved = std::max(sup_distance(next_lower, lower), sup_distance(next_upper, upper));
    lower = next_lower;
    upper = next_upper;
    eq.lower_trace.push_back(lower);
    eq.upper_trace.push_back(upper);
    eq.iterations = it + 1;
    eq.bracket_gap = sup_distance(lower, upper);
    if (eq.bracket_gap <= tol) break;
    if (moved <= 1e-14) break;  // both limits reached and still apart
  }

  eq.lower_iterate = lower;
  eq.upper_iterate = upper;
  eq.unique = eq.bracket_gap <= tol;
  eq.shares = eq.unique ? MarketShares{0.5 * (lower.eta_l + upper.eta_l),
                                       0.5 * (lower.eta_a + upper.eta_a)}
                        : lower;
  eq.prices = prices_from_shares(model, eq.shares);
  eq.payoffs = payoffs_split(model, eq.shares, split);
  return eq;
}

NashEquilibrium solve_mscg(const ExternalityModel& model, double delta, double tol,
                           int max_iter) {
  return solve_mscg(model, RevenueSplit::revenue_sharing(delta), tol, max_iter);
}

bool linear_uniqueness_condition(const LinearParams& params, double leasing_utility) {
  return leasing_utility - params.alpha1 - params.beta1 > params.beta2;
}

NeUniquenessReport check_ne_uniqueness(const ExternalityModel& model, double delta, int grid_n,
                                       double tol) {
  if (grid_n < 3) throw std::invalid_argument("check_ne_uniqueness needs grid_n >= 3");
  const RevenueSplit split = RevenueSplit::revenue_sharing(delta);
  auto u_sl = [&](double l, double a) { return payoffs_split(model, {l, a}, split).u_sl; };
  auto u_db = [&](double l, double a) { return payoffs_split(model, {l, a}, split).u_db; };

  constexpr double h = 1e-4;
  auto d_ll = [&](auto&& u, double l, double a) {
    return (u(l + h, a) - 2.0 * u(l, a) + u(l - h, a)) / (h * h);
  };
  auto d_aa = [&](auto&& u, double l, double a) {
    return (u(l, a + h) - 2.0 * u(l, a) + u(l, a - h)) / (h * h);
  };
  auto d_la = [&](auto&& u, double l, double a) {
    return (u(l + h, a + h) - u(l + h, a - h) - u(l - h, a + h) + u(l - h, a - h)) / (4.0 * h * h);
  };

  NeUniquenessReport report;
  report.licensee_margin = std::numeric_limits<double>::infinity();
  report.database_margin = std::numeric_limits<double>::infinity();
  const int last = grid_n - 1;
  for (int i = 1; i < last; ++i) {
    for (int j = 1; i + j < last; ++j) {
      const double l = static_cast<double>(i) / last;
      const double a = static_cast<double>(j) / last;
      if (l - h < 0.0 || a - h < 0.0 || l + a + 2.0 * h > 1.0) {
        ++report.skipped_points;
        continue;
      }
      ++report.evaluated_points;
      // With s = -eta_l: d2/ds2 = d2/dl2 and d2/(ds da) = -d2/(dl da).
      const double sl_margin = -d_ll(u_sl, l, a) + d_la(u_sl, l, a);
      const double db_margin = -d_aa(u_db, l, a) + d_la(u_db, l, a);
      if (sl_margin < report.licensee_margin) {
        report.licensee_margin = sl_margin;
        report.licensee_worst = {l, a};
      }
      if (db_margin < report.database_margin) {
        report.database_margin = db_margin;
        report.database_worst = {l, a};
      }
    }
  }
  if (report.evaluated_points == 0) {
    report.licensee_margin = report.database_margin = 0.0;
  }
  report.curvature_pass = report.licensee_margin >= -tol && report.database_margin >= -tol;
  if (const auto* p = std::get_if<LinearParams>(&model.params())) {
    report.linear_condition = linear_uniqueness_condition(*p, model.leasing_utility());
  }
  return report;
}

NashEquilibrium pcg_equilibrium(const ExternalityModel& model, double delta, double tol,
                                int max_iter) {
  NashEquilibrium eq = solve_mscg(model, delta, tol, max_iter);
  try {
    const auto me = solve_equilibrium(model, eq.prices);
    eq.market_roundtrip_error = sup_distance(me.shares, eq.shares);
  } catch (const Error&) {
    eq.market_roundtrip_error.reset();
  }
  return eq;
}

DeviationGain deviation_gain(const ExternalityModel& model, const MarketShares& shares,
                             const RevenueSplit& split, int grid_n) {
  const PayoffPair base = payoffs_split(model, shares, split);
  DeviationGain gain;
  const double l_hi = std::max(1.0 - shares.eta_a, 0.0);
  const double a_hi = std::max(1.0 - shares.eta_l, 0.0);
  for (int i = 0; i < grid_n; ++i) {
    const double t = grid_n > 1 ? static_cast<double>(i) / (grid_n - 1) : 0.0;
    const double l = t * l_hi;
    const double a = t * a_hi;
    gain.licensee =
        std::max(gain.licensee, payoffs_split(model, {l, shares.eta_a}, split).u_sl - base.u_sl);
    gain.database =
        std::max(gain.database, payoffs_split(model, {shares.eta_l, a}, split).u_db - base.u_db);
  }
  return gain;
}

}  // namespace hysim
