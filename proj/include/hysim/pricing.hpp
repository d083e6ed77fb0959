#pragma once

#include <optional>
#include <vector>

#include "hysim/externality.hpp"
#include "hysim/market.hpp"

namespace hysim {

struct PayoffPair {
  double u_sl = 0.0;  // licensee
  double u_db = 0.0;  // database
};

/// How leasing revenue p_l * eta_l is divided: the licensee keeps
/// `licensee_keep`, the database receives `database_cut`. Under the revenue
/// sharing scheme these are (1 - delta, delta); with a third-party platform
/// the cut leaves the network, (1 - delta_3p, 0).
struct RevenueSplit {
  double licensee_keep = 1.0;
  double database_cut = 0.0;

  static RevenueSplit revenue_sharing(double delta);
  static RevenueSplit third_party(double delta_3p);
};

struct NashEquilibrium {
  MarketShares shares;
  PriceVector prices;
  PayoffPair payoffs;
  MarketShares lower_iterate;
  MarketShares upper_iterate;
  double bracket_gap = 0.0;
  int iterations = 0;
  /// False when the two bracket limits stay apart (multiple equilibria);
  /// `shares` then holds the lower limit.
  bool unique = true;
  std::vector<MarketShares> lower_trace;  // after each round, starting point first
  std::vector<MarketShares> upper_trace;
  /// Distance between `shares` and the user-choice equilibrium at `prices`;
  /// filled by pcg_equilibrium, nullopt if that solve failed.
  std::optional<double> market_roundtrip_error;
};

struct NeUniquenessReport {
  double licensee_margin = 0.0;  // min of -d2U/d(-l)^2 - d2U/d(-l)da  over the grid
  double database_margin = 0.0;  // min of -d2V/da^2 - d2V/da d(-l)
  MarketShares licensee_worst;
  MarketShares database_worst;
  int evaluated_points = 0;
  int skipped_points = 0;  // stencil leaves the simplex
  bool curvature_pass = true;
  /// Linear family only: R_L - alpha1 - beta1 > beta2.
  std::optional<bool> linear_condition;

  bool passed() const { return curvature_pass && linear_condition.value_or(true); }
};

struct DeviationGain {
  double licensee = 0.0;
  double database = 0.0;
};

/// Prices that make `shares` the interior user-choice equilibrium:
/// p_a = eta_b * g(eta_a), p_l = p_a + (1 - eta_l) (R_L - f(1 - eta_l) - g(eta_a)).
PriceVector prices_from_shares(const ExternalityModel& model, const MarketShares& shares);

PayoffPair payoffs_mscg(const ExternalityModel& model, const MarketShares& shares, double delta);
PayoffPair payoffs_split(const ExternalityModel& model, const MarketShares& shares,
                         const RevenueSplit& split);

double best_response_sl(const ExternalityModel& model, double eta_a, double delta,
                        double tol = 1e-8);
double best_response_db(const ExternalityModel& model, double eta_l, double delta,
                        double tol = 1e-8);
double best_response_sl(const ExternalityModel& model, double eta_a, const RevenueSplit& split,
                        double tol = 1e-8);
double best_response_db(const ExternalityModel& model, double eta_l, const RevenueSplit& split,
                        double tol = 1e-8);

/// Round-robin best responses from both extremal corners of the strategy
/// lattice ordered by (eta_a, -eta_l).
NashEquilibrium solve_mscg(const ExternalityModel& model, double delta, double tol = 1e-8,
                           int max_iter = 500);
NashEquilibrium solve_mscg(const ExternalityModel& model, const RevenueSplit& split,
                           double tol = 1e-8, int max_iter = 500);

NeUniquenessReport check_ne_uniqueness(const ExternalityModel& model, double delta,
                                       int grid_n = 51, double tol = 1e-6);

bool linear_uniqueness_condition(const LinearParams& params, double leasing_utility);

/// solve_mscg mapped back to prices, with a user-choice round-trip check.
NashEquilibrium pcg_equilibrium(const ExternalityModel& model, double delta, double tol = 1e-8,
                                int max_iter = 500);

/// Largest unilateral payoff improvement on a uniform deviation grid.
DeviationGain deviation_gain(const ExternalityModel& model, const MarketShares& shares,
                             const RevenueSplit& split, int grid_n = 1000);

}  // namespace hysim
