#pragma once

#include <string>

#include "hysim/bargaining.hpp"
#include "hysim/externality.hpp"
#include "hysim/market.hpp"
#include "hysim/pricing.hpp"

namespace hysim {

struct BenchmarkResult {
  std::string name;  // coordination, noncooperation, third_party
  MarketShares shares;
  PriceVector prices;
  double network_profit = 0.0;  // u_sl + u_db
  double u_sl = 0.0;
  double u_db = 0.0;
  double outside_cut = 0.0;     // revenue leaving the network (third party only)
  bool reconstructed = false;   // scheme not fully specified by the source model
  bool unique = true;
};

/// Aggregate profit p_l eta_l + p_a eta_a at the inverse-map prices.
double network_profit(const ExternalityModel& model, const MarketShares& shares);

/// Joint maximum of the aggregate profit over the share simplex.
BenchmarkResult coordination_benchmark(const ExternalityModel& model, double tol = 1e-10);

/// Database alone in a pure information market; the licensee earns nothing.
BenchmarkResult noncooperation_benchmark(const ExternalityModel& model, double tol = 1e-10);

/// Licensee sells through an outside platform keeping 1 - delta_3p of its
/// revenue; the database earns only from information.
BenchmarkResult third_party_benchmark(const ExternalityModel& model, double delta_3p,
                                      double tol = 1e-8, int max_iter = 500);

}  // namespace hysim
