#pragma once

#include <string>
#include <vector>

#include "hysim/externality.hpp"
#include "hysim/pricing.hpp"

namespace hysim {

/// How the Nash product pairs payoffs with disagreement points.
/// own:        (U_DB - U_DB0) (U_SL - U_SL0)
/// as_printed: (U_DB - U_SL0) (U_SL - U_DB0)
enum class Pairing { own, as_printed };

Pairing parse_pairing(const std::string& name);
std::string_view to_string(Pairing pairing);

/// Pure information market optimum of the database: max over y of (1 - y) g(y) y.
struct PureInfoOptimum {
  double eta_a = 0.0;
  double p_a = 0.0;
  double profit = 0.0;
};

PureInfoOptimum pure_info_optimum(const ExternalityModel& model, double tol = 1e-10);

/// (U_SL0, U_DB0) = (0, pure-information profit). Independent of R_L.
PayoffPair disagreement_points(const ExternalityModel& model, double tol = 1e-10);

struct BargainingOptions {
  Pairing pairing = Pairing::own;
  int grid_n = 101;
  double tol = 1e-6;          // on delta
  double solver_tol = 1e-8;   // Layer II bracket tolerance
  int max_iter = 500;
  double feasibility_tol = 1e-9;
};

/// Participation margins at a Layer II outcome, paired per `pairing`.
struct NashFactors {
  double database = 0.0;
  double licensee = 0.0;

  bool feasible(double tol) const { return database >= -tol && licensee >= -tol; }
  double product() const { return database * licensee; }
  /// The product when both margins are nonnegative; otherwise strictly
  /// negative and decreasing in the total violation.
  double objective() const;
};

NashFactors nash_factors(const PayoffPair& payoffs, const PayoffPair& disagreement,
                         Pairing pairing);

/// Nash objective at the Layer II equilibrium induced by delta. When
/// `equilibrium` is non-null the solved equilibrium is stored there.
double nash_objective(const ExternalityModel& model, double delta,
                      const BargainingOptions& options = {},
                      NashEquilibrium* equilibrium = nullptr);

struct BargainingOutcome {
  double delta_star = 0.0;
  PayoffPair payoffs;
  PayoffPair disagreement;
  double nash_product = 0.0;
  double w_equiv = 0.0;
  double revenue_transfer = 0.0;  // delta* p_l* eta_l*
  bool feasible = false;
  NashEquilibrium equilibrium;
  std::vector<std::string> flags;  // "infeasible", "multiple_equilibria"
};

BargainingOutcome solve_bargaining(const ExternalityModel& model,
                                   const BargainingOptions& options = {});

/// Outcome at a fixed revenue share, with the same reporting as solve_bargaining.
BargainingOutcome fixed_share_outcome(const ExternalityModel& model, double delta,
                                      const BargainingOptions& options = {});

/// w = delta* eta_l*.
double equivalent_wholesale_price(double delta_star, const NashEquilibrium& equilibrium);

}  // namespace hysim
