#pragma once

#include <vector>

#include "hysim/externality.hpp"

namespace hysim {

/// Leasing and advanced shares; the basic share is 1 - eta_l - eta_a.
struct MarketShares {
  double eta_l = 0.0;
  double eta_a = 0.0;

  double eta_b() const { return 1.0 - eta_l - eta_a; }
  /// Projects onto {eta_l, eta_a >= 0, eta_l + eta_a <= 1}.
  MarketShares clamped() const;
  bool on_simplex(double tol = 0.0) const;
};

/// Licensee channel price and database information price.
struct PriceVector {
  double p_l = 0.0;
  double p_a = 0.0;
};

/// Indifference types: leasing vs basic, advanced vs basic, leasing vs advanced.
struct Thresholds {
  double theta_lb = 0.0;
  double theta_ab = 0.0;
  double theta_la = 0.0;
};

struct DynamicsTrace {
  std::vector<MarketShares> shares;  // shares[0] is the start point
  std::vector<MarketShares> deltas;  // applied step per slot
  bool converged = false;
  double residual = 0.0;             // sup-norm of derived_shares(x) - x at the last point

  int steps() const { return static_cast<int>(deltas.size()); }
};

enum class EquilibriumCase { A, B };

struct MarketEquilibrium {
  MarketShares shares;
  EquilibriumCase equilibrium_case = EquilibriumCase::B;
  double residual = 0.0;
  /// Set when more than one market equilibrium exists at these prices.
  bool multiplicity_warning = false;
  std::vector<MarketShares> all_equilibria;
};

struct MeUniquenessReport {
  double worst_lhs = 0.0;        // max of (g'/g) (R_L - S_B) / (R_L - S_A) over the grid
  MarketShares worst_location;
  bool worst_at_boundary = false;  // worst point lies on the smallest eta_a grid line
  bool forall_pass = true;
  bool exists_pass = false;
  int excluded_points = 0;       // points with g(eta_a) = 0
  int evaluated_points = 0;

  bool passed() const { return forall_pass; }
};

Thresholds thresholds(const ExternalityModel& model, const PriceVector& prices,
                      const MarketShares& shares0);

/// One synchronous best-response step of the whole user population with the
/// utilities frozen at shares0. Ties go to the cheaper service.
MarketShares derived_shares(const ExternalityModel& model, const PriceVector& prices,
                            const MarketShares& shares0);

/// Damped synchronous dynamics x <- x + damping * (derived_shares(x) - x).
DynamicsTrace iterate_dynamics(const ExternalityModel& model, const PriceVector& prices,
                               const MarketShares& shares0, double tol = 1e-10,
                               int max_iter = 100000, double damping = 0.5);

/// All market equilibria at fixed prices; returns the one the damped dynamics
/// reach from (0,0) and flags multiplicity. Throws NonConvergenceError if no
/// fixed point with residual <= tol is found.
MarketEquilibrium solve_equilibrium(const ExternalityModel& model, const PriceVector& prices,
                                    double tol = 1e-10);

/// Sufficient uniqueness condition of the user-choice equilibrium on the
/// feasible grid {i/(n-1), j/(n-1)}.
MeUniquenessReport check_me_uniqueness(const ExternalityModel& model, int grid_n = 101);

/// Market with only basic and advanced service: eta_a = clip(1 - p_a / g(eta_a)).
/// Returns the smallest fixed point (the limit of the dynamics from eta_a = 0).
MarketShares pure_info_equilibrium(const ExternalityModel& model, double p_a,
                                   double tol = 1e-12);

}  // namespace hysim
