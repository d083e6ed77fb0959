#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hysim/externality.hpp"
#include "hysim/market.hpp"

namespace hysim {

/// Nonnegative interference distribution.
struct DistributionSpec {
  enum class Kind { point, uniform, exponential, lognormal };
  Kind kind = Kind::point;
  double a = 0.0;  // point value, uniform low, exponential mean, lognormal mu
  double b = 0.0;  // uniform high, lognormal sigma

  static DistributionSpec point(double v) { return {Kind::point, v, 0.0}; }
  static DistributionSpec uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
  static DistributionSpec exponential(double mean) { return {Kind::exponential, mean, 0.0}; }
  static DistributionSpec lognormal(double mu, double sigma) {
    return {Kind::lognormal, mu, sigma};
  }

  /// Throws DistributionError on a negative support or invalid parameters.
  void validate() const;
  double sample(std::mt19937_64& rng) const;
};

enum class UtilityKind { power, log1p };
enum class CountMode { expected, rounded, poisson };

struct InterferenceModel {
  int users = 100;   // N
  int channels = 10; // K
  DistributionSpec dist_L = DistributionSpec::exponential(1.0);
  DistributionSpec dist_W = DistributionSpec::exponential(0.05);
  DistributionSpec dist_I = DistributionSpec::exponential(0.2);
  double power = 10.0;        // P
  double noise = 0.1;         // n0
  UtilityKind utility = UtilityKind::log1p;
  double rho = 1.0;           // exponent for UtilityKind::power
  long samples = 100000;
  std::uint64_t seed = 42;
  int batches = 16;
  CountMode count_mode = CountMode::expected;

  void validate() const;
  double rate(double interference) const;
  double utility_of(double rate) const;
  double utility_slope(double rate) const;
};

struct InfoValueEstimate {
  double s_b = 0.0;
  double ci_b = 0.0;
  double s_a = 0.0;
  double ci_a = 0.0;
  double g_est = 0.0;  // s_a - s_b

  double ci_g() const { return ci_a + ci_b; }
};

/// Monte Carlo utilities of a basic user (random channel) and an advanced user
/// (channel of least known interference) at the given shares. Half-widths are
/// 95% normal intervals. Sample streams depend only on (seed, batch), so runs
/// at different shares use common random numbers.
InfoValueEstimate simulate_info_value(const InterferenceModel& imodel,
                                      const MarketShares& shares);

struct MonotoneStats {
  double max_violation = 0.0;     // largest raw step against the assumed direction
  double within_ci_fraction = 1.0;  // share of steps whose violation is <= joint CI
};

struct DerivedExternality {
  explicit DerivedExternality(ExternalityModel m) : model(std::move(m)) {}

  ExternalityModel model;
  std::vector<double> x_grid, f_raw, f_ci, f_smooth;
  std::vector<double> y_grid, g_raw, g_ci, g_smooth;
  MonotoneStats f_stats;
  MonotoneStats g_stats;
  double separability_residual = 0.0;  // max |S_A - f - g| over the probe grid
  double shape_tol = 0.0;
  double leasing_utility = 0.0;
};

/// Tabulates f(x) = s_b at shares (1 - x, 0) and g(y) = s_a - s_b at
/// (ref_eta_l, y), smooths both with weighted isotonic regression and builds a
/// montecarlo-tagged table model. A y grid ending below 1 is extended flat.
/// Without R_L the leasing utility is 1.25 (max f + max g).
DerivedExternality derive_externality(const InterferenceModel& imodel,
                                      const std::vector<double>& x_grid,
                                      const std::vector<double>& y_grid, double ref_eta_l,
                                      std::optional<double> leasing_utility = std::nullopt);

std::string_view to_string(CountMode mode);
std::string_view to_string(UtilityKind kind);

}  // namespace hysim
