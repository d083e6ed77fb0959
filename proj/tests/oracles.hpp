// Independent reference computations for the test suite. Nothing here calls
// into the solver code beyond ExternalityModel evaluation.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "hysim/externality.hpp"
#include "hysim/market.hpp"

namespace oracle {

/// Shares chosen by `types` users with evaluation factors at cell midpoints,
/// each picking the best of basic (theta S_B), advanced (theta S_A - p_a) and
/// leasing (theta R_L - p_l). Ties go to the cheaper service: basic, then
/// advanced, then leasing.
inline hysim::MarketShares theta_grid_shares(const hysim::ExternalityModel& model,
                                             const hysim::PriceVector& prices,
                                             const hysim::MarketShares& frozen,
                                             long types = 1000000) {
  const double sb = model.f(1.0 - frozen.eta_l);
  const double sa = sb + model.g(frozen.eta_a);
  const double rl = model.leasing_utility();
  long n_l = 0;
  long n_a = 0;
  for (long i = 0; i < types; ++i) {
    const double theta = (static_cast<double>(i) + 0.5) / static_cast<double>(types);
    const double ub = theta * sb;
    const double ua = theta * sa - prices.p_a;
    const double ul = theta * rl - prices.p_l;
    const bool basic_ok = ub >= ua && ub >= ul;
    if (basic_ok) continue;
    if (ua >= ul) {
      ++n_a;
    } else {
      ++n_l;
    }
  }
  const auto d = static_cast<double>(types);
  return {static_cast<double>(n_l) / d, static_cast<double>(n_a) / d};
}

struct GridMax {
  double x = 0.0;
  double y = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

/// Exhaustive maximum of fn over n + 1 equally spaced points of [lo, hi].
inline GridMax grid_max_1d(const std::function<double(double)>& fn, double lo, double hi, long n) {
  GridMax best;
  for (long i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    const double v = fn(x);
    if (v > best.value) best = {x, 0.0, v};
  }
  return best;
}

/// Exhaustive maximum over the simplex grid {(i/n, j/n) : i + j <= n}.
inline GridMax grid_max_simplex(const std::function<double(double, double)>& fn, long n) {
  GridMax best;
  for (long i = 0; i <= n; ++i) {
    for (long j = 0; i + j <= n; ++j) {
      const double x = static_cast<double>(i) / static_cast<double>(n);
      const double y = static_cast<double>(j) / static_cast<double>(n);
      const double v = fn(x, y);
      if (v > best.value) best = {x, y, v};
    }
  }
  return best;
}

/// Closed forms of the constant model f == f0, g == g0 at R_L.
struct ConstantModel {
  double f0;
  double g0;
  double rl;

  /// User-choice equilibrium at prices: eta_l = 1 - (p_l - p_a)/(R_L - f0 - g0),
  /// eta_a = (p_l - p_a)/(R_L - f0 - g0) - p_a/g0 (interior case).
  hysim::MarketShares equilibrium(double p_l, double p_a) const {
    const double t_la = (p_l - p_a) / (rl - f0 - g0);
    return {1.0 - t_la, t_la - p_a / g0};
  }
};

/// Random externality model from one of the three analytic families.
struct RandomModel {
  std::string family;
  hysim::ExternalityModel model;
};

inline RandomModel random_model(std::mt19937_64& rng, int which) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (which % 3) {
    case 0: {
      hysim::PowerParams p;
      p.beta1 = 0.2 + 0.8 * u(rng);
      p.alpha1 = p.beta1 + 0.2 + u(rng);
      p.gamma1 = 0.3 + 0.7 * u(rng);
      p.alpha2 = 0.1 + u(rng);
      p.beta2 = p.alpha2 + 0.05 + 0.5 * u(rng);
      p.gamma2 = 0.3 + 0.7 * u(rng);
      const double rl = p.alpha1 + p.beta2 + 0.5 + 5.0 * u(rng);
      return {"power", hysim::make_power_family(p, rl)};
    }
    case 1: {
      hysim::LinearParams p;
      p.beta1 = 0.1 + 0.8 * u(rng);
      p.alpha1 = p.beta1 + 0.2 + u(rng);
      p.beta2 = 0.1 + 0.8 * u(rng);
      const double rl = p.alpha1 + p.beta2 + 0.5 + 5.0 * u(rng);
      return {"linear", hysim::make_linear_family(p, rl)};
    }
    default: {
      const double f0 = 0.2 + 1.5 * u(rng);
      const double g0 = 0.05 + u(rng);
      const double rl = f0 + g0 + 0.5 + 5.0 * u(rng);
      return {"constant", hysim::make_constant_model(f0, g0, rl)};
    }
  }
}

}  // namespace oracle
