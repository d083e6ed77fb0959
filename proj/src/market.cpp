#include "hysim/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hysim/errors.hpp"
#include "hysim/optimize.hpp"

namespace hysim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Threshold share map without the simplex precondition, so that the 1-D
// reduction below may probe (eta_l, eta_a) pairs that sum above one.
MarketShares derive(const ExternalityModel& model, const PriceVector& prices, double eta_l,
                    double eta_a) {
  const double rl = model.leasing_utility();
  const double sb = model.f(1.0 - eta_l);
  const double gv = model.g(eta_a);
  const double sa = sb + gv;
  if (!(rl > sa)) {
    std::ostringstream msg;
    msg << "R_L = " << rl << " does not exceed S_A = " << sa << " at shares (" << eta_l << ", "
        << eta_a << ")";
    throw DegenerateModelError(msg.str());
  }
  const double theta_lb = prices.p_l / (rl - sb);
  const double theta_la = std::max((prices.p_l - prices.p_a) / (rl - sa), 0.0);
  MarketShares out;
  out.eta_l = std::max(1.0 - std::max(theta_la, theta_lb), 0.0);
  // Worthless information: advanced and basic tie for every type and the tie
  // goes to the free service.
  if (gv > 0.0) {
    const double theta_ab = prices.p_a / gv;
    out.eta_a = std::max(std::min(theta_la, 1.0) - theta_ab, 0.0);
  }
  return out.clamped();
}

double sup_distance(const MarketShares& a, const MarketShares& b) {
  return std::max(std::abs(a.eta_l - b.eta_l), std::abs(a.eta_a - b.eta_a));
}

// Fixed point of the leasing coordinate for a given advanced share. The map
// eta_l -> derive(eta_l, eta_a).eta_l is nonincreasing, so the fixed point is
// unique and bisection finds it.
double leasing_fixed_point(const ExternalityModel& model, const PriceVector& prices,
                           double eta_a) {
  return bisect_increasing(
      [&](double eta_l) { return eta_l - derive(model, prices, eta_l, eta_a).eta_l; }, 0.0, 1.0);
}

}  // namespace

MarketShares MarketShares::clamped() const {
  MarketShares s{std::clamp(eta_l, 0.0, 1.0), std::clamp(eta_a, 0.0, 1.0)};
  if (s.eta_l + s.eta_a > 1.0) s.eta_a = 1.0 - s.eta_l;
  return s;
}

bool MarketShares::on_simplex(double tol) const {
  return eta_l >= -tol && eta_a >= -tol && eta_l + eta_a <= 1.0 + tol;
}

Thresholds thresholds(const ExternalityModel& model, const PriceVector& prices,
                      const MarketShares& shares0) {
  const double rl = model.leasing_utility();
  const double sb = model.basic_utility(shares0.eta_l);
  const double gv = model.g(shares0.eta_a);
  const double sa = sb + gv;
  if (!(rl > sa)) throw DegenerateModelError("R_L does not exceed S_A at the initial shares");
  Thresholds t;
  t.theta_lb = prices.p_l / (rl - sb);
  if (gv > 0.0) {
    t.theta_ab = prices.p_a / gv;
  } else {
    t.theta_ab = prices.p_a > 0.0 ? kInf : 0.0;
  }
  t.theta_la = std::max((prices.p_l - prices.p_a) / (rl - sa), 0.0);
  return t;
}

MarketShares derived_shares(const ExternalityModel& model, const PriceVector& prices,
                            const MarketShares& shares0) {
  if (!shares0.on_simplex(1e-12)) throw std::invalid_argument("initial shares off the simplex");
  const auto s = shares0.clamped();
  return derive(model, prices, s.eta_l, s.eta_a);
}

DynamicsTrace iterate_dynamics(const ExternalityModel& model, const PriceVector& prices,
                               const MarketShares& shares0, double tol, int max_iter,
                               double damping) {
  if (!(tol > 0.0)) throw std::invalid_argument("dynamics tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("dynamics need max_iter >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0,1]");

  DynamicsTrace trace;
  MarketShares x = shares0.clamped();
  trace.shares.push_back(x);
  for (int t = 0;; ++t) {
    const MarketShares target = derive(model, prices, x.eta_l, x.eta_a);
    trace.residual = sup_distance(target, x);
    if (trace.residual <= tol) {
      trace.converged = true;
      break;
    }
    if (t == max_iter) break;
    const MarketShares next =
        MarketShares{x.eta_l + damping * (target.eta_l - x.eta_l),
                     x.eta_a + damping * (target.eta_a - x.eta_a)}
            .clamped();
    trace.deltas.push_back({next.eta_l - x.eta_l, next.eta_a - x.eta_a});
    trace.shares.push_back(next);
    x = next;
  }
  return trace;
}

MarketEquilibrium solve_equilibrium(const ExternalityModel& model, const PriceVector& prices,
                                    double tol) {
  if (prices.p_l < 0.0 || prices.p_a < 0.0) throw std::invalid_argument("prices must be >= 0");

  // Every fixed point has eta_l = leasing_fixed_point(eta_a), so equilibria are
  // the roots of the scalar gap below on [0, 1].
  auto point_at = [&](double eta_a) {
    return MarketShares{leasing_fixed_point(model, prices, eta_a), eta_a};
  };
  auto gap = [&](double eta_a) {
    const auto p = point_at(eta_a);
    return derive(model, prices, p.eta_l, p.eta_a).eta_a - eta_a;
  };

  constexpr int kScan = 512;
  std::vector<double> roots;
  double prev_x = 0.0;
  double prev_g = gap(0.0);
  if (prev_g == 0.0) roots.push_back(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double x = static_cast<double>(i) / kScan;
    const double gx = gap(x);
    if (gx == 0.0) {
      roots.push_back(x);
    } else if ((prev_g > 0.0 && gx < 0.0) || (prev_g < 0.0 && gx > 0.0)) {
      const double sign = prev_g > 0.0 ? -1.0 : 1.0;  // make the bracketed function increasing
      roots.push_back(bisect_increasing([&](double y) { return sign * gap(y); }, prev_x, x));
    }
    prev_x = x;
    prev_g = gx;
  }

  MarketEquilibrium result;
  for (double r : roots) {
    const MarketShares p = point_at(r);
    const double residual = sup_distance(derive(model, prices, p.eta_l, p.eta_a), p);
    if (residual > tol) continue;
    const bool duplicate = std::any_of(
        result.all_equilibria.begin(), result.all_equilibria.end(),
        [&](const MarketShares& q) { return sup_distance(p, q) <= 1e-9; });
    if (!duplicate) result.all_equilibria.push_back(p);
  }
  if (result.all_equilibria.empty()) {
    throw NonConvergenceError("no market equilibrium found to the requested tolerance");
  }

  std::size_t chosen = 0;
  if (result.all_equilibria.size() > 1) {
    result.multiplicity_warning = true;
    const auto trace = iterate_dynamics(model, prices, MarketShares{0.0, 0.0}, tol, 20000, 0.5);
    const MarketShares end = trace.shares.back();
    double best = kInf;
    for (std::size_t i = 0; i < result.all_equilibria.size(); ++i) {
      const double d = sup_distance(end, result.all_equilibria[i]);
      if (d < best) {
        best = d;
        chosen = i;
      }
    }
  }
  result.shares = result.all_equilibria[chosen];
  result.residual =
      sup_distance(derive(model, prices, result.shares.eta_l, result.shares.eta_a), result.shares);
  result.equilibrium_case = result.shares.eta_a > 0.0 ? EquilibriumCase::B : EquilibriumCase::A;
  return result;
}

MeUniquenessReport check_me_uniqueness(const ExternalityModel& model, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("check_me_uniqueness needs grid_n >= 2");
  MeUniquenessReport report;
  report.worst_lhs = -kInf;
  const double rl = model.leasing_utility();
  const int last = grid_n - 1;
  const double step = 1.0 / last;
  for (int i = 0; i <= last; ++i) {
    for (int j = 0; i + j <= last; ++j) {
      const double eta_l = i * step;
      const double eta_a = j * step;
      const double gv = model.g(eta_a);
      if (!(gv > 0.0)) {
        ++report.excluded_points;
        continue;
      }
      ++report.evaluated_points;
      const double sb = model.basic_utility(eta_l);
      const double sa = sb + gv;
      const double ratio = rl > sa ? (rl - sb) / (rl - sa) : kInf;
      const double gp = model.g_prime(eta_a);
      const double lhs = gp == 0.0 ? 0.0 : gp / gv * ratio;
      if (lhs <= 1.0) report.exists_pass = true;
      if (lhs > report.worst_lhs) {
        report.worst_lhs = lhs;
        report.worst_location = {eta_l, eta_a};
      }
    }
  }
  if (report.evaluated_points == 0) report.worst_lhs = 0.0;
  report.forall_pass = report.worst_lhs <= 1.0;
  report.worst_at_boundary = report.worst_location.eta_a <= step;
  return report;
}

MarketShares pure_info_equilibrium(const ExternalityModel& model, double p_a, double tol) {
  if (p_a < 0.0) throw std::invalid_argument("information price must be >= 0");
  auto map = [&](double eta_a) {
    const double gv = model.g(eta_a);
    if (!(gv > 0.0)) return 0.0;
    return std::clamp(1.0 - p_a / gv, 0.0, 1.0);
  };
  auto gap = [&](double eta_a) { return map(eta_a) - eta_a; };

  // The map is nondecreasing, so the dynamics from zero climb to the smallest
  // fixed point: the first root of the gap.
  constexpr int kScan = 1024;
  double root = 1.0;
  double prev_x = 0.0;
  if (gap(0.0) <= 0.0) {
    root = 0.0;
  } else {
    for (int i = 1; i <= kScan; ++i) {
      const double x = static_cast<double>(i) / kScan;
      const double gx = gap(x);
      if (gx <= 0.0) {
        root = gx == 0.0 ? x : bisect_increasing([&](double y) { return -gap(y); }, prev_x, x);
        break;
      }
      prev_x = x;
    }
  }
  if (std::abs(gap(root)) > tol) {
    throw NonConvergenceError("pure information market equilibrium not resolved to tolerance");
  }
  return MarketShares{0.0, root};
}

}  // namespace hysim
