#include "hysim/externality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hysim/errors.hpp"

namespace hysim {

namespace {

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  const auto lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

void check_grid(const std::vector<double>& grid, const std::vector<double>& vals,
                const char* name) {
  if (grid.size() < 2) throw GridError(std::string(name) + " grid needs at least two points");
  if (grid.size() != vals.size()) {
    throw GridError(std::string(name) + " grid and value arrays differ in length");
  }
  if (grid.front() != 0.0 || grid.back() != 1.0) {
    throw GridError(std::string(name) + " grid must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw GridError(std::string(name) + " grid is not strictly increasing");
    }
  }
  for (double v : vals) {
    if (!std::isfinite(v)) throw GridError(std::string(name) + " table has a non-finite value");
  }
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::power: return "power";
    case Family::linear: return "linear";
    case Family::table: return "table";
    case Family::montecarlo: return "montecarlo";
  }
  return "unknown";
}

double ExternalityModel::f(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  if (const auto* p = std::get_if<PowerParams>(&params_)) {
    return p->alpha1 - p->beta1 * std::pow(x, p->gamma1);
  }
  if (const auto* p = std::get_if<LinearParams>(&params_)) {
    return p->alpha1 - p->beta1 * x;
  }
  const auto& t = std::get<TableData>(params_);
  return interpolate(t.x, t.f, x);
}

double ExternalityModel::g(double y) const {
  y = std::clamp(y, 0.0, 1.0);
  if (const auto* p = std::get_if<PowerParams>(&params_)) {
    return p->alpha2 + (p->beta2 - p->alpha2) * std::pow(y, p->gamma2);
  }
  if (const auto* p = std::get_if<LinearParams>(&params_)) {
    return p->beta2 * y;
  }
  const auto& t = std::get<TableData>(params_);
  return interpolate(t.y, t.g, y);
}

double ExternalityModel::g_prime(double y) const {
  y = std::clamp(y, 0.0, 1.0);
  if (const auto* p = std::get_if<PowerParams>(&params_)) {
    const double scale = (p->beta2 - p->alpha2) * p->gamma2;
    if (scale == 0.0) return 0.0;
    if (p->gamma2 == 1.0) return scale;
    if (y == 0.0) return std::numeric_limits<double>::infinity();
    return scale * std::pow(y, p->gamma2 - 1.0);
  }
  if (const auto* p = std::get_if<LinearParams>(&params_)) {
    return p->beta2;
  }
  constexpr double h = 1e-6;
  const double lo = std::max(0.0, y - h);
  const double hi = std::min(1.0, y + h);
  return (g(hi) - g(lo)) / (hi - lo);
}

ExternalityModel ExternalityModel::with_leasing_utility(double leasing_utility) const {
  if (const auto* p = std::get_if<PowerParams>(&params_)) {
    return make_power_family(*p, leasing_utility);
  }
  if (const auto* p = std::get_if<LinearParams>(&params_)) {
    return make_linear_family(*p, leasing_utility);
  }
  const auto& t = std::get<TableData>(params_);
  return make_table_model(t.x, t.f, t.y, t.g, leasing_utility, family_);
}

ExternalityModel make_power_family(const PowerParams& p, double leasing_utility) {
  auto in_unit = [](double gamma) { return gamma > 0.0 && gamma <= 1.0; };
  if (!in_unit(p.gamma1) || !in_unit(p.gamma2)) {
    throw ParameterError("power family exponents must lie in (0, 1]");
  }
  if (p.beta1 < 0.0) throw ParameterError("power family needs beta1 >= 0 (f nonincreasing)");
  if (p.alpha1 - p.beta1 < 0.0) throw ParameterError("power family has f(1) = alpha1 - beta1 < 0");
  if (p.alpha2 < 0.0 || p.beta2 < p.alpha2) {
    throw ParameterError("power family needs beta2 >= alpha2 >= 0");
  }
  const double peak = p.alpha1 + p.beta2;  // f(0) + g(1)
  if (!(leasing_utility > peak)) {
    std::ostringstream msg;
    msg << "R_L = " << leasing_utility << " must exceed f(0) + g(1) = " << peak;
    throw ParameterError(msg.str());
  }
  return ExternalityModel(Family::power, p, leasing_utility);
}

ExternalityModel make_linear_family(const LinearParams& p, double leasing_utility) {
  if (p.beta1 < 0.0) throw ParameterError("linear family needs beta1 >= 0");
  if (p.alpha1 < p.beta1) throw ParameterError("linear family has f(1) = alpha1 - beta1 < 0");
  if (p.beta2 < 0.0) throw ParameterError("linear family needs beta2 >= 0");
  return ExternalityModel(Family::linear, p, leasing_utility);
}

ExternalityModel make_constant_model(double f0, double g0, double leasing_utility) {
  return make_power_family(PowerParams{f0, 0.0, 1.0, g0, g0, 1.0}, leasing_utility);
}

ExternalityModel make_table_model(std::vector<double> x_grid, std::vector<double> f_vals,
                                  std::vector<double> y_grid, std::vector<double> g_vals,
                                  double leasing_utility, Family tag, double tol) {
  check_grid(x_grid, f_vals, "f");
  check_grid(y_grid, g_vals, "g");
  if (tag != Family::table && tag != Family::montecarlo) {
    throw ParameterError("table models carry the table or montecarlo tag");
  }
  ExternalityModel model(tag,
                         TableData{std::move(x_grid), std::move(f_vals), std::move(y_grid),
                                   std::move(g_vals)},
                         leasing_utility);
  const auto report = validate_model(model, 201, tol);
  if (!report.passed) {
    std::ostringstream msg;
    msg << "tabulated model violates:";
    for (const auto& c : report.checks) {
      if (!c.passed) msg << ' ' << c.name << " (by " << c.worst_violation << " at " << c.location << ')';
    }
    throw ShapeError(msg.str());
  }
  return model;
}

const AssumptionCheck& ValidationReport::check(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no assumption check named " + std::string(name));
}

ValidationReport validate_model(const ExternalityModel& model, int grid_n, double tol) {
  if (grid_n < 3) throw std::invalid_argument("validate_model needs grid_n >= 3");
  const auto n = static_cast<std::size_t>(grid_n);
  std::vector<double> grid(n), fv(n), gv(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    fv[i] = model.f(grid[i]);
    gv[i] = model.g(grid[i]);
  }

  // Each lambda returns the signed violation at index i (positive = bad).
  auto scan = [&](std::string name, std::size_t first, std::size_t last, auto violation) {
    AssumptionCheck c{std::move(name)};
    for (std::size_t i = first; i < last; ++i) {
      const double v = violation(i);
      if (v > c.worst_violation) {
        c.worst_violation = v;
        c.location = grid[i];
      }
    }
    c.passed = c.worst_violation <= tol;
    return c;
  };

  ValidationReport report;
  report.checks.push_back(scan("f_nonnegative", 0, n, [&](std::size_t i) { return -fv[i]; }));
  report.checks.push_back(scan("g_nonnegative", 0, n, [&](std::size_t i) { return -gv[i]; }));
  report.checks.push_back(
      scan("f_nonincreasing", 0, n - 1, [&](std::size_t i) { return fv[i + 1] - fv[i]; }));
  report.checks.push_back(scan("f_convex", 1, n - 1, [&](std::size_t i) {
    return -(fv[i - 1] - 2.0 * fv[i] + fv[i + 1]);
  }));
  report.checks.push_back(
      scan("g_nondecreasing", 0, n - 1, [&](std::size_t i) { return gv[i] - gv[i + 1]; }));
  report.checks.push_back(scan("g_concave", 1, n - 1, [&](std::size_t i) {
    return gv[i - 1] - 2.0 * gv[i] + gv[i + 1];
  }));

  AssumptionCheck dominance{"leasing_dominance"};
  const auto f_max = std::max_element(fv.begin(), fv.end());
  const auto g_max = std::max_element(gv.begin(), gv.end());
  const double margin = model.leasing_utility() - (*f_max + *g_max);
  dominance.passed = margin > 0.0;
  if (!dominance.passed) {
    dominance.worst_violation = -margin;
    dominance.location = grid[static_cast<std::size_t>(f_max - fv.begin())];
  }
  report.checks.push_back(dominance);

  report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const AssumptionCheck& c) { return c.passed; });
  return report;
}

}  // namespace hysim
