#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hysim {

enum class Family { power, linear, table, montecarlo };

std::string_view to_string(Family family);

/// f(x) = alpha1 - beta1 * x^gamma1,  g(y) = alpha2 + (beta2 - alpha2) * y^gamma2.
struct PowerParams {
  double alpha1 = 0.0;
  double beta1 = 0.0;
  double gamma1 = 1.0;
  double alpha2 = 0.0;
  double beta2 = 0.0;
  double gamma2 = 1.0;
};

/// f(x) = alpha1 - beta1 * x,  g(y) = beta2 * y.
struct LinearParams {
  double alpha1 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// Piecewise-linear tables for f over x and g over y, both grids spanning [0,1].
struct TableData {
  std::vector<double> x;
  std::vector<double> f;
  std::vector<double> y;
  std::vector<double> g;
};

/// Congestion utility f, information-value gain g and leasing utility R_L.
///
/// f takes the white-space share x = eta_a + eta_b = 1 - eta_l, g takes the
/// advanced share eta_a. The basic and advanced utilities are derived views:
/// S_B = f(1 - eta_l) and S_A = S_B + g(eta_a). Instances are immutable and
/// safe to share between threads.
class ExternalityModel {
 public:
  using Params = std::variant<PowerParams, LinearParams, TableData>;

  double f(double x) const;
  double g(double y) const;
  /// dg/dy; analytic for power/linear families, central differences for tables.
  /// May be +inf at y = 0 for power families with gamma2 < 1.
  double g_prime(double y) const;

  double leasing_utility() const { return leasing_; }
  double basic_utility(double eta_l) const { return f(1.0 - eta_l); }
  double advanced_utility(double eta_l, double eta_a) const {
    return f(1.0 - eta_l) + g(eta_a);
  }

  Family family() const { return family_; }
  const Params& params() const { return params_; }

  /// Same f and g with a different R_L. Re-runs the family constructor checks.
  ExternalityModel with_leasing_utility(double leasing_utility) const;

 private:
  friend ExternalityModel make_power_family(const PowerParams&, double);
  friend ExternalityModel make_linear_family(const LinearParams&, double);
  friend ExternalityModel make_table_model(std::vector<double>, std::vector<double>,
                                           std::vector<double>, std::vector<double>, double,
                                           Family, double);

  ExternalityModel(Family family, Params params, double leasing)
      : family_(family), params_(std::move(params)), leasing_(leasing) {}

  Family family_;
  Params params_;
  double leasing_;
};

/// Throws ParameterError if f(1) < 0, beta1 < 0, beta2 < alpha2, alpha2 < 0,
/// an exponent lies outside (0,1], or R_L <= f(0) + g(1).
ExternalityModel make_power_family(const PowerParams& params, double leasing_utility);

/// Throws ParameterError unless alpha1 >= beta1 >= 0 and beta2 >= 0. R_L is
/// not checked here; validate_model reports leasing dominance.
ExternalityModel make_linear_family(const LinearParams& params, double leasing_utility);

/// f == f0, g == g0 (a degenerate power family).
ExternalityModel make_constant_model(double f0, double g0, double leasing_utility);

/// Tabulated model evaluated by linear interpolation. Grids must be strictly
/// increasing with first point 0 and last point 1 (GridError). The resulting
/// model is validated at `tol` and rejected with ShapeError on failure.
ExternalityModel make_table_model(std::vector<double> x_grid, std::vector<double> f_vals,
                                  std::vector<double> y_grid, std::vector<double> g_vals,
                                  double leasing_utility, Family tag = Family::table,
                                  double tol = 1e-6);

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;  // 0 when passed cleanly
  double location = 0.0;         // grid abscissa of the worst violation
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  bool passed = true;

  const AssumptionCheck& check(std::string_view name) const;
};

/// Grid finite-difference checks of nonnegativity, monotonicity, curvature
/// and R_L > max f + max g. grid_n >= 3.
ValidationReport validate_model(const ExternalityModel& model, int grid_n = 201,
                                double tol = 1e-9);

}  // namespace hysim
