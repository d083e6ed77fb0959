#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hysim/bargaining.hpp"
#include "hysim/benchmarks.hpp"
#include "hysim/externality.hpp"
#include "hysim/infovalue.hpp"

namespace hysim {

struct SweepSpec {
  std::string param = "R_L";
  double from = 0.0;
  double to = 0.0;
  int steps = 2;

  std::vector<double> values() const;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 500;
  double damping = 0.5;
  int grid_n = 101;
};

struct MonteCarloSpec {
  InterferenceModel imodel;
  std::vector<double> x_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> y_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  double ref_eta_l = 0.0;
  std::optional<double> leasing_utility;
};

struct ScenarioConfig {
  std::string family;  // power, linear, constant, table, montecarlo
  PowerParams power;
  LinearParams linear;
  double f0 = 0.0;
  double g0 = 0.0;
  TableData table;
  std::optional<double> leasing_utility;
  std::optional<SweepSpec> sweep;

  std::string bargaining_mode = "nash";  // nash or fixed
  double fixed_delta = 0.0;
  BargainingOptions bargaining;
  std::optional<double> delta_3p;
  SolverOptions solver;
  std::optional<MonteCarloSpec> mc;
  std::uint64_t seed = 42;
  std::string output_path;
  std::string output_format = "csv";

  /// R_L values to run: the sweep grid or the single configured value.
  std::vector<double> leasing_values() const;
};

/// Throws ConfigError naming the offending field.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

InterferenceModel parse_interference(const nlohmann::json& block);

/// Externality model at the given R_L. For the montecarlo family the tables
/// are derived once per call.
ExternalityModel build_model(const ScenarioConfig& config, double leasing_utility);

struct SweepRow {
  double leasing_utility = 0.0;
  std::optional<double> delta_star, w_equiv, revenue_transfer, p_l, p_a, eta_l, eta_a, u_sl, u_db,
      net_rss, net_coord, net_noncoop, net_third, gain_vs_noncoop, gap_vs_coord;
  std::vector<std::string> flags;
};

SweepRow run_point(const ScenarioConfig& config, double leasing_utility);
SweepRow run_point(const ScenarioConfig& config, const ExternalityModel& model);

/// One row per R_L value, sorted by R_L; points run in parallel.
std::vector<SweepRow> run_sweep(const ScenarioConfig& config);

const std::vector<std::string>& sweep_columns();
std::string sweep_csv(const std::vector<SweepRow>& rows);
nlohmann::json sweep_json(const std::vector<SweepRow>& rows);

std::string benchmark_csv(const std::vector<BenchmarkResult>& results);

/// Nine significant digits; empty for missing or non-finite values.
std::string format_number(std::optional<double> v);

}  // namespace hysim
