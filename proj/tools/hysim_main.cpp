// hysim: scenario runner for the hybrid spectrum and information market.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hysim/bargaining.hpp"
#include "hysim/benchmarks.hpp"
#include "hysim/errors.hpp"
#include "hysim/externality.hpp"
#include "hysim/infovalue.hpp"
#include "hysim/market.hpp"
#include "hysim/pricing.hpp"
#include "hysim/scenario.hpp"

namespace {

using hysim::format_number;
using nlohmann::json;

struct Globals {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string format;
  bool quiet = false;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw hysim::ConfigError("cannot write output " + path);
  f << text;
  if (!f) throw hysim::ConfigError("failed writing output " + path);
}

hysim::ScenarioConfig load(const std::string& path, const Globals& g) {
  auto cfg = hysim::load_config(path);
  if (g.tol) {
    if (!(*g.tol > 0.0)) throw hysim::ConfigError("--tol must be positive");
    cfg.solver.tol = *g.tol;
    cfg.bargaining.solver_tol = *g.tol;
  }
  if (g.seed) {
    cfg.seed = *g.seed;
    if (cfg.mc) cfg.mc->imodel.seed = *g.seed;
  }
  if (!g.format.empty()) cfg.output_format = g.format;
  if (!g.out.empty()) cfg.output_path = g.out;
  return cfg;
}

double single_leasing(const hysim::ScenarioConfig& cfg) {
  if (cfg.leasing_utility) return *cfg.leasing_utility;
  return cfg.leasing_values().front();
}

std::string show(double v) { return std::isinf(v) ? (v > 0 ? "inf" : "-inf") : format_number(v); }

std::string pass(bool ok) { return ok ? "PASS" : "FAIL"; }

int cmd_validate(const hysim::ScenarioConfig& cfg, const Globals& g) {
  const auto model = hysim::build_model(cfg, single_leasing(cfg));
  const auto report = hysim::validate_model(model);
  const auto me = hysim::check_me_uniqueness(model, cfg.solver.grid_n);
  const double delta = cfg.bargaining_mode == "fixed" ? cfg.fixed_delta : 0.0;
  const auto ne = hysim::check_ne_uniqueness(model, delta, 51);
  if (cfg.output_format == "json") {
    json j;
    j["family"] = std::string(hysim::to_string(model.family()));
    j["R_L"] = model.leasing_utility();
    for (const auto& c : report.checks) {
      j["assumptions"][c.name] = {{"passed", c.passed},
                                  {"worst_violation", c.worst_violation},
                                  {"location", c.location}};
    }
    j["assumptions_passed"] = report.passed;
    j["market_uniqueness"] = {{"worst_lhs", std::isfinite(me.worst_lhs) ? json(me.worst_lhs) : json("inf")},
                              {"forall", me.forall_pass},
                              {"exists", me.exists_pass},
                              {"worst_at_boundary", me.worst_at_boundary},
                              {"excluded_points", me.excluded_points}};
    j["price_uniqueness"] = {{"delta", delta},
                             {"licensee_margin", ne.licensee_margin},
                             {"database_margin", ne.database_margin},
                             {"curvature_pass", ne.curvature_pass}};
    if (ne.linear_condition) j["price_uniqueness"]["linear_condition"] = *ne.linear_condition;
    write_output(cfg.output_path, j.dump(2) + "\n");
  } else if (!g.quiet || !cfg.output_path.empty()) {
    std::ostringstream o;
    o << "model " << hysim::to_string(model.family()) << " R_L=" << format_number(model.leasing_utility())
      << '\n';
    for (const auto& c : report.checks) {
      o << "  " << pass(c.passed) << ' ' << c.name;
      if (!c.passed) o << " worst=" << format_number(c.worst_violation) << " at " << format_number(c.location);
      o << '\n';
    }
    o << "assumptions " << pass(report.passed) << '\n';
    o << "market uniqueness: worst lhs=" << show(me.worst_lhs) << " at ("
      << format_number(me.worst_location.eta_l) << ", " << format_number(me.worst_location.eta_a)
      << ") forall=" << pass(me.forall_pass) << " exists=" << pass(me.exists_pass)
      << (me.worst_at_boundary ? " (worst on boundary)" : "") << '\n';
    o << "price uniqueness at delta=" << format_number(delta)
      << ": licensee margin=" << format_number(ne.licensee_margin)
      << " database margin=" << format_number(ne.database_margin)
      << " curvature=" << pass(ne.curvature_pass);
    if (ne.linear_condition) o << " linear condition=" << pass(*ne.linear_condition);
    o << '\n';
    write_output(cfg.output_path, o.str());
  }
  return report.passed ? 0 : 1;
}

int cmd_equilibrium(const hysim::ScenarioConfig& cfg, const Globals& g, double p_l, double p_a,
                    double eta0_l, double eta0_a) {
  const auto model = hysim::build_model(cfg, single_leasing(cfg));
  const hysim::PriceVector prices{p_l, p_a};
  const auto trace = hysim::iterate_dynamics(model, prices, {eta0_l, eta0_a}, 1e-10,
                                             100000, cfg.solver.damping);
  const auto eq = hysim::solve_equilibrium(model, prices);
  std::ostringstream o;
  o << "eta_l=" << format_number(eq.shares.eta_l) << " eta_a=" << format_number(eq.shares.eta_a)
    << " case=" << (eq.equilibrium_case == hysim::EquilibriumCase::A ? "A" : "B")
    << " residual=" << format_number(eq.residual)
    << (eq.multiplicity_warning ? " multiple_equilibria" : "") << '\n';
  if (!g.quiet) std::cout << o.str();

  std::ostringstream csv;
  csv << "t,eta_l,eta_a,delta_l,delta_a\n";
  for (std::size_t t = 0; t < trace.shares.size(); ++t) {
    const auto& s = trace.shares[t];
    const hysim::MarketShares d = t < trace.deltas.size() ? trace.deltas[t] : hysim::MarketShares{};
    csv << t << ',' << format_number(s.eta_l) << ',' << format_number(s.eta_a) << ','
        << format_number(d.eta_l) << ',' << format_number(d.eta_a) << '\n';
  }
  if (!cfg.output_path.empty()) {
    write_output(cfg.output_path, csv.str());
  } else if (!g.quiet) {
    std::cout << csv.str();
  }
  return eq.multiplicity_warning ? 2 : 0;
}

int cmd_pcg(const hysim::ScenarioConfig& cfg, const Globals& g, double delta) {
  const auto model = hysim::build_model(cfg, single_leasing(cfg));
  const auto eq = hysim::pcg_equilibrium(model, delta, cfg.solver.tol, cfg.solver.max_iter);
  if (cfg.output_format == "json") {
    json j = {{"delta", delta},
              {"eta_l", eq.shares.eta_l},
              {"eta_a", eq.shares.eta_a},
              {"p_l", eq.prices.p_l},
              {"p_a", eq.prices.p_a},
              {"u_sl", eq.payoffs.u_sl},
              {"u_db", eq.payoffs.u_db},
              {"bracket_gap", eq.bracket_gap},
              {"iterations", eq.iterations},
              {"unique", eq.unique}};
    j["market_roundtrip_error"] =
        eq.market_roundtrip_error ? json(*eq.market_roundtrip_error) : json(nullptr);
    write_output(cfg.output_path, j.dump(2) + "\n");
  } else {
    std::ostringstream o;
    o << "shares (" << format_number(eq.shares.eta_l) << ", " << format_number(eq.shares.eta_a)
      << ")\nprices (" << format_number(eq.prices.p_l) << ", " << format_number(eq.prices.p_a)
      << ")\npayoffs u_sl=" << format_number(eq.payoffs.u_sl)
      << " u_db=" << format_number(eq.payoffs.u_db) << "\nbracket gap "
      << format_number(eq.bracket_gap) << " after " << eq.iterations << " rounds"
      << (eq.unique ? "" : " multiple_equilibria") << '\n';
    if (eq.market_roundtrip_error) {
      o << "user-choice round trip error " << format_number(*eq.market_roundtrip_error) << '\n';
    }
    if (!g.quiet || !cfg.output_path.empty()) write_output(cfg.output_path, o.str());
  }
  return eq.unique ? 0 : 2;
}

int cmd_bargain(const hysim::ScenarioConfig& cfg, const Globals& g) {
  const auto model = hysim::build_model(cfg, single_leasing(cfg));
  const auto out = cfg.bargaining_mode == "fixed"
                       ? hysim::fixed_share_outcome(model, cfg.fixed_delta, cfg.bargaining)
                       : hysim::solve_bargaining(model, cfg.bargaining);
  std::vector<hysim::BenchmarkResult> bench{hysim::coordination_benchmark(model),
                                            hysim::noncooperation_benchmark(model)};
  if (cfg.delta_3p) {
    bench.push_back(
        hysim::third_party_benchmark(model, *cfg.delta_3p, cfg.solver.tol, cfg.solver.max_iter));
  }
  if (cfg.output_format == "json") {
    json j = {{"delta_star", out.delta_star},
              {"u_sl", out.payoffs.u_sl},
              {"u_db", out.payoffs.u_db},
              {"u_sl0", out.disagreement.u_sl},
              {"u_db0", out.disagreement.u_db},
              {"nash_product", out.nash_product},
              {"w_equiv", out.w_equiv},
              {"revenue_transfer", out.revenue_transfer},
              {"feasible", out.feasible},
              {"eta_l", out.equilibrium.shares.eta_l},
              {"eta_a", out.equilibrium.shares.eta_a},
              {"p_l", out.equilibrium.prices.p_l},
              {"p_a", out.equilibrium.prices.p_a},
              {"pairing", std::string(hysim::to_string(cfg.bargaining.pairing))},
              {"flags", out.flags}};
    for (const auto& b : bench) {
      j["benchmarks"].push_back({{"name", b.name},
                                 {"eta_l", b.shares.eta_l},
                                 {"eta_a", b.shares.eta_a},
                                 {"p_l", b.prices.p_l},
                                 {"p_a", b.prices.p_a},
                                 {"u_sl", b.u_sl},
                                 {"u_db", b.u_db},
                                 {"network_profit", b.network_profit},
                                 {"reconstructed", b.reconstructed}});
    }
    write_output(cfg.output_path, j.dump(2) + "\n");
  } else {
    std::ostringstream o;
    o << "delta_star=" << format_number(out.delta_star) << " feasible=" << (out.feasible ? 1 : 0)
      << " nash_product=" << format_number(out.nash_product) << '\n'
      << "u_sl=" << format_number(out.payoffs.u_sl) << " u_db=" << format_number(out.payoffs.u_db)
      << " disagreement=(" << format_number(out.disagreement.u_sl) << ", "
      << format_number(out.disagreement.u_db) << ")\n"
      << "w_equiv=" << format_number(out.w_equiv)
      << " revenue_transfer=" << format_number(out.revenue_transfer) << '\n'
      << "shares (" << format_number(out.equilibrium.shares.eta_l) << ", "
      << format_number(out.equilibrium.shares.eta_a) << ") prices ("
      << format_number(out.equilibrium.prices.p_l) << ", "
      << format_number(out.equilibrium.prices.p_a) << ")\n";
    for (const auto& f : out.flags) o << "flag " << f << '\n';
    o << hysim::benchmark_csv(bench);
    if (!g.quiet || !cfg.output_path.empty()) write_output(cfg.output_path, o.str());
  }
  const bool flagged = !out.flags.empty() ||
                       std::any_of(bench.begin(), bench.end(), [](const auto& b) { return !b.unique; });
  return flagged ? 2 : 0;
}

int cmd_sweep(const hysim::ScenarioConfig& cfg, const Globals& g) {
  // Model errors surface before any point runs.
  (void)hysim::build_model(cfg, cfg.leasing_values().front());
  const auto rows = hysim::run_sweep(cfg);
  const std::string text =
      cfg.output_format == "json" ? hysim::sweep_json(rows).dump(2) + "\n" : hysim::sweep_csv(rows);
  if (!cfg.output_path.empty() || !g.quiet) write_output(cfg.output_path, text);
  const bool flagged =
      std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.flags.empty(); });
  return flagged ? 2 : 0;
}

int cmd_derive(const hysim::ScenarioConfig& cfg, const Globals& g) {
  if (!cfg.mc) throw hysim::ConfigError("missing field mc");
  const auto& spec = *cfg.mc;
  std::optional<double> rl = spec.leasing_utility;
  const auto d = hysim::derive_externality(spec.imodel, spec.x_grid, spec.y_grid, spec.ref_eta_l, rl);

  std::ostringstream csv;
  csv << "x,f,y,g\n";
  const std::size_t rows = std::max(d.x_grid.size(), d.y_grid.size());
  for (std::size_t i = 0; i < rows; ++i) {
    if (i < d.x_grid.size()) csv << format_number(d.x_grid[i]) << ',' << format_number(d.f_smooth[i]);
    else csv << ',';
    csv << ',';
    if (i < d.y_grid.size()) csv << format_number(d.y_grid[i]) << ',' << format_number(d.g_smooth[i]);
    else csv << ',';
    csv << '\n';
  }

  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json meta;
  meta["seed"] = spec.imodel.seed;
  meta["samples"] = spec.imodel.samples;
  meta["batches"] = spec.imodel.batches;
  meta["count_mode"] = std::string(hysim::to_string(spec.imodel.count_mode));
  meta["utility"] = std::string(hysim::to_string(spec.imodel.utility));
  meta["ref_eta_l"] = spec.ref_eta_l;
  meta["R_L"] = d.leasing_utility;
  meta["separability_residual"] = d.separability_residual;
  meta["shape_tol"] = d.shape_tol;
  for (std::size_t i = 0; i < d.x_grid.size(); ++i) {
    meta["f"].push_back({{"x", d.x_grid[i]}, {"raw", d.f_raw[i]}, {"ci", finite(d.f_ci[i])},
                         {"smoothed", d.f_smooth[i]}});
  }
  for (std::size_t i = 0; i < d.y_grid.size(); ++i) {
    meta["g"].push_back({{"y", d.y_grid[i]}, {"raw", d.g_raw[i]}, {"ci", finite(d.g_ci[i])},
                         {"smoothed", d.g_smooth[i]}});
  }
  meta["f_presmoothing"] = {{"max_violation", d.f_stats.max_violation},
                            {"within_ci_fraction", d.f_stats.within_ci_fraction}};
  meta["g_presmoothing"] = {{"max_violation", d.g_stats.max_violation},
                            {"within_ci_fraction", d.g_stats.within_ci_fraction}};

  if (cfg.output_path.empty()) {
    if (!g.quiet) std::cout << csv.str() << meta.dump(2) << '\n';
  } else {
    write_output(cfg.output_path, csv.str());
    write_output(cfg.output_path + ".json", meta.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hysim: hybrid spectrum and information market solver"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  double tol = 0.0;
  app.add_option("--out", g.out, "output path");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
  auto* tol_opt = app.add_option("--tol", tol, "solver tolerance");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--quiet", g.quiet, "suppress console output");

  std::string config;
  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
    return sub;
  };
  auto* validate = add("validate", "externality assumption and uniqueness report");
  auto* equilibrium = add("equilibrium", "user-choice equilibrium at fixed prices");
  double p_l = 0.0, p_a = 0.0, eta0_l = 0.0, eta0_a = 0.0;
  equilibrium->add_option("--p_l", p_l, "licensee price")->required();
  equilibrium->add_option("--p_a", p_a, "information price")->required();
  equilibrium->add_option("--eta0_l", eta0_l, "initial leasing share");
  equilibrium->add_option("--eta0_a", eta0_a, "initial advanced share");
  auto* pcg = add("pcg", "price competition equilibrium at a revenue share");
  double delta = 0.0;
  pcg->add_option("--delta", delta, "revenue share")->required()->check(CLI::Range(0.0, 1.0));
  auto* bargain = add("bargain", "Nash bargaining over the revenue share");
  auto* sweep = add("sweep", "full pipeline over R_L with benchmarks");
  auto* derive = add("derive-externality", "Monte Carlo f and g tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }
  if (*seed_opt) g.seed = seed;
  if (*tol_opt) g.tol = tol;

  try {
    const auto cfg = load(config, g);
    if (*validate) return cmd_validate(cfg, g);
    if (*equilibrium) return cmd_equilibrium(cfg, g, p_l, p_a, eta0_l, eta0_a);
    if (*pcg) return cmd_pcg(cfg, g, delta);
    if (*bargain) return cmd_bargain(cfg, g);
    if (*sweep) return cmd_sweep(cfg, g);
    if (*derive) return cmd_derive(cfg, g);
  } catch (const std::exception& e) {
    std::cerr << "hysim: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
