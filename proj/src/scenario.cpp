#include "hysim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hysim/errors.hpp"
#include "hysim/parallel.hpp"

namespace hysim {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError("missing field " + where + key);
  }
  return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ConfigError("field " + where + key + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return number(obj, key, where);
}

std::vector<double> number_list(const json& obj, const std::string& key,
                                const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array()) throw ConfigError("field " + where + key + " must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("field " + where + key + " must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string text_or(const json& obj, const std::string& key, const std::string& fallback,
                    const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("field " + where + key + " must be a string");
  return v.get<std::string>();
}

DistributionSpec parse_distribution(const json& v, const std::string& where) {
  if (!v.is_object()) throw ConfigError("field " + where + " must be an object");
  const std::string kind = text_or(v, "type", "", where + ".");
  if (kind == "point") return DistributionSpec::point(number(v, "value", where + "."));
  if (kind == "uniform") {
    return DistributionSpec::uniform(number(v, "low", where + "."), number(v, "high", where + "."));
  }
  if (kind == "exponential") return DistributionSpec::exponential(number(v, "mean", where + "."));
  if (kind == "lognormal") {
    return DistributionSpec::lognormal(number(v, "mu", where + "."),
                                       number(v, "sigma", where + "."));
  }
  throw ConfigError("field " + where + ".type must be point, uniform, exponential or lognormal");
}

}  // namespace

std::vector<double> SweepSpec::values() const {
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) {
    v[i] = i == steps - 1 ? to : from + (to - from) * i / (steps - 1);
  }
  return v;
}

std::vector<double> ScenarioConfig::leasing_values() const {
  if (sweep) return sweep->values();
  return {*leasing_utility};
}

InterferenceModel parse_interference(const json& mc) {
  const std::string w = "mc.";
  InterferenceModel im;
  im.users = static_cast<int>(number_or(mc, "N", im.users, w));
  im.channels = static_cast<int>(number_or(mc, "K", im.channels, w));
  if (mc.contains("dist_L")) im.dist_L = parse_distribution(mc.at("dist_L"), "mc.dist_L");
  if (mc.contains("dist_W")) im.dist_W = parse_distribution(mc.at("dist_W"), "mc.dist_W");
  if (mc.contains("dist_I")) im.dist_I = parse_distribution(mc.at("dist_I"), "mc.dist_I");
  im.power = number_or(mc, "P", im.power, w);
  im.noise = number_or(mc, "n0", im.noise, w);
  const std::string utility = text_or(mc, "utility", "log1p", w);
  if (utility == "log1p") {
    im.utility = UtilityKind::log1p;
  } else if (utility == "power") {
    im.utility = UtilityKind::power;
    im.rho = number(mc, "rho", w);
  } else {
    throw ConfigError("field mc.utility must be log1p or power");
  }
  im.samples = static_cast<long>(number_or(mc, "samples", static_cast<double>(im.samples), w));
  im.batches = static_cast<int>(number_or(mc, "batches", im.batches, w));
  if (mc.contains("seed")) im.seed = mc.at("seed").get<std::uint64_t>();
  const std::string mode = text_or(mc, "count_mode", "expected", w);
  if (mode == "expected") {
    im.count_mode = CountMode::expected;
  } else if (mode == "rounded") {
    im.count_mode = CountMode::rounded;
  } else if (mode == "poisson") {
    im.count_mode = CountMode::poisson;
  } else {
    throw ConfigError("field mc.count_mode must be expected, rounded or poisson");
  }
  try {
    im.validate();
  } catch (const DistributionError& e) {
    throw ConfigError(std::string("mc block: ") + e.what());
  }
  return im;
}

ScenarioConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ScenarioConfig c;

  const json& ext = require(doc, "externality", "");
  c.family = text_or(ext, "family", "", "externality.");
  if (c.family.empty()) throw ConfigError("missing field externality.family");
  const std::string pw = "externality.params.";
  if (c.family == "power") {
    const json& p = require(ext, "params", "externality.");
    c.power = {number(p, "alpha1", pw), number(p, "beta1", pw), number(p, "gamma1", pw),
               number(p, "alpha2", pw), number(p, "beta2", pw), number(p, "gamma2", pw)};
  } else if (c.family == "linear") {
    const json& p = require(ext, "params", "externality.");
    c.linear = {number(p, "alpha1", pw), number(p, "beta1", pw), number(p, "beta2", pw)};
  } else if (c.family == "constant") {
    const json& p = require(ext, "params", "externality.");
    c.f0 = number(p, "f0", pw);
    c.g0 = number(p, "g0", pw);
  } else if (c.family == "table") {
    const json& p = require(ext, "params", "externality.");
    c.table = {number_list(p, "x", pw), number_list(p, "f", pw), number_list(p, "y", pw),
               number_list(p, "g", pw)};
  } else if (c.family != "montecarlo") {
    throw ConfigError("externality.family must be power, linear, constant, table or montecarlo");
  }
  if (ext.contains("R_L")) c.leasing_utility = number(ext, "R_L", "externality.");

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    SweepSpec sw;
    sw.param = text_or(s, "param", "R_L", "sweep.");
    if (sw.param != "R_L") throw ConfigError("sweep.param must be R_L");
    sw.from = number(s, "from", "sweep.");
    sw.to = number(s, "to", "sweep.");
    sw.steps = static_cast<int>(number(s, "steps", "sweep."));
    if (sw.steps < 2) throw ConfigError("sweep.steps must be at least 2");
    if (!(sw.from < sw.to)) throw ConfigError("sweep.from must be below sweep.to");
    c.sweep = sw;
  }
  if (!c.leasing_utility && !c.sweep) {
    throw ConfigError("missing field externality.R_L (or a sweep block)");
  }

  if (doc.contains("bargaining")) {
    const json& b = doc.at("bargaining");
    c.bargaining_mode = text_or(b, "mode", "nash", "bargaining.");
    if (c.bargaining_mode != "nash" && c.bargaining_mode != "fixed") {
      throw ConfigError("bargaining.mode must be nash or fixed");
    }
    if (c.bargaining_mode == "fixed") c.fixed_delta = number(b, "delta", "bargaining.");
    if (c.fixed_delta < 0.0 || c.fixed_delta > 1.0) {
      throw ConfigError("bargaining.delta must lie in [0,1]");
    }
    c.bargaining.pairing = parse_pairing(text_or(b, "pairing", "own", "bargaining."));
    c.bargaining.grid_n = static_cast<int>(number_or(b, "grid_n", 101, "bargaining."));
    if (c.bargaining.grid_n < 11) throw ConfigError("bargaining.grid_n must be at least 11");
  }
  if (doc.contains("third_party")) {
    c.delta_3p = number(doc.at("third_party"), "delta_3p", "third_party.");
    if (*c.delta_3p < 0.0 || *c.delta_3p >= 1.0) {
      throw ConfigError("third_party.delta_3p must lie in [0,1)");
    }
  }
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    c.solver.tol = number_or(s, "tol", c.solver.tol, "solver.");
    c.solver.max_iter = static_cast<int>(number_or(s, "max_iter", c.solver.max_iter, "solver."));
    c.solver.damping = number_or(s, "damping", c.solver.damping, "solver.");
    c.solver.grid_n = static_cast<int>(number_or(s, "grid_n", c.solver.grid_n, "solver."));
    if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
    if (c.solver.max_iter < 1) throw ConfigError("solver.max_iter must be positive");
    if (!(c.solver.damping > 0.0 && c.solver.damping <= 1.0)) {
      throw ConfigError("solver.damping must lie in (0,1]");
    }
  }
  if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("mc")) {
    const json& m = doc.at("mc");
    MonteCarloSpec spec;
    spec.imodel = parse_interference(m);
    if (!m.contains("seed")) spec.imodel.seed = c.seed;
    if (m.contains("x_grid")) spec.x_grid = number_list(m, "x_grid", "mc.");
    if (m.contains("y_grid")) spec.y_grid = number_list(m, "y_grid", "mc.");
    spec.ref_eta_l = number_or(m, "ref_eta_l", 0.0, "mc.");
    if (m.contains("R_L")) spec.leasing_utility = number(m, "R_L", "mc.");
    c.mc = spec;
  }
  if (c.family == "montecarlo" && !c.mc) throw ConfigError("missing field mc (montecarlo family)");
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    c.output_path = text_or(o, "path", "", "output.");
    c.output_format = text_or(o, "format", "csv", "output.");
    if (c.output_format != "csv" && c.output_format != "json") {
      throw ConfigError("output.format must be csv or json");
    }
  }
  c.bargaining.solver_tol = c.solver.tol;
  c.bargaining.max_iter = c.solver.max_iter;
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

ExternalityModel build_model(const ScenarioConfig& c, double rl) {
  if (c.family == "power") return make_power_family(c.power, rl);
  if (c.family == "linear") return make_linear_family(c.linear, rl);
  if (c.family == "constant") return make_constant_model(c.f0, c.g0, rl);
  if (c.family == "table") return make_table_model(c.table.x, c.table.f, c.table.y, c.table.g, rl);
  const auto derived =
      derive_externality(c.mc->imodel, c.mc->x_grid, c.mc->y_grid, c.mc->ref_eta_l, rl);
  return derived.model;
}

SweepRow run_point(const ScenarioConfig& c, const ExternalityModel& model) {
  SweepRow row;
  row.leasing_utility = model.leasing_utility();
  const BargainingOutcome out = c.bargaining_mode == "fixed"
                                    ? fixed_share_outcome(model, c.fixed_delta, c.bargaining)
                                    : solve_bargaining(model, c.bargaining);
  row.delta_star = out.delta_star;
  row.w_equiv = out.w_equiv;
  row.revenue_transfer = out.revenue_transfer;
  row.p_l = out.equilibrium.prices.p_l;
  row.p_a = out.equilibrium.prices.p_a;
  row.eta_l = out.equilibrium.shares.eta_l;
  row.eta_a = out.equilibrium.shares.eta_a;
  row.u_sl = out.payoffs.u_sl;
  row.u_db = out.payoffs.u_db;
  row.net_rss = out.payoffs.u_sl + out.payoffs.u_db;
  row.flags = out.flags;

  const BenchmarkResult coord = coordination_benchmark(model);
  const BenchmarkResult noncoop = noncooperation_benchmark(model);
  row.net_coord = coord.network_profit;
  row.net_noncoop = noncoop.network_profit;
  if (c.delta_3p) {
    const BenchmarkResult third =
        third_party_benchmark(model, *c.delta_3p, c.solver.tol, c.solver.max_iter);
    row.net_third = third.network_profit;
    if (!third.unique) row.flags.emplace_back("third_party_multiple_equilibria");
  }
  if (*row.net_noncoop > 0.0) row.gain_vs_noncoop = *row.net_rss / *row.net_noncoop - 1.0;
  if (*row.net_coord > 0.0) row.gap_vs_coord = 1.0 - *row.net_rss / *row.net_coord;
  return row;
}

SweepRow run_point(const ScenarioConfig& c, double rl) {
  try {
    return run_point(c, build_model(c, rl));
  } catch (const std::exception& e) {
    SweepRow row;
    row.leasing_utility = rl;
    std::string msg = e.what();
    std::replace_if(msg.begin(), msg.end(), [](char ch) { return ch == ',' || ch == '\n'; }, ' ');
    row.flags.push_back("error: " + msg);
    return row;
  }
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& c) {
  const std::vector<double> values = c.leasing_values();
  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), [&](std::size_t i) { rows[i] = run_point(c, values[i]); });
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.leasing_utility < b.leasing_utility;
  });
  return rows;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{
      "R_L",     "delta_star", "w_equiv",   "revenue_transfer", "p_l",
      "p_a",     "eta_l",      "eta_a",     "u_sl",             "u_db",
      "net_rss", "net_coord",  "net_noncoop", "net_third",      "gain_vs_noncoop",
      "gap_vs_coord", "flags"};
  return cols;
}

std::string format_number(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", *v == 0.0 ? 0.0 : *v);
  return buf;
}

namespace {

std::vector<std::optional<double>> row_values(const SweepRow& r) {
  return {r.leasing_utility, r.delta_star, r.w_equiv, r.revenue_transfer, r.p_l,
          r.p_a,             r.eta_l,      r.eta_a,   r.u_sl,             r.u_db,
          r.net_rss,         r.net_coord,  r.net_noncoop, r.net_third,    r.gain_vs_noncoop,
          r.gap_vs_coord};
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    for (const auto& v : row_values(r)) out << format_number(v) << ',';
    out << join_flags(r.flags) << '\n';
  }
  return out.str();
}

json sweep_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  const auto& cols = sweep_columns();
  for (const auto& r : rows) {
    json obj;
    const auto values = row_values(r);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] && std::isfinite(*values[i])) {
        obj[cols[i]] = *values[i];
      } else {
        obj[cols[i]] = nullptr;
      }
    }
    obj["flags"] = r.flags;
    arr.push_back(obj);
  }
  return arr;
}

std::string benchmark_csv(const std::vector<BenchmarkResult>& results) {
  std::ostringstream out;
  out << "name,eta_l,eta_a,p_l,p_a,u_sl,u_db,network_profit\n";
  for (const auto& b : results) {
    out << b.name << (b.reconstructed ? " (reconstructed)" : "") << ','
        << format_number(b.shares.eta_l) << ',' << format_number(b.shares.eta_a) << ','
        << format_number(b.prices.p_l) << ',' << format_number(b.prices.p_a) << ','
        << format_number(b.u_sl) << ',' << format_number(b.u_db) << ','
        << format_number(b.network_profit) << '\n';
  }
  return out.str();
}

}  // namespace hysim
