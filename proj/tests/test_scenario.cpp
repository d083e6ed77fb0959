#include <doctest.h>

#include <cmath>

#include "hysim/errors.hpp"
#include "hysim/scenario.hpp"

using namespace hysim;
using nlohmann::json;

namespace {

json reference_config() {
  return json::parse(R"({
    "externality": {"family": "power",
      "params": {"alpha1": 1.8, "beta1": 0.8, "gamma1": 0.8, "alpha2": 1, "beta2": 1.2, "gamma2": 0.6}},
    "sweep": {"param": "R_L", "from": 6, "to": 10, "steps": 3},
    "third_party": {"delta_3p": 0.3}
  })");
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("missing leasing utility is named") {
  json doc = reference_config();
  doc.erase("sweep");
  try {
    parse_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("R_L") != std::string::npos);
  }
}

TEST_CASE("schema checks") {
  json doc = reference_config();
  doc["sweep"]["steps"] = 1;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = reference_config();
  doc["externality"]["family"] = "cubic";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = reference_config();
  doc["externality"]["params"].erase("gamma2");
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = reference_config();
  doc["solver"] = {{"tol", -1}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = reference_config();
  doc["bargaining"] = {{"pairing", "sideways"}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("sweep rows are sorted and complete") {
  const auto cfg = parse_config(reference_config());
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].leasing_utility == 6.0);
  CHECK(rows[1].leasing_utility == 8.0);
  CHECK(rows[2].leasing_utility == 10.0);
  for (const auto& r : rows) {
    CHECK(r.flags.empty());
    CHECK(*r.gain_vs_noncoop == doctest::Approx(*r.net_rss / *r.net_noncoop - 1.0));
    CHECK(*r.gap_vs_coord == doctest::Approx(1.0 - *r.net_rss / *r.net_coord));
  }
  const std::string csv = sweep_csv(rows);
  CHECK(csv.find("nan") == std::string::npos);
  CHECK(csv.rfind("R_L,delta_star,w_equiv,revenue_transfer,p_l,p_a,eta_l,eta_a,u_sl,u_db,net_rss,"
                  "net_coord,net_noncoop,net_third,gain_vs_noncoop,gap_vs_coord,flags\n",
                  0) == 0);
  CHECK(csv == sweep_csv(run_sweep(cfg)));
}

TEST_CASE("fixed share on the constant model") {
  const auto cfg = parse_config(json::parse(R"({
    "externality": {"family": "constant", "params": {"f0": 1, "g0": 0.5}, "R_L": 6},
    "bargaining": {"mode": "fixed", "delta": 0}})"));
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(*rows[0].eta_l - 19.0 / 39.0) < 1e-6);
  CHECK(std::abs(*rows[0].eta_a - 10.0 / 39.0) < 1e-6);
  CHECK(std::abs(*rows[0].net_coord - 1.25) < 1e-9);
  CHECK_FALSE(rows[0].net_third.has_value());
  CHECK(format_number(rows[0].net_third).empty());
}

TEST_CASE("coordination does not depend on the revenue share") {
  json a = reference_config();
  a["bargaining"] = {{"mode", "fixed"}, {"delta", 0.1}};
  json b = a;
  b["bargaining"]["delta"] = 0.8;
  const auto ra = run_sweep(parse_config(a));
  const auto rb = run_sweep(parse_config(b));
  for (std::size_t i = 0; i < ra.size(); ++i) CHECK(*ra[i].net_coord == *rb[i].net_coord);
}

TEST_CASE("failed points carry flags and empty cells") {
  json doc = reference_config();
  doc["sweep"] = {{"param", "R_L"}, {"from", 2.0}, {"to", 6.0}, {"steps", 2}};
  const auto rows = run_sweep(parse_config(doc));
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].flags.empty());
  CHECK_FALSE(rows[0].net_rss.has_value());
  const std::string csv = sweep_csv(rows);
  CHECK(csv.find("nan") == std::string::npos);
  CHECK(csv.find("inf") == std::string::npos);
}

TEST_CASE("number formatting") {
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(std::nan("")).empty());
  CHECK(format_number(std::nullopt).empty());
  CHECK(format_number(-0.0) == "0");
}

}
