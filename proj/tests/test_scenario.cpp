#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "helpers.hpp"
#include "reccoord/devices.hpp"
#include "reccoord/scenario.hpp"

using namespace reccoord;

namespace {

const char* kMinimal = R"({
  "schema": 1,
  "horizon": {"steps_per_day": 4, "dt_hours": 6, "num_days": 1},
  "prices": {"import_price": [0.4, 0.4, 0.4, 0.4],
             "export_price": [0.1, 0.1, 0.1, 0.1],
             "community_fee": [0.01, 0.01, 0.01, 0.01]},
  "members": [{"id": "a", "fixed_load_kw": [1, 1, 1, 1], "pv_max_kw": [0, 2, 0, 0]}]
})";

bool has_path(const std::vector<Violation>& v, const std::string& path) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.path == path; });
}

bool has_message(const std::vector<Violation>& v, const std::string& msg) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.message == msg; });
}

std::vector<Violation> violations_of(const std::string& doc) {
  try {
    (void)load_scenario(doc);
  } catch (const ScenarioValidationError& e) {
    return e.violations();
  }
  return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

std::size_t count_devices(const Scenario& s, int which) {
  return static_cast<std::size_t>(std::count_if(s.members.begin(), s.members.end(), [&](const Member& m) {
    switch (which) {
      case 0: return m.wb.has_value();
      case 1: return m.ev.has_value();
      case 2: return m.hp.has_value();
      default: return m.bss.has_value();
    }
  }));
}

}  // namespace

TEST_CASE("minimal document loads") {
  const Scenario s = load_scenario(kMinimal);
  CHECK(s.members.size() == 1);
  CHECK(s.horizon.total_steps() == 4);
  CHECK(s.members[0].pv_max_kw[1] == 2.0);
  CHECK_FALSE(s.members[0].has_flexible_device());
}

TEST_CASE("schema version is mandatory") {
  CHECK_THROWS_AS(load_scenario(replace(kMinimal, "\"schema\": 1,", "")), ScenarioParseError);
  CHECK_THROWS_AS(load_scenario(replace(kMinimal, "\"schema\": 1", "\"schema\": 2")),
                  ScenarioParseError);
  CHECK_THROWS_AS(load_scenario("{not json"), ScenarioParseError);
}

TEST_CASE("soc_init above soc_max is reported") {
  const std::string doc = replace(
      kMinimal, R"("pv_max_kw": [0, 2, 0, 0]})",
      R"("pv_max_kw": [0, 2, 0, 0], "bss": {"capacity_kwh": 10, "max_power_kw": 5,
          "efficiency": 1, "soc_init": 1.2, "soc_min": 0, "soc_max": 1}})");
  const auto v = violations_of(doc);
  CHECK(has_message(v, "soc_init out of [soc_min,soc_max]"));
  CHECK(has_path(v, "members/a/bss/soc_init"));
}

TEST_CASE("horizon must cover the whole day") {
  const auto v = violations_of(replace(kMinimal, "\"dt_hours\": 6", "\"dt_hours\": 5"));
  CHECK_FALSE(v.empty());
}

TEST_CASE("EV reference power while unplugged names member and step") {
  Scenario s = testutil::empty_scenario(4, 6.0);
  Member m = testutil::plain_member("h03", testutil::constant(4, 0.5), testutil::constant(4, 0.0));
  m.ev = testutil::always_plugged_ev(4, 40.0, 7.0, 0.5, 0.5, {0, 0, 0, 0});
  m.ev->plugged = {1, 1, 0, 1};
  m.ev->departure = {0, 1, 0, 0};
  m.ev->arrival = {0, 0, 0, 1};
  m.ev->soc_arrival = {0, 0, 0, 0.5};
  m.ev->power_ref_kw = {0, 0, 1.0, 0};
  s.members.push_back(m);
  const auto v = validate_scenario(s);
  CHECK(has_path(v, "members/h03/ev/power_ref_kw/2"));
}

TEST_CASE("prices without activation reward are rejected") {
  Scenario s = testutil::empty_scenario(4, 6.0, 1, 0.1, 0.1, 0.01);
  s.members.push_back(testutil::plain_member("a", testutil::constant(4, 1), testutil::constant(4, 0)));
  const auto v = validate_scenario(s);
  CHECK(has_message(v, "non-positive activation reward"));
}

TEST_CASE("duplicate member ids are rejected") {
  Scenario s = testutil::empty_scenario(4, 6.0);
  s.members.push_back(testutil::plain_member("a", testutil::constant(4, 1), testutil::constant(4, 0)));
  s.members.push_back(s.members.back());
  CHECK_FALSE(validate_scenario(s).empty());
}

TEST_CASE("temp_limit may be given as the minimum of temp_ref and temp_set") {
  Scenario s = testutil::empty_scenario(4, 6.0);
  Member m = testutil::plain_member("a", testutil::constant(4, 0.2), testutil::constant(4, 0));
  m.wb = testutil::boiler({0, 0, 0, 0}, {0, 0, 0, 0});
  s.members.push_back(m);
  std::string doc = serialize_scenario(s);
  doc = replace(doc, R"("temp_limit":[45.0,45.0,45.0,45.0])",
                R"("temp_ref":[50,44,45,46],"temp_set":[45,50,40,45])");
  const Scenario back = load_scenario(doc);
  CHECK(back.members[0].wb->temp_limit == Series{45, 44, 40, 45});
}

TEST_CASE("serialization round-trips") {
  SyntheticConfig c;
  c.members = 6;
  c.days = 2;
  c.seed = 11;
  const Scenario s = generate_synthetic(c);
  const std::string text = serialize_scenario(s);
  const Scenario back = load_scenario(text);
  CHECK(back == s);
  CHECK(serialize_scenario(back) == text);
}

TEST_CASE("synthetic community has the configured device counts and PV total") {
  SyntheticConfig c;  // 20 members, 70/60/50/25 %, 147 kWp, seed 42
  std::vector<double> kwp;
  const Scenario s = generate_synthetic(c, &kwp);
  REQUIRE(s.members.size() == 20);
  CHECK(count_devices(s, 0) == 14);
  CHECK(count_devices(s, 1) == 12);
  CHECK(count_devices(s, 2) == 10);
  CHECK(count_devices(s, 3) == 5);
  const auto owners = std::count_if(s.members.begin(), s.members.end(), [](const Member& m) {
    return std::any_of(m.pv_max_kw.begin(), m.pv_max_kw.end(), [](double p) { return p > 0; });
  });
  CHECK(owners == 15);
  double total = 0.0;
  for (double k : kwp) total += k;
  CHECK(total == doctest::Approx(147.0).epsilon(1e-12));
  CHECK(std::count_if(kwp.begin(), kwp.end(), [](double k) { return k > 0; }) == 15);
  CHECK(validate_scenario(s).empty());
}

TEST_CASE("generator is deterministic and seed sensitive") {
  SyntheticConfig c;
  c.members = 8;
  const std::string a = serialize_scenario(generate_synthetic(c));
  const std::string b = serialize_scenario(generate_synthetic(c));
  CHECK(a == b);
  SyntheticConfig d = c;
  d.seed = 43;
  CHECK(generate_synthetic(c).members[0].fixed_load_kw != generate_synthetic(d).members[0].fixed_load_kw);
}

TEST_CASE("generator output is valid across seeds and sizes") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    SyntheticConfig c;
    c.seed = seed;
    c.members = 1 + static_cast<int>(seed % 9);
    c.days = 1 + static_cast<int>(seed % 3);
    c.dt_hours = (seed % 2 == 0) ? 1.0 : 0.25;
    c.bss_rate = 0.5;
    const Scenario s = generate_synthetic(c);
    CAPTURE(seed);
    CHECK(validate_scenario(s).empty());
    CHECK(s.horizon.steps_per_day * s.horizon.dt_hours == doctest::Approx(24.0));
  }
}

TEST_CASE("generator rejects an empty community") {
  SyntheticConfig c;
  c.members = 0;
  CHECK_THROWS_AS(generate_synthetic(c), ScenarioError);
}
