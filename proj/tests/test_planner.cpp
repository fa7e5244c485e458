#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>

#include "helpers.hpp"
#include "reccoord/billing.hpp"
#include "reccoord/devices.hpp"
#include "reccoord/planner.hpp"
#include "reccoord/verify.hpp"

using namespace reccoord;
using doctest::Approx;
using testutil::constant;

namespace {

double sum(const Series& s) { return std::accumulate(s.begin(), s.end(), 0.0); }

// One member with a water boiler, PV only in the second quarter of the day
// and an evening reference draw that exactly covers the evening usage.
Scenario midday_boiler() {
  Scenario s = testutil::empty_scenario(4, 6.0);
  Member m = testutil::plain_member("wb", constant(4, 0.0), {0, 3, 0, 0});
  m.wb = testutil::boiler({0, 0, 0, 2}, {0, 0, 0, 2});
  s.members.push_back(m);
  return s;
}

double bill_of(const Series& inj, const Prices& p, double dt) {
  double b = 0.0;
  for (std::size_t t = 0; t < inj.size(); ++t) {
    b += dt * (inj[t] < 0 ? -inj[t] * p.import_price[t] : -inj[t] * p.export_price[t]);
  }
  return b;
}

}  // namespace

TEST_CASE("member without devices: SoloFix bill is the retail balance") {
  Scenario s = testutil::empty_scenario(4, 6.0);
  s.members.push_back(testutil::plain_member("a", constant(4, 1.0), {0, 3, 0, 0}));
  const DaySchedule d = solve_centralized(s, 0, PlannerMode::SoloFix);
  // -1, +2, -1, -1 kW for 6 h each: 3 * 6 * 0.4 - 2 * 6 * 0.1
  CHECK(d.total_bill == Approx(6.0));
  CHECK(d.members[0].bill == Approx(bill_of({-1, 2, -1, -1}, s.prices, 6.0)));
  CHECK(d.objective == Approx(d.total_bill));
  CHECK(sum(d.members[0].i_com) == Approx(0.0));
}

TEST_CASE("producer and consumer trade through the community in ECFix") {
  Scenario s = testutil::empty_scenario(4, 6.0);
  s.members.push_back(testutil::plain_member("p", constant(4, 0.0), constant(4, 2.0)));
  s.members.push_back(testutil::plain_member("c", constant(4, 2.0), constant(4, 0.0)));
  const DaySchedule solo = solve_centralized(s, 0, PlannerMode::SoloFix);
  const DaySchedule ec = solve_centralized(s, 0, PlannerMode::ECFix);
  // Retail: 2 kW * 24 h at 0.4 bought, 0.1 sold. Community: 0.01 on each side.
  CHECK(solo.total_bill == Approx(2 * 24 * 0.4 - 2 * 24 * 0.1));
  CHECK(ec.total_bill == Approx(2 * 24 * 0.01 * 2));
  for (int t = 0; t < 4; ++t) {
    CHECK(ec.members[0].e_com[t] == Approx(2.0));
    CHECK(ec.members[1].i_com[t] == Approx(2.0));
    CHECK(ec.members[1].i_ret[t] == Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("ECFlex moves the boiler into PV hours; brute force agrees") {
  const Scenario s = midday_boiler();
  const Member& m = s.members[0];
  // Brute force over 0/1/2 kW per step with the daily energy fixed.
  double best = std::numeric_limits<double>::infinity();
  Series best_p;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = 0; c <= 2; ++c)
        for (int d = 0; d <= 2; ++d) {
          if (a + b + c + d != 2) continue;
          const Series p{double(a), double(b), double(c), double(d)};
          const Series temp = simulate_wb(*m.wb, p, 6.0);
          bool ok = true;
          for (int t = 0; t < 4; ++t) {
            ok = ok && temp[t] <= m.wb->temp_max[t] + 1e-9 &&
                 temp[t] >= m.wb->usage_event[t] * m.wb->temp_limit[t] - 1e-9;
          }
          if (!ok) continue;
          Series inj(4);
          for (int t = 0; t < 4; ++t) inj[t] = m.pv_max_kw[t] - p[t];
          const double cost = bill_of(inj, s.prices, 6.0) +
                              discomfort_thermal(temp, m.wb->temp_limit, 1.0).total;
          if (cost < best) {
            best = cost;
            best_p = p;
          }
        }
  REQUIRE(best_p == Series{0, 2, 0, 0});
  const DaySchedule d = solve_centralized(s, 0, PlannerMode::ECFlex);
  CHECK(d.objective == Approx(best));
  CHECK(d.members[0].p_wb[1] == Approx(2.0));
  CHECK(d.total_discomfort == Approx(0.0));

  const DaySchedule fixed = solve_centralized(s, 0, PlannerMode::ECFix);
  CHECK(fixed.members[0].p_wb == Series{0, 0, 0, 2});
  CHECK(fixed.objective > d.objective + 1.0);
}

TEST_CASE("prioritized references keep daily energy and follow PV") {
  const Scenario s = midday_boiler();
  const CommunityRefs refs = prioritize_self_consumption(s, 0);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].ev.empty());
  CHECK(refs[0].hp.empty());
  CHECK(sum(refs[0].wb) == Approx(2.0));
  CHECK(refs[0].wb[1] == Approx(2.0));

  SUBCASE("without PV the bill is unchanged") {
    Scenario dark = s;
    dark.members[0].pv_max_kw = constant(4, 0.0);
    const CommunityRefs r = prioritize_self_consumption(dark, 0);
    DayInputs in;
    in.refs = &r;
    CHECK(solve_centralized(dark, 0, PlannerMode::SoloFix, in).total_bill ==
          Approx(solve_centralized(dark, 0, PlannerMode::SoloFix).total_bill));
  }
}

TEST_CASE("mode hierarchy and independent verification on synthetic communities") {
  for (std::uint64_t seed : {3u, 8u, 21u}) {
    SyntheticConfig c;
    c.members = 4;
    c.seed = seed;
    c.dt_hours = 1.0;
    c.pv_total_kwp = 20.0;
    c.days = 2;
    const Scenario s = generate_synthetic(c);
    CAPTURE(seed);
    double obj[4];
    for (PlannerMode mode : {PlannerMode::SoloFix, PlannerMode::SoloFlex, PlannerMode::ECFix,
                             PlannerMode::ECFlex}) {
      const auto days = run_centralized(s, mode, 2);
      const auto issues = verify_run(s, days);
      INFO(describe(issues));
      CHECK(issues.empty());
      obj[static_cast<int>(mode)] = days[0].objective;
    }
    const double tol = 1e-6 * std::max(1.0, std::abs(obj[0]));
    CHECK(obj[3] <= obj[2] + tol);
    CHECK(obj[2] <= obj[0] + tol);
    CHECK(obj[3] <= obj[1] + tol);
    CHECK(obj[1] <= obj[0] + tol);
  }
}

TEST_CASE("fixed modes replay the reference profiles") {
  SyntheticConfig c;
  c.members = 5;
  c.dt_hours = 1.0;
  const Scenario s = generate_synthetic(c);
  const DaySchedule d = solve_centralized(s, 0, PlannerMode::ECFix);
  for (std::size_t u = 0; u < s.members.size(); ++u) {
    const Member& m = s.members[u];
    if (m.ev) CHECK(activated_energy(d.members[u].p_ev, m.ev->power_ref_kw, 1.0) < 1e-9);
    if (m.wb) CHECK(activated_energy(d.members[u].p_wb, m.wb->power_ref_kw, 1.0) < 1e-9);
    if (m.hp) CHECK(activated_energy(d.members[u].p_hp, m.hp->power_ref_kw, 1.0) < 1e-9);
  }
}

TEST_CASE("verifier flags a tampered schedule") {
  const Scenario s = midday_boiler();
  DaySchedule d = solve_centralized(s, 0, PlannerMode::ECFlex);
  REQUIRE(verify_day(s, d, initial_state(s)).empty());
  SUBCASE("device power") {
    d.members[0].p_wb[1] -= 0.5;
    CHECK_FALSE(verify_day(s, d, initial_state(s)).empty());
  }
  SUBCASE("bill") {
    d.members[0].bill += 0.01;
    CHECK_FALSE(verify_day(s, d, initial_state(s)).empty());
  }
  SUBCASE("community balance") {
    d.members[0].e_com[0] += 1.0;
    d.members[0].e_ret[0] -= 1.0;
    CHECK_FALSE(verify_day(s, d, initial_state(s)).empty());
  }
}

TEST_CASE("state carries into the next day") {
  Scenario s = testutil::empty_scenario(4, 6.0, 2);
  Member m = testutil::plain_member("wb", constant(8, 0.0), {0, 3, 0, 0, 0, 3, 0, 0});
  m.wb = testutil::boiler({0, 0, 0, 2, 0, 0, 0, 2}, {0, 0, 0, 2, 0, 0, 0, 2});
  s.members.push_back(m);
  const auto days = run_centralized(s, PlannerMode::ECFlex, 2);
  REQUIRE(days.size() == 2);
  const CommunityState carried = final_state(days[0]);
  REQUIRE(carried[0].wb_temp.has_value());
  CHECK(*carried[0].wb_temp == Approx(days[0].members[0].temp_wb.back()));
  CHECK_FALSE(carried[0].ev_soc.has_value());
  CHECK(verify_run(s, days).empty());
}

TEST_CASE("reference dimension mismatch is rejected") {
  const Scenario s = midday_boiler();
  CommunityRefs refs = scenario_refs(s, 0);
  refs[0].wb.pop_back();
  DayInputs in;
  in.refs = &refs;
  CHECK_THROWS_AS(build_day_problem(s, 0, PlannerMode::ECFlex, in), std::invalid_argument);
}
