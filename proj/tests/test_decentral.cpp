#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <type_traits>

#include "helpers.hpp"
#include "reccoord/billing.hpp"
#include "reccoord/decentral.hpp"
#include "reccoord/reporting.hpp"
#include "reccoord/verify.hpp"

using namespace reccoord;
using doctest::Approx;
using testutil::constant;

namespace {

double sum(const Series& s) { return std::accumulate(s.begin(), s.end(), 0.0); }

Scenario midday_boiler() {
  Scenario s = testutil::empty_scenario(4, 6.0);
  Member m = testutil::plain_member("wb", constant(4, 0.0), {0, 3, 0, 0});
  m.wb = testutil::boiler({0, 0, 0, 2}, {0, 0, 0, 2});
  s.members.push_back(m);
  return s;
}

MemberAgent agent_for(const Scenario& s, std::size_t u) {
  const DaySchedule ecfix = solve_centralized(s, 0, PlannerMode::ECFix);
  return MemberAgent(s.members[u], 0, s.horizon.dt_hours, scenario_refs(s, 0)[u], CarryState{},
                     ecfix.members[u]);
}

// Four households: two PV producers (one with a battery), a boiler and a
// heat pump whose reference draw sits in the evening.
Scenario toy_community() {
  SyntheticConfig c;
  c.members = 4;
  c.seed = 5;
  c.dt_hours = 1.0;
  c.wb_rate = 0.5;
  c.hp_rate = 0.5;
  c.ev_rate = 0.25;
  c.bss_rate = 0.25;
  c.pv_owner_rate = 0.5;
  c.pv_total_kwp = 12.0;
  return generate_synthetic(c);
}

}  // namespace

// The coordinator's entry points accept only aggregate requests, offers and
// activations; none of them can see a Member.
static_assert(std::is_invocable_v<decltype(&refine_bounds), const std::vector<CapacityOffer>&,
                                  const FlexRequest&, KeyKind>);
static_assert(!std::is_constructible_v<CapacityOffer, Member>);
static_assert(!std::is_constructible_v<FlexRequest, Member>);
static_assert(std::is_same_v<decltype(remaining_request(std::declval<const FlexRequest&>(),
                                                        std::declval<const std::vector<Activation>&>())),
                             FlexRequest>);

TEST_CASE("initial request from the ECFix residuals") {
  Scenario s = testutil::empty_scenario(4, 6.0);
  s.members.push_back(testutil::plain_member("p", constant(4, 0.0), {0, 5, 0, 0}));
  s.members.push_back(testutil::plain_member("c", {1, 2, 1, 1}, constant(4, 0.0)));
  const DaySchedule ecfix = solve_centralized(s, 0, PlannerMode::ECFix);
  const FlexRequest r = initial_request(ecfix, s.prices);
  CHECK(r.up_kw[1] == Approx(3.0));
  CHECK(r.up_kw[0] == 0.0);
  CHECK(r.down_kw[0] == Approx(1.0));
  CHECK(r.down_kw[1] == 0.0);
  CHECK(r.activation_price[2] == 0.28);
}

TEST_CASE("member offers") {
  const Scenario s = midday_boiler();
  const Series price = constant(4, 0.28);
  SUBCASE("zero request, zero offer") {
    MemberAgent a = agent_for(s, 0);
    const CapacityOffer o = a.offer({constant(4, 0), constant(4, 0), price});
    CHECK(sum(o.up_kw) == 0.0);
    CHECK(sum(o.down_kw) == 0.0);
  }
  SUBCASE("boiler shifts its evening draw to noon without discomfort") {
    MemberAgent a = agent_for(s, 0);
    const CapacityOffer o = a.offer({{0, 2, 0, 0}, {0, 0, 0, 2}, price});
    CHECK(o.up_kw[1] == Approx(2.0));
    CHECK(o.down_kw[3] == Approx(2.0));
    CHECK(sum(o.up_kw) == Approx(sum(o.down_kw)));
    const Activation act = a.activate({"wb", o.up_kw, o.down_kw}, price);
    CHECK(act.up_kw[1] == Approx(2.0));
    CHECK(a.schedule().p_wb[1] == Approx(2.0));
    CHECK(a.schedule().discomfort == Approx(0.0));
    CHECK(a.reference_total()[1] == Approx(2.0));
    CHECK(a.reference_total()[3] == Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("bounds that break the pairing shrink the activation") {
    MemberAgent a = agent_for(s, 0);
    const Activation act = a.activate({"wb", {0, 2, 0, 0}, {0, 0, 0, 0.5}}, price);
    CHECK(sum(act.up_kw) == Approx(0.5));
    CHECK(sum(act.down_kw) == Approx(0.5));
  }
  SUBCASE("zero bounds, zero activation") {
    MemberAgent a = agent_for(s, 0);
    const Activation act = a.activate({"wb", constant(4, 0), constant(4, 0)}, price);
    CHECK(sum(act.up_kw) + sum(act.down_kw) == 0.0);
  }
}

TEST_CASE("reluctant EV owner offers less") {
  // 2-step day, EV plugged throughout with a 0.9 target; the reference
  // charges 4 kW in the first hour. Moving x kWh late costs alpha * x / 10 of
  // discomfort and earns 0.28 * x.
  auto make = [](double alpha) {
    Scenario s = testutil::empty_scenario(2, 12.0);
    Member m = testutil::plain_member("ev", constant(2, 0.0), constant(2, 0.0));
    m.ev = testutil::always_plugged_ev(2, 10.0, 5.0, 0.5, 0.9, {1.0 / 3.0, 0.0}, alpha);
    s.members.push_back(m);
    return s;
  };
  const FlexRequest req{{0, 1}, {1, 0}, constant(2, 0.28)};
  MemberAgent keen = agent_for(make(0.1), 0);
  MemberAgent reluctant = agent_for(make(100.0), 0);
  CHECK(keen.offer(req).up_kw[1] > 0.0);
  CHECK(sum(reluctant.offer(req).up_kw) == Approx(0.0));
}

TEST_CASE("refine bounds") {
  const FlexRequest req{{10, 0}, {0, 3}, {0.28, 0.28}};
  SUBCASE("single offering member gets min(offer, request) under every key") {
    for (KeyKind k : {KeyKind::Equal, KeyKind::Prorate, KeyKind::Cascade}) {
      const auto b = refine_bounds({{"a", {12, 0}, {0, 2}}}, req, k);
      CHECK(b[0].up_kw == Series{10, 0});
      CHECK(b[0].down_kw == Series{0, 2});
    }
  }
  SUBCASE("cascade hand trace per step") {
    const auto b = refine_bounds(
        {{"a", {2, 0}, {0, 0}}, {"b", {8, 0}, {0, 0}}, {"c", {8, 0}, {0, 0}}}, req, KeyKind::Cascade);
    CHECK(b[0].up_kw[0] == 2.0);
    CHECK(b[1].up_kw[0] == 4.0);
    CHECK(b[2].up_kw[0] == 4.0);
    for (const auto& x : b) CHECK(x.down_kw[1] == 0.0);
  }
}

TEST_CASE("no PV: the loop exits immediately with the ECFix bill") {
  Scenario s = midday_boiler();
  s.members[0].pv_max_kw = constant(4, 0.0);
  const DecentralDay d = run_ecflexit(s, 0, {});
  CHECK(sum(d.initial.up_kw) == 0.0);
  CHECK(d.trace.size() <= 1);
  CHECK(d.schedule.total_bill ==
        Approx(solve_centralized(s, 0, PlannerMode::ECFix).total_bill));
}

TEST_CASE("no flexible assets: nothing activates") {
  Scenario s = testutil::empty_scenario(4, 6.0);
  s.members.push_back(testutil::plain_member("p", constant(4, 0.0), {0, 5, 0, 0}));
  s.members.push_back(testutil::plain_member("c", constant(4, 1.0), constant(4, 0.0)));
  const DecentralDay d = run_ecflexit(s, 0, {});
  REQUIRE(d.trace.size() == 1);
  CHECK(d.trace[0].activated == 0.0);
  CHECK(d.schedule.total_bill ==
        Approx(solve_centralized(s, 0, PlannerMode::ECFix).total_bill));
}

TEST_CASE("boiler community reaches the centralized optimum") {
  const Scenario s = midday_boiler();
  const DecentralDay d = run_ecflexit(s, 0, {});
  CHECK(d.schedule.objective ==
        Approx(solve_centralized(s, 0, PlannerMode::ECFlex).objective));
  CHECK(d.schedule.members[0].flex_revenue == Approx(0.28 * 2 * 6));
  CHECK(verify_day(s, d.schedule, initial_state(s)).empty());
}

TEST_CASE("toy community: all keys, both variants") {
  const Scenario s = toy_community();
  REQUIRE(validate_scenario(s).empty());
  const double central = solve_centralized(s, 0, PlannerMode::ECFlex).objective;
  for (KeyKind k : {KeyKind::Equal, KeyKind::Prorate, KeyKind::Cascade}) {
    for (bool primed : {false, true}) {
      CAPTURE(to_string(k));
      CAPTURE(primed);
      DecentralOptions o;
      o.key = k;
      o.primed = primed;
      const DecentralDay d = run_ecflexit(s, 0, o);
      const auto issues = verify_day(s, d.schedule, initial_state(s));
      INFO(describe(issues));
      CHECK(issues.empty());
      CHECK(d.schedule.objective >= central - 1e-6);
      CHECK(d.schedule.total_bill - central <= 0.1 * std::abs(central));
      for (std::size_t i = 0; i < d.trace.size(); ++i) {
        const IterationTrace& it = d.trace[i];
        for (const Activation& a : it.activations) {
          CHECK(std::abs(sum(a.up_kw) - sum(a.down_kw)) * s.horizon.dt_hours <= 1e-6);
        }
        for (std::size_t t = 0; t < it.request_up.size(); ++t) {
          CHECK(it.remaining_up[t] <= it.request_up[t] + 1e-12);
          CHECK(it.remaining_down[t] <= it.request_down[t] + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("member evaluation order does not change the trace") {
  const Scenario s = toy_community();
  DecentralOptions o;
  o.key = KeyKind::Cascade;
  const DecentralDay a = run_ecflexit(s, 0, o);
  o.evaluation_order = {3, 1, 0, 2};
  const DecentralDay b = run_ecflexit(s, 0, o);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(trace_to_json("x", a.trace[i]) == trace_to_json("x", b.trace[i]));
  }
  o.evaluation_order = {0, 0, 1, 2};
  CHECK_THROWS_AS(run_ecflexit(s, 0, o), std::invalid_argument);
}

TEST_CASE("iteration cap raises with the partial trace") {
  const Scenario s = toy_community();
  DecentralOptions o;
  o.max_iterations = 0;
  const FlexRequest r =
      initial_request(solve_centralized(s, 0, PlannerMode::ECFix), s.prices.day_slice(0, 24));
  REQUIRE(sum(r.up_kw) + sum(r.down_kw) > 0.0);
  try {
    (void)run_ecflexit(s, 0, o);
    FAIL("expected IterationCapError");
  } catch (const IterationCapError& e) {
    CHECK(e.trace().empty());
  }
}
