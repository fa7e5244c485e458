#include <doctest.h>

#include <cmath>

#include "reccoord/billing.hpp"

using namespace reccoord;
using doctest::Approx;

namespace {

MemberSchedule flows(const std::string& id, Series i_ret, Series e_ret, Series i_com, Series e_com) {
  MemberSchedule m;
  m.id = id;
  m.i_ret = std::move(i_ret);
  m.e_ret = std::move(e_ret);
  m.i_com = std::move(i_com);
  m.e_com = std::move(e_com);
  return m;
}

}  // namespace

TEST_CASE("bill arithmetic") {
  const Prices p = Prices::flat(2, 0.4, 0.1, 0.01);
  SUBCASE("no exchange") {
    const Bill b = compute_bill(flows("a", {0, 0}, {0, 0}, {0, 0}, {0, 0}), p, 1.0);
    CHECK(b.total == 0.0);
  }
  SUBCASE("1 kWh from the retailer") {
    const Bill b = compute_bill(flows("a", {1, 0}, {0, 0}, {0, 0}, {0, 0}), p, 1.0);
    CHECK(b.total == Approx(0.40));
    CHECK(b.member == "a");
  }
  SUBCASE("1 kWh through the community each way") {
    const Bill b = compute_bill(flows("a", {0, 0}, {0, 0}, {1, 0}, {0, 1}), p, 1.0);
    CHECK(b.total == Approx(0.02));
    CHECK(b.community_fees == Approx(0.02));
  }
  SUBCASE("parts add up exactly") {
    const Bill b = compute_bill(flows("a", {0.3, 2}, {1.7, 0}, {0.2, 0}, {0, 0.9}), p, 0.25);
    CHECK(b.total == b.retailer_cost - b.retailer_revenue + b.community_fees);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(compute_bill(flows("a", {1}, {0, 0}, {0, 0}, {0, 0}), p, 1.0), BillingError);
  }
}

TEST_CASE("bill is linear in volumes and prices") {
  const Prices p = Prices::flat(3, 0.3, 0.05, 0.02);
  const MemberSchedule x = flows("a", {1, 0, 2}, {0, 3, 0}, {0.5, 0, 0}, {0, 0.25, 1});
  const double base = compute_bill(x, p, 0.5).total;
  MemberSchedule x2 = x;
  for (auto* s : {&x2.i_ret, &x2.e_ret, &x2.i_com, &x2.e_com}) {
    for (double& v : *s) v *= 2.5;
  }
  CHECK(compute_bill(x2, p, 0.5).total == Approx(2.5 * base));
  const Prices p2 = Prices::flat(3, 0.6, 0.1, 0.04);
  CHECK(compute_bill(x, p2, 0.5).total == Approx(2.0 * base));
}

TEST_CASE("activation price") {
  CHECK(activation_price(Prices::flat(1, 0.4, 0.1, 0.01))[0] == 0.28);
  CHECK(activation_price(Prices::flat(1, 0.3, 0.1, 0.0))[0] == Approx(0.20));
  try {
    (void)activation_price(Prices::flat(1, 0.12, 0.1, 0.01));
    FAIL("expected an error");
  } catch (const BillingError& e) {
    CHECK(std::string(e.what()) == "non-positive activation reward");
  }
}

TEST_CASE("activated energy counts each shifted kWh once") {
  // 2 kWh moved from the last hour to the first.
  CHECK(activated_energy(Series{2, 0, 0}, Series{0, 0, 2}, 1.0) == Approx(2.0));
  CHECK(activated_energy(Series{1, 1}, Series{1, 1}, 0.25) == 0.0);
  CHECK(activated_energy(Series{1, 3}, Series{2, 2}, 0.5) == Approx(0.5));
}

namespace {

ModeResult one_day(const std::string& mode, std::vector<std::pair<std::string, double>> bills) {
  ModeResult r;
  r.mode = mode;
  DaySchedule d;
  d.mode = mode;
  d.dt_hours = 1.0;
  for (auto& [id, bill] : bills) {
    MemberSchedule m = flows(id, {0}, {0}, {0}, {0});
    m.p_dis = {0};
    m.bill = bill;
    d.members.push_back(m);
    d.total_bill += bill;
  }
  d.objective = d.total_bill;
  r.days.push_back(d);
  return r;
}

}  // namespace

TEST_CASE("individual benefits") {
  const std::vector<ModeResult> results{one_day("SoloFix", {{"a", 10}, {"b", 5}}),
                                        one_day("ECFix", {{"a", 8}, {"b", 5}})};
  const auto rows = individual_benefits(results, "SoloFix");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].mode == "SoloFix");
  CHECK(rows[0].bill_delta == 0.0);
  CHECK(rows[1].bill_delta == 0.0);
  CHECK(rows[2].member == "a");
  CHECK(rows[2].bill_delta == Approx(2.0));
  CHECK(rows[3].bill_delta == 0.0);
  CHECK_THROWS_AS(individual_benefits(results, "ECFlex"), BillingError);
}

TEST_CASE("identical members get identical benefits") {
  const std::vector<ModeResult> results{one_day("SoloFix", {{"a", 4}, {"b", 4}}),
                                        one_day("ECFix", {{"a", 3}, {"b", 3}})};
  const auto rows = individual_benefits(results, "SoloFix");
  CHECK(rows[2].bill_delta == rows[3].bill_delta);
}

TEST_CASE("summary gap rows") {
  const std::vector<ModeResult> results{one_day("SoloFix", {{"a", 20}}),
                                        one_day("ECFlex", {{"a", 10}}),
                                        one_day("ECFlexIt", {{"a", 11}})};
  const Report r = summarize(results);
  CHECK(r.modes.size() == 3);
  CHECK(r.get("bill_eur", "ECFlexIt") == 11.0);
  CHECK(r.get("gap", "ECFlexIt") == Approx(0.1));
  CHECK(r.get("deviation", "ECFlexIt") == Approx(0.1));
  CHECK(r.get("gap", "ECFlex") == 0.0);
  CHECK(r.get("gap", "SoloFix") == Approx(1.0));

  const Report partial = summarize({one_day("ECFix", {{"a", 1}})});
  CHECK(std::isnan(partial.get("gap", "ECFix")));
}
