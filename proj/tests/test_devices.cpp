#include <doctest.h>

#include "helpers.hpp"
#include "reccoord/devices.hpp"

using namespace reccoord;
using doctest::Approx;

TEST_CASE("battery recurrence") {
  const BssParams b = testutil::battery(10.0, 5.0, 1.0, 0.5);
  SUBCASE("idle battery keeps soc_init") {
    const auto s = simulate_bss(b, Series(4, 0.0), Series(4, 0.0), 1.0);
    CHECK(s == Series(4, 0.5));
  }
  SUBCASE("2 kW for one hour adds 0.2") {
    const auto s = simulate_bss(b, Series{2.0}, Series{0.0}, 1.0);
    CHECK(s[0] == Approx(0.7));
  }
  SUBCASE("lossy discharge") {
    const BssParams lossy = testutil::battery(10.0, 5.0, 0.95, 0.5);
    const auto s = simulate_bss(lossy, Series{0.0}, Series{1.0}, 1.0);
    CHECK(s[0] == Approx(0.5 - (1.0 / 0.95) / 10.0).epsilon(1e-12));
    CHECK(s[0] == Approx(0.39474).epsilon(1e-5));
  }
}

TEST_CASE("EV recurrence with arrivals") {
  EvParams e = testutil::always_plugged_ev(8, 50.0, 7.0, 0.2, 0.2, Series(8, 0.0));
  SUBCASE("no power, no arrival") {
    CHECK(simulate_ev(e, Series(8, 0.0), 1.0) == Series(8, 0.2));
  }
  SUBCASE("arrival replaces the previous state") {
    e.arrival[5] = 1.0;
    e.soc_arrival[5] = 0.3;
    const auto s = simulate_ev(e, Series(8, 0.0), 1.0);
    CHECK(s[4] == 0.2);
    CHECK(s[5] == 0.3);
    CHECK(s[7] == 0.3);
  }
  SUBCASE("5 kW for 2 h on a 50 kWh car") {
    const auto s = simulate_ev(e, Series{5.0, 5.0}, 1.0);
    CHECK(s[1] == Approx(0.4));
  }
  SUBCASE("carried initial state and offset window") {
    e.arrival[6] = 1.0;
    e.soc_arrival[6] = 0.9;
    const auto s = simulate_ev(e, Series{0.0, 0.0}, 1.0, 5, 0.6);
    CHECK(s[0] == 0.6);
    CHECK(s[1] == 0.9);
  }
}

TEST_CASE("water boiler recurrence") {
  SUBCASE("power equal to losses keeps the temperature") {
    WbParams w = testutil::boiler({1, 0, 2}, {1, 0, 2}, 2.0, 3.0, 55.0);
    CHECK(simulate_wb(w, w.usage_loss_kw, 1.0) == Series(3, 55.0));
  }
  SUBCASE("net 1 kW for 1 h at 2 degC/kWh") {
    WbParams w = testutil::boiler({0}, {0}, 2.0, 3.0, 55.0);
    CHECK(simulate_wb(w, Series{1.0}, 1.0)[0] == Approx(57.0));
  }
  SUBCASE("usage draws the temperature down") {
    WbParams w = testutil::boiler({1}, {0}, 2.0, 3.0, 55.0);
    CHECK(simulate_wb(w, Series{0.0}, 1.0)[0] == Approx(53.0));
  }
}

TEST_CASE("heat pump recurrence") {
  SUBCASE("COP times power equal to losses") {
    HpParams h = testutil::heat_pump({3, 3}, {1, 1}, 0.5, 3.0);
    CHECK(simulate_hp(h, Series{1, 1}, 1.0) == Series(2, 21.0));
  }
  SUBCASE("1 kW, COP 3, 0.5 degC/kWh") {
    HpParams h = testutil::heat_pump({0}, {0}, 0.5, 3.0);
    CHECK(simulate_hp(h, Series{1.0}, 1.0)[0] == Approx(22.5));
  }
  SUBCASE("losses only") {
    HpParams h = testutil::heat_pump({2, 2}, {0, 0}, 0.5, 3.0);
    const auto t = simulate_hp(h, Series{0, 0}, 1.0);
    CHECK(t[0] == Approx(20.0));
    CHECK(t[1] == Approx(19.0));
  }
}

TEST_CASE("zero-efficiency-loss models are linear in the schedule") {
  const BssParams b = testutil::battery(20.0, 5.0, 1.0, 0.5);
  const Series cha{1, 0, 2, 0}, dis{0, 1, 0, 0.5};
  const auto base = simulate_bss(b, Series(4, 0), Series(4, 0), 0.5);
  const auto one = simulate_bss(b, cha, dis, 0.5);
  Series cha3 = cha, dis3 = dis;
  for (auto& x : cha3) x *= 3;
  for (auto& x : dis3) x *= 3;
  const auto three = simulate_bss(b, cha3, dis3, 0.5);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(three[t] - base[t] == Approx(3 * (one[t] - base[t])));
  }
}

TEST_CASE("discomfort hinge") {
  SUBCASE("state above reference is free") {
    CHECK(discomfort_ev(Series{0.9, 1.0}, Series{0.8, 0.8}, 5.0).total == 0.0);
  }
  SUBCASE("0.1 below the EV target costs 0.1 EUR at alpha 1") {
    const auto d = discomfort_ev(Series{0.7}, Series{0.8}, 1.0);
    CHECK(d.total == Approx(0.1));
  }
  SUBCASE("overheated boiler cooling above the limit") {
    const auto d = discomfort_thermal(Series{70, 65, 55, 46}, Series(4, 45.0), 1.0);
    CHECK(d.total == 0.0);
    CHECK(d.per_step == Series(4, 0.0));
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(discomfort_thermal(Series{1, 2}, Series{1}, 1.0), std::invalid_argument);
  }
}
