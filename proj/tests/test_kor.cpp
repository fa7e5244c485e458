#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "reccoord/kor.hpp"

using namespace reccoord;
using doctest::Approx;
using V = std::vector<double>;

namespace {

double total(const V& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("equal key") {
  SUBCASE("caps bind and the volume undershoots") {
    const V a = equal_key(V{2, 8, 8}, 10.0);
    CHECK(a[0] == 2.0);
    CHECK(a[1] == Approx(10.0 / 3.0));
    CHECK(a[2] == Approx(10.0 / 3.0));
    CHECK(total(a) == Approx(2.0 + 20.0 / 3.0));
  }
  SUBCASE("symmetric uncapped split") { CHECK(equal_key(V{5, 5}, 4.0) == V{2, 2}); }
  SUBCASE("no offers") { CHECK(equal_key(V{0, 0, 0}, 7.0) == V{0, 0, 0}); }
  SUBCASE("zero offers do not dilute the share") {
    CHECK(equal_key(V{0, 6, 6}, 6.0) == V{0, 3, 3});
  }
}

TEST_CASE("prorate key") {
  CHECK(prorate_key(V{2, 3, 5}, 10.0) == V{2, 3, 5});
  const V half = prorate_key(V{2, 3, 5}, 5.0);
  CHECK(half[0] == Approx(1.0));
  CHECK(half[1] == Approx(1.5));
  CHECK(half[2] == Approx(2.5));
  CHECK(prorate_key(V{7}, 3.0) == V{3});
  CHECK(prorate_key(V{0, 0}, 3.0) == V{0, 0});
}

TEST_CASE("cascade key") {
  SUBCASE("hand trace: second round fills the open members") {
    CHECK(cascade_key(V{2, 8, 8}, 10.0) == V{2, 4, 4});
  }
  SUBCASE("capacity-limited") { CHECK(cascade_key(V{1, 1, 1}, 10.0) == V{1, 1, 1}); }
  SUBCASE("nothing requested") { CHECK(cascade_key(V{3, 4}, 0.0) == V{0, 0}); }
}

TEST_CASE("keys reject negative inputs") {
  CHECK_THROWS_AS(equal_key(V{1}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(prorate_key(V{-1}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(parse_key("lottery"), std::invalid_argument);
  CHECK(parse_key("Cascade") == KeyKind::Cascade);
}

TEST_CASE("random offers: bounds, totals, permutation equivariance") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> cap(0.0, 10.0), req(0.0, 60.0), zero(0.0, 1.0);
  for (KeyKind k : {KeyKind::Equal, KeyKind::Prorate, KeyKind::Cascade}) {
    CAPTURE(to_string(k));
    for (int trial = 0; trial < 1000; ++trial) {
      V offers(static_cast<std::size_t>(size(rng)));
      for (double& o : offers) o = zero(rng) < 0.2 ? 0.0 : cap(rng);
      const double r = req(rng);
      const V act = apply_key(k, offers, r);
      for (std::size_t u = 0; u < offers.size(); ++u) {
        CHECK(act[u] >= 0.0);
        CHECK(act[u] <= offers[u] + 1e-9);
      }
      CHECK(total(act) <= r + 1e-9);
      if (k == KeyKind::Cascade) {
        CHECK(std::abs(total(act) - std::min(r, total(offers))) <= 1e-9);
      }
      if (k == KeyKind::Prorate && r >= total(offers)) {
        for (std::size_t u = 0; u < offers.size(); ++u) CHECK(act[u] == Approx(offers[u]));
      }
      std::vector<std::size_t> perm(offers.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      V permuted(offers.size());
      for (std::size_t u = 0; u < offers.size(); ++u) permuted[u] = offers[perm[u]];
      const V act_p = apply_key(k, permuted, r);
      for (std::size_t u = 0; u < offers.size(); ++u) {
        CHECK(act_p[u] == Approx(act[perm[u]]).epsilon(1e-12));
      }
    }
  }
}
