// Synthetic community generator. Profiles are shaped by hand-picked daily
// patterns with seeded jitter; realism is not a goal, determinism is.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "reccoord/devices.hpp"
#include "reccoord/scenario.hpp"

namespace reccoord {

namespace {

// mt19937_64's output sequence is fixed by the standard; the std
// distributions are not, so they are avoided here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  std::vector<std::size_t> shuffled(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[below(i)]);
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

double round6(double x) { return std::round(x * 1e6) / 1e6; }
double floor6(double x) { return std::floor(x * 1e6) / 1e6; }

std::size_t count_for(double rate, int members) {
  return static_cast<std::size_t>(std::floor(rate * members + 1e-9));
}

double gaussian_bump(double h, double centre, double width) {
  const double z = (h - centre) / width;
  return std::exp(-0.5 * z * z);
}

struct Grid {
  int steps_per_day;
  int days;
  double dt;

  [[nodiscard]] std::size_t n() const { return static_cast<std::size_t>(steps_per_day) * days; }
  [[nodiscard]] double hour(std::size_t t) const {
    return (static_cast<double>(t % steps_per_day) + 0.5) * dt;
  }
  [[nodiscard]] int day(std::size_t t) const { return static_cast<int>(t / steps_per_day); }
  // Step of the day containing `hour`.
  [[nodiscard]] std::size_t step_at(int d, double hour_of_day) const {
    const int k = std::clamp(static_cast<int>(std::floor(hour_of_day / dt)), 0, steps_per_day - 1);
    return static_cast<std::size_t>(d) * steps_per_day + k;
  }
};

std::vector<double> pv_sizes(Rng& rng, std::size_t owners, double total) {
  std::vector<double> sizes(owners, 0.0);
  if (owners == 0) return sizes;
  constexpr double kMin = 2.0;
  constexpr double kMax = 20.0;
  std::vector<double> w(owners);
  double wsum = 0.0;
  for (auto& x : w) wsum += (x = rng.uniform(0.3, 1.7));
  for (std::size_t i = 0; i < owners; ++i) sizes[i] = total * w[i] / wsum;
  // Push sizes into [kMin, kMax] when the total allows it, keeping the sum.
  if (total >= kMin * owners && total <= kMax * owners) {
    for (int pass = 0; pass < 100; ++pass) {
      double excess = 0.0;
      double free_weight = 0.0;
      for (std::size_t i = 0; i < owners; ++i) {
        const double c = std::clamp(sizes[i], kMin, kMax);
        excess += sizes[i] - c;
        sizes[i] = c;
      }
      if (std::abs(excess) < 1e-12) break;
      for (std::size_t i = 0; i < owners; ++i) {
        if ((excess > 0 && sizes[i] < kMax) || (excess < 0 && sizes[i] > kMin)) {
          free_weight += w[i];
        }
      }
      if (free_weight == 0.0) break;
      for (std::size_t i = 0; i < owners; ++i) {
        if ((excess > 0 && sizes[i] < kMax) || (excess < 0 && sizes[i] > kMin)) {
          sizes[i] += excess * w[i] / free_weight;
        }
      }
    }
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < owners; ++i) acc += (sizes[i] = round6(sizes[i]));
  sizes.back() = total - acc;
  return sizes;
}

Series fixed_load(Rng& rng, const Grid& g) {
  const double base = rng.uniform(0.15, 0.35);
  const double morning = rng.uniform(0.3, 1.0);
  const double evening = rng.uniform(0.8, 2.0);
  const double midday = rng.uniform(0.0, 0.4);
  Series out(g.n());
  for (std::size_t t = 0; t < g.n(); ++t) {
    const double h = g.hour(t);
    const double shape = base + morning * gaussian_bump(h, 7.5, 1.0) +
                         midday * gaussian_bump(h, 12.5, 1.5) +
                         evening * gaussian_bump(h, 19.5, 1.5);
    out[t] = round6(shape * rng.uniform(0.85, 1.15));
  }
  return out;
}

Series pv_profile(double kwp, const std::vector<double>& day_factor, const Grid& g) {
  Series out(g.n(), 0.0);
  if (kwp <= 0.0) return out;
  for (std::size_t t = 0; t < g.n(); ++t) {
    const double h = g.hour(t);
    if (h <= 6.0 || h >= 20.0) continue;
    const double shape = std::pow(std::sin(std::numbers::pi * (h - 6.0) / 14.0), 1.5);
    out[t] = round6(kwp * 0.75 * day_factor[g.day(t)] * shape);
  }
  return out;
}

BssParams make_bss(Rng& rng) {
  BssParams b;
  b.capacity_kwh = round6(rng.uniform(5.0, 13.5));
  b.max_power_kw = round6(std::min(5.0, b.capacity_kwh / 2.0));
  b.efficiency = 0.95;
  b.soc_init = 0.5;
  b.soc_min = 0.1;
  b.soc_max = 0.95;
  return b;
}

EvParams make_ev(Rng& rng, const Grid& g) {
  EvParams e;
  const auto n = g.n();
  e.capacity_kwh = round6(rng.uniform(40.0, 75.0));
  e.max_charge_kw = rng.uniform(0.0, 1.0) < 0.5 ? 7.4 : 11.0;
  e.efficiency = round6(rng.uniform(0.9, 0.95));
  e.reluctance_eur = round6(rng.uniform(2.0, 8.0) * g.dt);
  constexpr double kTarget = 0.9;
  e.soc_init = kTarget;
  e.plugged.assign(n, 0.0);
  e.arrival.assign(n, 0.0);
  e.departure.assign(n, 0.0);
  e.soc_arrival.assign(n, 0.0);
  e.power_ref_kw.assign(n, 0.0);

  for (int d = 0; d < g.days; ++d) {
    const std::size_t dep = g.step_at(d, rng.uniform(6.5, 8.5));
    std::size_t arr = g.step_at(d, rng.uniform(15.0, 19.5));
    if (arr <= dep + 1) arr = dep + 2;
    const std::size_t day_start = static_cast<std::size_t>(d) * g.steps_per_day;
    const std::size_t day_end = day_start + g.steps_per_day;
    for (std::size_t t = day_start; t <= dep; ++t) e.plugged[t] = 1.0;
    for (std::size_t t = arr; t < day_end; ++t) e.plugged[t] = 1.0;
    e.departure[dep] = 1.0;
    e.arrival[arr] = 1.0;
    // Leave headroom so reference charging finishes before midnight.
    const double hours_left = static_cast<double>(day_end - arr) * g.dt;
    const double reachable = 0.8 * e.max_charge_kw * e.efficiency * hours_left / e.capacity_kwh;
    e.soc_arrival[arr] = round6(std::max(rng.uniform(0.35, 0.7), kTarget - reachable));

    double soc = e.soc_arrival[arr];
    for (std::size_t t = arr; t < day_end && soc < kTarget; ++t) {
      const double need_kw = (kTarget - soc) * e.capacity_kwh / (e.efficiency * g.dt);
      const double p = round6(std::min(e.max_charge_kw, need_kw));
      e.power_ref_kw[t] = p;
      soc += g.dt * e.efficiency * p / e.capacity_kwh;
    }
  }
  // The reference trajectory doubles as the discomfort reference while
  // plugged; it is rounded down so the reference itself meets it.
  const auto traj = simulate_ev(e, e.power_ref_kw, g.dt);
  e.soc_ref.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (e.plugged[t] == 1.0) e.soc_ref[t] = std::min(1.0, floor6(traj[t]));
  }
  return e;
}

// Thermostat-style reference: after each draw the heater recovers the
// accumulated deficit at full power; after the day's last draw it also keeps
// up with standing losses so the day closes at the initial temperature.
Series boiler_reference(const WbParams& w, const Grid& g) {
  Series p(g.n(), 0.0);
  for (int d = 0; d < g.days; ++d) {
    const std::size_t start = static_cast<std::size_t>(d) * g.steps_per_day;
    const std::size_t end = start + g.steps_per_day;
    std::size_t last_draw = start;
    for (std::size_t t = start; t < end; ++t) {
      if (w.usage_event[t] == 1.0) last_draw = t;
    }
    double deficit_kwh = 0.0;
    bool heating = false;
    for (std::size_t t = start; t < end; ++t) {
      deficit_kwh += (w.usage_loss_kw[t] + w.envelope_loss_kw[t]) * g.dt;
      if (t > start && w.usage_event[t - 1] == 1.0 && w.usage_event[t] == 0.0) heating = true;
      if (heating) {
        const double kw = round6(std::min(w.max_power_kw, deficit_kwh / g.dt));
        p[t] = kw;
        deficit_kwh -= kw * g.dt;
        if (deficit_kwh <= 1e-9 && t < last_draw) heating = false;
      }
    }
  }
  return p;
}

WbParams make_wb(Rng& rng, const Grid& g) {
  WbParams w;
  const auto n = g.n();
  const double litres = rng.uniform(200.0, 300.0);
  w.thermal_coeff = round6(860.0 / litres);
  w.max_power_kw = round6(rng.uniform(2.5, 3.5));
  w.temp_init = 60.0;
  w.temp_max.assign(n, 80.0);
  w.temp_limit.assign(n, 45.0);
  w.usage_event.assign(n, 0.0);
  w.usage_loss_kw.assign(n, 0.0);
  w.envelope_loss_kw.assign(n, round6(rng.uniform(0.04, 0.08)));
  w.reluctance_eur = 1.0;

  const int draw_steps = std::max(1, static_cast<int>(std::lround(0.5 / g.dt)));
  for (int d = 0; d < g.days; ++d) {
    const std::pair<double, double> draws[] = {{rng.uniform(6.5, 8.0), rng.uniform(1.0, 2.0)},
                                               {rng.uniform(18.5, 21.0), rng.uniform(1.5, 2.5)}};
    for (const auto& [hour, kwh] : draws) {
      const std::size_t first = g.step_at(d, hour);
      const std::size_t day_end = static_cast<std::size_t>(d + 1) * g.steps_per_day;
      for (int k = 0; k < draw_steps && first + k < day_end; ++k) {
        w.usage_event[first + k] = 1.0;
        w.usage_loss_kw[first + k] = round6(kwh / (draw_steps * g.dt));
      }
    }
  }
  w.power_ref_kw = boiler_reference(w, g);
  return w;
}

HpParams make_hp(Rng& rng, const Grid& g, const std::vector<double>& outdoor_mean) {
  HpParams h;
  const auto n = g.n();
  h.thermal_coeff = round6(1.0 / rng.uniform(3.0, 6.0));
  h.cop = round6(rng.uniform(2.8, 3.5));
  h.temp_init = 20.0;
  h.temp_limit.assign(n, 19.5);
  h.reluctance_eur = 1.0;
  const double ua = rng.uniform(0.10, 0.20);
  h.wall_loss_kw.resize(n);
  h.power_ref_kw.resize(n);
  double peak = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double outdoor =
        outdoor_mean[g.day(t)] + 4.0 * std::sin(2.0 * std::numbers::pi * (g.hour(t) - 9.0) / 24.0);
    h.wall_loss_kw[t] = round6(std::max(0.0, ua * (20.0 - outdoor)));
    h.power_ref_kw[t] = round6(h.wall_loss_kw[t] / h.cop);
    peak = std::max(peak, h.power_ref_kw[t]);
  }
  h.max_power_kw = round6(std::max(2.0, 2.0 * peak));
  return h;
}

// Scales down hot-water draws until the thermostat reference keeps the
// boiler above its usage limit.
void make_wb_feasible(WbParams& w, const Grid& g) {
  for (int attempt = 0; attempt < 20; ++attempt) {
    const auto temp = simulate_wb(w, w.power_ref_kw, g.dt);
    bool ok = true;
    for (std::size_t t = 0; t < temp.size() && ok; ++t) {
      ok = temp[t] <= w.temp_max[t] && (w.usage_event[t] == 0.0 || temp[t] >= w.temp_limit[t]);
    }
    if (ok) return;
    for (auto& u : w.usage_loss_kw) u = round6(0.8 * u);
    w.power_ref_kw = boiler_reference(w, g);
  }
}

double energy(const Series& p, double dt) {
  double e = 0.0;
  for (double x : p) e += x * dt;
  return e;
}

}  // namespace

Scenario generate_synthetic(const SyntheticConfig& c, std::vector<double>* pv_kwp) {
  if (c.members <= 0) throw ScenarioError("synthetic config: members must be positive");
  if (c.days <= 0) throw ScenarioError("synthetic config: days must be positive");
  for (double r : {c.wb_rate, c.ev_rate, c.hp_rate, c.bss_rate, c.pv_owner_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) throw ScenarioError("synthetic config: rates must lie in [0,1]");
  }
  const double steps_f = 24.0 / c.dt_hours;
  if (!(c.dt_hours > 0.0) || std::abs(steps_f - std::round(steps_f)) > 1e-9) {
    throw ScenarioError("synthetic config: dt_hours must divide 24");
  }
  if (c.pv_total_kwp < 0.0) throw ScenarioError("synthetic config: pv_total_kwp must be >= 0");

  const Grid g{static_cast<int>(std::lround(steps_f)), c.days, c.dt_hours};
  Rng rng(c.seed);
  const auto n_members = static_cast<std::size_t>(c.members);

  Scenario s;
  s.horizon = {g.steps_per_day, g.dt, g.days};
  s.prices = Prices::flat(static_cast<int>(g.n()), c.import_price, c.export_price, c.community_fee);

  std::vector<double> day_factor(g.days);
  std::vector<double> outdoor_mean(g.days);
  for (int d = 0; d < g.days; ++d) {
    day_factor[d] = rng.uniform(0.45, 1.0);
    outdoor_mean[d] = rng.uniform(4.0, 12.0);
  }

  // Device ownership.
  const auto pv_order = rng.shuffled(n_members);
  const std::size_t pv_owners = count_for(c.pv_owner_rate, c.members);
  std::vector<double> kwp(n_members, 0.0);
  const auto sizes = pv_sizes(rng, pv_owners, c.pv_total_kwp);
  for (std::size_t k = 0; k < pv_owners; ++k) kwp[pv_order[k]] = sizes[k];

  auto pick = [&](double rate) {
    std::vector<bool> has(n_members, false);
    const auto order = rng.shuffled(n_members);
    for (std::size_t k = 0; k < count_for(rate, c.members); ++k) has[order[k]] = true;
    return has;
  };
  const auto has_wb = pick(c.wb_rate);
  const auto has_ev = pick(c.ev_rate);
  const auto has_hp = pick(c.hp_rate);
  // Batteries go to PV owners first.
  std::vector<bool> has_bss(n_members, false);
  {
    const auto order = rng.shuffled(n_members);
    std::vector<std::size_t> ranked;
    for (auto i : order) {
      if (kwp[i] > 0.0) ranked.push_back(i);
    }
    for (auto i : order) {
      if (kwp[i] <= 0.0) ranked.push_back(i);
    }
    for (std::size_t k = 0; k < count_for(c.bss_rate, c.members); ++k) has_bss[ranked[k]] = true;
  }

  const int width = c.members >= 100 ? 3 : 2;
  for (std::size_t i = 0; i < n_members; ++i) {
    Member m;
    char id[32];
    std::snprintf(id, sizeof id, "m%0*zu", width, i + 1);
    m.id = id;
    m.fixed_load_kw = fixed_load(rng, g);
    m.pv_max_kw = pv_profile(kwp[i], day_factor, g);
    if (has_bss[i]) m.bss = make_bss(rng);
    if (has_ev[i]) m.ev = make_ev(rng, g);
    if (has_wb[i]) {
      m.wb = make_wb(rng, g);
      make_wb_feasible(*m.wb, g);
    }
    if (has_hp[i]) m.hp = make_hp(rng, g, outdoor_mean);
    auto& cap = m.flexible_energy_cap;
    cap.ev_kwh = m.ev ? energy(m.ev->power_ref_kw, g.dt) : 0.0;
    cap.wb_kwh = m.wb ? energy(m.wb->power_ref_kw, g.dt) : 0.0;
    cap.hp_kwh = m.hp ? energy(m.hp->power_ref_kw, g.dt) : 0.0;
    cap.total_kwh = cap.ev_kwh + cap.wb_kwh + cap.hp_kwh;
    s.members.push_back(std::move(m));
  }

  auto violations = validate_scenario(s);
  if (!violations.empty()) throw ScenarioValidationError(std::move(violations));
  if (pv_kwp) *pv_kwp = kwp;
  return s;
}

}  // namespace reccoord
