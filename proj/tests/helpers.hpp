// Hand-built scenarios shared by the unit tests.
#pragma once

#include <string>

#include "reccoord/scenario.hpp"

namespace testutil {

using reccoord::Series;

inline reccoord::Scenario empty_scenario(int steps, double dt, int days = 1,
                                         double import_eur = 0.4, double export_eur = 0.1,
                                         double fee_eur = 0.01) {
  reccoord::Scenario s;
  s.horizon = {steps, dt, days};
  s.prices = reccoord::Prices::flat(steps * days, import_eur, export_eur, fee_eur);
  return s;
}

inline reccoord::Member plain_member(const std::string& id, Series fixed, Series pv) {
  reccoord::Member m;
  m.id = id;
  m.fixed_load_kw = std::move(fixed);
  m.pv_max_kw = std::move(pv);
  return m;
}

inline Series constant(std::size_t n, double v) { return Series(n, v); }

// Water boiler with no envelope losses, always-satisfied limit 45 degC,
// ceiling 80 degC, reluctance 1 EUR/degC.
inline reccoord::WbParams boiler(Series usage_loss, Series power_ref, double coeff = 1.0,
                                 double max_kw = 3.0, double init = 60.0) {
  const std::size_t n = usage_loss.size();
  reccoord::WbParams w;
  w.thermal_coeff = coeff;
  w.max_power_kw = max_kw;
  w.temp_init = init;
  w.temp_max = constant(n, 80.0);
  w.temp_limit = constant(n, 45.0);
  w.usage_event = Series(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) w.usage_event[t] = usage_loss[t] > 0.0 ? 1.0 : 0.0;
  w.usage_loss_kw = std::move(usage_loss);
  w.envelope_loss_kw = constant(n, 0.0);
  w.power_ref_kw = std::move(power_ref);
  w.reluctance_eur = 1.0;
  return w;
}

// Heat pump with room limit 20 degC starting at 21 degC.
inline reccoord::HpParams heat_pump(Series wall_loss, Series power_ref, double coeff = 0.5,
                                    double cop = 3.0, double max_kw = 3.0) {
  const std::size_t n = wall_loss.size();
  reccoord::HpParams h;
  h.thermal_coeff = coeff;
  h.max_power_kw = max_kw;
  h.cop = cop;
  h.temp_init = 21.0;
  h.temp_limit = constant(n, 20.0);
  h.wall_loss_kw = std::move(wall_loss);
  h.power_ref_kw = std::move(power_ref);
  h.reluctance_eur = 1.0;
  return h;
}

// EV plugged all day, departs at the last step with target `target`.
inline reccoord::EvParams always_plugged_ev(std::size_t n, double capacity, double max_kw,
                                            double soc_init, double target, Series power_ref,
                                            double alpha = 1.0) {
  reccoord::EvParams e;
  e.capacity_kwh = capacity;
  e.max_charge_kw = max_kw;
  e.efficiency = 1.0;
  e.plugged = constant(n, 1.0);
  e.arrival = constant(n, 0.0);
  e.departure = constant(n, 0.0);
  e.departure[n - 1] = 1.0;
  e.soc_arrival = constant(n, 0.0);
  e.soc_ref = constant(n, target);
  e.soc_init = soc_init;
  e.power_ref_kw = std::move(power_ref);
  e.reluctance_eur = alpha;
  return e;
}

inline reccoord::BssParams battery(double capacity, double max_kw, double eff = 1.0,
                                   double init = 0.5) {
  return {capacity, max_kw, eff, init, 0.0, 1.0};
}

}  // namespace testutil
