#include "reccoord/devices.hpp"

#include <algorithm>
#include <stdexcept>

namespace reccoord {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": series length mismatch");
  }
}

Discomfort hinge(std::span<const double> state, std::span<const double> reference,
                 double reluctance) {
  require_same_length(state.size(), reference.size(), "discomfort");
  Discomfort d;
  d.per_step.resize(state.size());
  for (std::size_t t = 0; t < state.size(); ++t) {
    d.per_step[t] = reluctance * std::max(0.0, reference[t] - state[t]);
    d.total += d.per_step[t];
  }
  return d;
}

}  // namespace

StateTrajectory simulate_bss(const BssParams& p, std::span<const double> charge_kw,
                             std::span<const double> discharge_kw, double dt) {
  require_same_length(charge_kw.size(), discharge_kw.size(), "simulate_bss");
  StateTrajectory soc(charge_kw.size());
  double prev = p.soc_init;
  for (std::size_t t = 0; t < soc.size(); ++t) {
    prev += dt * (p.efficiency * charge_kw[t] - discharge_kw[t] / p.efficiency) / p.capacity_kwh;
    soc[t] = prev;
  }
  return soc;
}

StateTrajectory simulate_ev(const EvParams& p, std::span<const double> power_kw, double dt,
                            std::size_t first_step, std::optional<double> initial) {
  StateTrajectory soc(power_kw.size());
  double prev = initial.value_or(p.soc_init);
  for (std::size_t k = 0; k < soc.size(); ++k) {
    const std::size_t t = first_step + k;
    const double arr = p.arrival[t];
    prev = arr * p.soc_arrival[t] + (1.0 - arr) * prev +
           dt * p.efficiency * power_kw[k] / p.capacity_kwh;
    soc[k] = prev;
  }
  return soc;
}

StateTrajectory simulate_wb(const WbParams& p, std::span<const double> power_kw, double dt,
                            std::size_t first_step, std::optional<double> initial) {
  StateTrajectory temp(power_kw.size());
  double prev = initial.value_or(p.temp_init);
  for (std::size_t k = 0; k < temp.size(); ++k) {
    const std::size_t t = first_step + k;
    prev += dt * (power_kw[k] - p.usage_loss_kw[t] - p.envelope_loss_kw[t]) * p.thermal_coeff;
    temp[k] = prev;
  }
  return temp;
}

StateTrajectory simulate_hp(const HpParams& p, std::span<const double> power_kw, double dt,
                            std::size_t first_step, std::optional<double> initial) {
  StateTrajectory temp(power_kw.size());
  double prev = initial.value_or(p.temp_init);
  for (std::size_t k = 0; k < temp.size(); ++k) {
    const std::size_t t = first_step + k;
    prev += dt * (p.cop * power_kw[k] - p.wall_loss_kw[t]) * p.thermal_coeff;
    temp[k] = prev;
  }
  return temp;
}

Discomfort discomfort_ev(std::span<const double> soc, std::span<const double> soc_ref,
                         double reluctance_eur) {
  return hinge(soc, soc_ref, reluctance_eur);
}

Discomfort discomfort_thermal(std::span<const double> temperature,
                              std::span<const double> temp_limit, double reluctance_eur) {
  return hinge(temperature, temp_limit, reluctance_eur);
}

}  // namespace reccoord
