// Equivalent-battery device models as exact forward recurrences, plus the
// linear discomfort hinge. These never clip; bound checks belong to callers.
#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "reccoord/scenario.hpp"

namespace reccoord {

// SoC fraction for BSS/EV, degC for WB/HP; one value per simulated step.
using StateTrajectory = Series;

struct Discomfort {
  Series per_step;  // EUR, each >= 0
  double total = 0.0;
};

// s_t = s_{t-1} + dt * (eff * charge_t - discharge_t / eff) / capacity,
// starting from soc_init.
StateTrajectory simulate_bss(const BssParams& params, std::span<const double> charge_kw,
                             std::span<const double> discharge_kw, double dt_hours);

// The per-timestep parameter series (arrival, soc_arrival, losses...) are
// read at first_step + k for the k-th simulated step. `initial` overrides
// the stored initial state, which is how multi-day runs carry state over.
StateTrajectory simulate_ev(const EvParams& params, std::span<const double> power_kw,
                            double dt_hours, std::size_t first_step = 0,
                            std::optional<double> initial = std::nullopt);

StateTrajectory simulate_wb(const WbParams& params, std::span<const double> power_kw,
                            double dt_hours, std::size_t first_step = 0,
                            std::optional<double> initial = std::nullopt);

StateTrajectory simulate_hp(const HpParams& params, std::span<const double> power_kw,
                            double dt_hours, std::size_t first_step = 0,
                            std::optional<double> initial = std::nullopt);

// reluctance * max(0, reference_t - state_t), summed.
Discomfort discomfort_ev(std::span<const double> soc, std::span<const double> soc_ref,
                         double reluctance_eur);
Discomfort discomfort_thermal(std::span<const double> temperature,
                              std::span<const double> temp_limit, double reluctance_eur);

}  // namespace reccoord
