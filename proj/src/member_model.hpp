// Internal: LP rows for one member's storage and flexible devices over one
// day. Shared by the centralized planner and the member subproblems of the
// decentralized coordinator.
#pragma once

#include <string>
#include <vector>

#include "reccoord/lp.hpp"
#include "reccoord/planner.hpp"
#include "reccoord/scenario.hpp"

namespace reccoord::detail {

struct MemberDeviceVars {
  std::vector<VarId> cha, dis, soc_bss;
  std::vector<VarId> ev, soc_ev, j_ev;
  std::vector<VarId> wb, temp_wb, j_wb;
  std::vector<VarId> hp, temp_hp, j_hp;

  // Terms for the member's total controllable power at step k:
  // P^EV + P^WB + P^HP + P^cha - P^dis.
  [[nodiscard]] std::vector<Term> controllable_terms(std::size_t k) const;
};

struct DayWindow {
  int first_step = 0;
  int steps = 0;
  double dt = 0.0;
};

// Adds variables and rows for the member's BSS, EV, WB and HP: power and
// state bounds, state recurrences, daily energy conservation against
// `refs`, and the discomfort epigraphs (each discomfort variable carries
// objective cost 1). With `pin_flexible` the EV/WB/HP powers are fixed to
// `refs`.
MemberDeviceVars add_member_devices(LpProblem& lp, const Member& m, const DayWindow& w,
                                    const DeviceRefs& refs, const CarryState& state,
                                    bool pin_flexible, const std::string& prefix);

// Copies the device part of an LP solution into `out`.
void extract_devices(const LpSolution& sol, const MemberDeviceVars& v, MemberSchedule& out,
                     int steps);

}  // namespace reccoord::detail
