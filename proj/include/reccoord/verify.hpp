// Independent schedule checker. Uses only the scenario data, the device
// simulators and plain arithmetic; never looks at solver internals.
#pragma once

#include <string>
#include <vector>

#include "reccoord/planner.hpp"
#include "reccoord/scenario.hpp"

namespace reccoord {

struct VerifyTolerances {
  double balance_kw = 1e-6;
  double energy_kwh = 1e-6;  // per-device daily conservation, in kW * steps
  double state = 1e-6;       // SoC fraction or degC
  double discomfort_eur = 1e-6;
  double bill_eur = 1e-6;
};

struct VerifyIssue {
  std::string where;  // e.g. "day 0/h03/ev/soc/17"
  std::string what;
  double error = 0.0;
};

// Checks one day: power balances, community balance, power bounds, daily
// device energy against the scenario references, re-simulated state
// trajectories and state bounds, hinge discomfort, and bills.
std::vector<VerifyIssue> verify_day(const Scenario& s, const DaySchedule& day,
                                    const CommunityState& start,
                                    const VerifyTolerances& tol = {});

// Checks consecutive days, chaining the carried state.
std::vector<VerifyIssue> verify_run(const Scenario& s, const std::vector<DaySchedule>& days,
                                    const VerifyTolerances& tol = {});

std::string describe(const std::vector<VerifyIssue>& issues, std::size_t max_lines = 10);

}  // namespace reccoord
