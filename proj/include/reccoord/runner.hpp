// One entry point for all six run modes over consecutive days.
#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "reccoord/billing.hpp"
#include "reccoord/decentral.hpp"
#include "reccoord/planner.hpp"

namespace reccoord {

enum class RunMode { SoloFix, SoloFlex, ECFix, ECFlex, ECFlexIt, ECFlexItPrimed };

std::string_view to_string(RunMode m);
// Case-insensitive; "ecflexit'" is accepted for the primed variant. Throws
// std::invalid_argument on unknown names.
RunMode parse_mode(std::string_view name);
bool is_decentralized(RunMode m);
const std::vector<RunMode>& all_modes();

struct RunOptions {
  KeyKind key = KeyKind::Equal;
  PlannerOptions planner;
  int max_iterations = 100;
  std::vector<std::size_t> evaluation_order;
};

struct DayResult {
  DaySchedule schedule;
  std::vector<IterationTrace> trace;
};

DayResult run_day(const Scenario& s, RunMode mode, int day, const CommunityState& state,
                  const RunOptions& options);

// Optional hook that may supply a finished day (resume) instead of solving.
using DayLookup = std::function<bool(int day, DayResult& out)>;
using DayDone = std::function<void(const DayResult&)>;

// Days [0, days) in order, carrying state. Traces are appended to `trace`
// when given.
ModeResult run_mode(const Scenario& s, RunMode mode, int days, const RunOptions& options,
                    std::vector<IterationTrace>* trace = nullptr, const DayLookup& lookup = {},
                    const DayDone& done = {});

}  // namespace reccoord
