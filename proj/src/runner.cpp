#include "reccoord/runner.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace reccoord {

namespace {

PlannerMode planner_mode(RunMode m) {
  switch (m) {
    case RunMode::SoloFix: return PlannerMode::SoloFix;
    case RunMode::SoloFlex: return PlannerMode::SoloFlex;
    case RunMode::ECFix: return PlannerMode::ECFix;
    default: return PlannerMode::ECFlex;
  }
}

}  // namespace

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::SoloFix: return "SoloFix";
    case RunMode::SoloFlex: return "SoloFlex";
    case RunMode::ECFix: return "ECFix";
    case RunMode::ECFlex: return "ECFlex";
    case RunMode::ECFlexIt: return "ECFlexIt";
    case RunMode::ECFlexItPrimed: return "ECFlexItPrimed";
  }
  return "?";
}

const std::vector<RunMode>& all_modes() {
  static const std::vector<RunMode> modes{RunMode::SoloFix, RunMode::SoloFlex,
                                          RunMode::ECFix,   RunMode::ECFlex,
                                          RunMode::ECFlexIt, RunMode::ECFlexItPrimed};
  return modes;
}

RunMode parse_mode(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ecflexit'") return RunMode::ECFlexItPrimed;
  for (RunMode m : all_modes()) {
    std::string candidate(to_string(m));
    std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (candidate == lower) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

bool is_decentralized(RunMode m) {
  return m == RunMode::ECFlexIt || m == RunMode::ECFlexItPrimed;
}

DayResult run_day(const Scenario& s, RunMode mode, int day, const CommunityState& state,
                  const RunOptions& options) {
  DayResult r;
  if (is_decentralized(mode)) {
    DecentralOptions d;
    d.key = options.key;
    d.primed = mode == RunMode::ECFlexItPrimed;
    d.max_iterations = options.max_iterations;
    d.planner = options.planner;
    d.evaluation_order = options.evaluation_order;
    DecentralDay dd = run_ecflexit(s, day, d, &state);
    r.schedule = std::move(dd.schedule);
    r.trace = std::move(dd.trace);
  } else {
    DayInputs in;
    in.state = &state;
    in.options = options.planner;
    r.schedule = solve_centralized(s, day, planner_mode(mode), in);
  }
  return r;
}

ModeResult run_mode(const Scenario& s, RunMode mode, int days, const RunOptions& options,
                    std::vector<IterationTrace>* trace, const DayLookup& lookup,
                    const DayDone& done) {
  ModeResult out;
  out.mode = std::string(to_string(mode));
  CommunityState state = initial_state(s);
  for (int d = 0; d < days; ++d) {
    DayResult r;
    if (!(lookup && lookup(d, r))) {
      r = run_day(s, mode, d, state, options);
      if (done) done(r);
    }
    state = final_state(r.schedule);
    if (trace) trace->insert(trace->end(), r.trace.begin(), r.trace.end());
    out.days.push_back(std::move(r.schedule));
  }
  return out;
}

}  // namespace reccoord
