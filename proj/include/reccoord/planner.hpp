// Centralized day-ahead planning: the full community problem (ECFlex) and
// its benchmark restrictions.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reccoord/lp.hpp"
#include "reccoord/scenario.hpp"

namespace reccoord {

// SoloFix/SoloFlex forbid community exchanges; SoloFix/ECFix pin the
// flexible devices to their reference profiles.
enum class PlannerMode { SoloFix, SoloFlex, ECFix, ECFlex };

std::string_view to_string(PlannerMode m);
bool allows_community_exchange(PlannerMode m);
bool allows_flexibility(PlannerMode m);

// Reference powers of one member's flexible devices over one day; a series
// is empty when the member lacks that device.
struct DeviceRefs {
  Series ev;
  Series wb;
  Series hp;
};
using CommunityRefs = std::vector<DeviceRefs>;  // indexed like Scenario::members

// EV/WB/HP state carried across days. BSS re-anchors to soc_init daily.
struct CarryState {
  std::optional<double> ev_soc;
  std::optional<double> wb_temp;
  std::optional<double> hp_temp;
};
using CommunityState = std::vector<CarryState>;

struct MemberSchedule {
  std::string id;
  Series i_ret, e_ret, i_com, e_com;
  Series p_pv, p_cha, p_dis, p_ev, p_wb, p_hp, p_inj;
  Series soc_bss, soc_ev, temp_wb, temp_hp;
  Series j_ev, j_wb, j_hp;
  // Original scenario references of the day, used to measure activation;
  // empty when the member lacks the device.
  Series ref_ev, ref_wb, ref_hp;
  // Cumulative activated flexibility; zero outside the decentralized mode.
  Series act_up, act_down;
  double bill = 0.0;
  double discomfort = 0.0;
  double flex_revenue = 0.0;
};

struct DaySchedule {
  int day = 0;
  std::string mode;
  int first_step = 0;
  double dt_hours = 0.0;
  std::vector<MemberSchedule> members;
  double objective = 0.0;  // sum of bills and discomfort
  double total_bill = 0.0;
  double total_discomfort = 0.0;
};

struct PlannerOptions {
  bool allow_curtailment = false;
};

// Inputs that vary per call: rewritten references and carried state.
struct DayInputs {
  const CommunityRefs* refs = nullptr;     // scenario references when null
  const CommunityState* state = nullptr;   // scenario initial states when null
  PlannerOptions options;
};

class PlanningError : public std::runtime_error {
 public:
  PlanningError(const std::string& what, int day, std::string mode, LpStatus status);
  [[nodiscard]] int day() const { return day_; }
  [[nodiscard]] const std::string& mode() const { return mode_; }
  [[nodiscard]] LpStatus status() const { return status_; }

 private:
  int day_;
  std::string mode_;
  LpStatus status_;
};

// The scenario's reference profiles for `day`.
CommunityRefs scenario_refs(const Scenario& s, int day);
CommunityState initial_state(const Scenario& s);
CommunityState final_state(const DaySchedule& day);

LpProblem build_day_problem(const Scenario& s, int day, PlannerMode mode,
                            const DayInputs& inputs = {});

DaySchedule solve_centralized(const Scenario& s, int day, PlannerMode mode,
                              const DayInputs& inputs = {});

// Optimal device powers of SoloFlex for the day, to be used as rewritten
// references. Discomfort references are left untouched.
CommunityRefs prioritize_self_consumption(const Scenario& s, int day,
                                          const CommunityState* state = nullptr,
                                          const PlannerOptions& options = {});

// Days [0, days) solved in order with state carry-over.
std::vector<DaySchedule> run_centralized(const Scenario& s, PlannerMode mode, int days,
                                         const PlannerOptions& options = {});

}  // namespace reccoord
