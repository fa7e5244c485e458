// Iterative decentralized coordination (ECFlexIt): the community operator
// turns the ECFix residual exchanges into flexibility requests, members
// answer with capacity offers from private LPs, a key of repartition
// bounds the activations, and the loop repeats on the remaining request.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "reccoord/kor.hpp"
#include "reccoord/planner.hpp"
#include "reccoord/scenario.hpp"

namespace reccoord {

struct FlexRequest {
  Series up_kw;    // absorb surplus (community export)
  Series down_kw;  // shed load (community import)
  Series activation_price;
};

struct CapacityOffer {
  std::string member;
  Series up_kw, down_kw;
};

struct ActivationBounds {
  std::string member;
  Series up_kw, down_kw;
};

struct Activation {
  std::string member;
  Series up_kw, down_kw;
};

struct IterationTrace {
  int day = 0;
  int iteration = 0;  // 1-based
  Series request_up, request_down;
  std::vector<CapacityOffer> offers;
  std::vector<ActivationBounds> bounds;
  std::vector<Activation> activations;
  Series remaining_up, remaining_down;
  double activated = 0.0;  // kW summed over steps and directions
};

class IterationCapError : public std::runtime_error {
 public:
  IterationCapError(const std::string& what, std::vector<IterationTrace> trace);
  [[nodiscard]] const std::vector<IterationTrace>& trace() const { return trace_; }

 private:
  std::vector<IterationTrace> trace_;
};

inline constexpr double kRequestEpsilon = 1e-6;
inline constexpr double kRequestClamp = 1e-9;

// ---- Coordinator side: sees only aggregate requests, offers, activations.

// up = sum of retailer exports, down = sum of retailer imports; entries
// below kRequestClamp are set to 0.
FlexRequest initial_request(const DaySchedule& ecfix, const Prices& day_prices);

std::vector<ActivationBounds> refine_bounds(const std::vector<CapacityOffer>& offers,
                                            const FlexRequest& request, KeyKind key);

// Request minus the activations, clamped at 0.
FlexRequest remaining_request(const FlexRequest& request,
                              const std::vector<Activation>& activations);

double activated_volume(const std::vector<Activation>& activations);

// ---- Member side: owns the private device data.

class MemberAgent {
 public:
  // `device_refs` fixes the daily energy of each device; `schedule` is the
  // member's starting schedule (its device part defines the reference
  // total controllable power).
  MemberAgent(const Member& member, int first_step, double dt_hours, DeviceRefs device_refs,
              CarryState state, const MemberSchedule& schedule);

  [[nodiscard]] const std::string& id() const { return member_.id; }
  // Owns a battery or a flexible device.
  [[nodiscard]] bool participates() const;
  [[nodiscard]] const Series& reference_total() const { return ref_total_; }

  CapacityOffer offer(const FlexRequest& request);
  // Solves with the bounds, adopts the result as the new reference.
  Activation activate(const ActivationBounds& bounds, const Series& activation_price);

  // Latest device schedule; exchange fields are left empty.
  [[nodiscard]] const MemberSchedule& schedule() const { return schedule_; }

 private:
  struct Solved;
  Solved solve(const Series& up_ub, const Series& down_ub, const Series& price) const;

  Member member_;
  int first_step_;
  double dt_;
  DeviceRefs device_refs_;
  CarryState state_;
  Series ref_total_;
  MemberSchedule schedule_;
};

struct DecentralOptions {
  KeyKind key = KeyKind::Equal;
  bool primed = false;  // rewrite references with SoloFlex first
  int max_iterations = 100;
  PlannerOptions planner;
  // Order in which members are asked within an iteration; identity when
  // empty. Results never depend on it.
  std::vector<std::size_t> evaluation_order;
};

struct DecentralDay {
  DaySchedule schedule;
  FlexRequest initial;
  std::vector<IterationTrace> trace;
};

std::string decentral_mode_name(bool primed);

DecentralDay run_ecflexit(const Scenario& s, int day, const DecentralOptions& options,
                          const CommunityState* state = nullptr);

std::vector<DecentralDay> run_decentralized(const Scenario& s, int days,
                                            const DecentralOptions& options);

// Exchanges for fixed device schedules: allocates retailer and community
// flows with minimum total bill and fills bills and totals. Each member's
// p_inj must already be set.
void settle_exchanges(DaySchedule& day, const Prices& day_prices);

}  // namespace reccoord
