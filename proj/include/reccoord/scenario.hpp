// Community scenario model: members, devices, PV, fixed loads, prices and
// the planning horizon. A Scenario is immutable once loaded and validated.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reccoord {

using Series = std::vector<double>;

struct Horizon {
  int steps_per_day = 96;
  double dt_hours = 0.25;
  int num_days = 1;

  [[nodiscard]] int total_steps() const { return steps_per_day * num_days; }

  bool operator==(const Horizon&) const = default;
};

// Retail and community tariffs, one entry per timestep of the whole horizon.
struct Prices {
  Series import_price;
  Series export_price;
  Series community_fee;

  // Flat tariff over `steps` timesteps.
  static Prices flat(int steps, double import_eur, double export_eur, double fee_eur);
  // The [day * steps_per_day, (day + 1) * steps_per_day) window.
  [[nodiscard]] Prices day_slice(int day, int steps_per_day) const;

  bool operator==(const Prices&) const = default;
};

struct BssParams {
  double capacity_kwh = 0.0;
  double max_power_kw = 0.0;
  double efficiency = 1.0;
  double soc_init = 0.5;
  double soc_min = 0.0;
  double soc_max = 1.0;

  bool operator==(const BssParams&) const = default;
};

struct EvParams {
  double capacity_kwh = 0.0;
  double max_charge_kw = 0.0;
  double efficiency = 1.0;
  Series plugged;      // 0/1
  Series arrival;      // 0/1
  Series departure;    // 0/1
  Series soc_arrival;  // read where arrival == 1
  Series soc_ref;
  double soc_init = 0.0;
  Series power_ref_kw;
  double reluctance_eur = 0.0;

  bool operator==(const EvParams&) const = default;
};

struct WbParams {
  double thermal_coeff = 0.0;  // degC per kWh
  double max_power_kw = 0.0;
  double temp_init = 0.0;
  Series temp_max;
  Series temp_limit;
  Series usage_event;  // 0/1
  Series usage_loss_kw;
  Series envelope_loss_kw;
  Series power_ref_kw;
  double reluctance_eur = 0.0;

  bool operator==(const WbParams&) const = default;
};

struct HpParams {
  double thermal_coeff = 0.0;  // degC per kWh of heat
  double max_power_kw = 0.0;   // electrical
  double cop = 1.0;
  double temp_init = 0.0;
  Series temp_limit;
  Series wall_loss_kw;
  Series power_ref_kw;
  double reluctance_eur = 0.0;

  bool operator==(const HpParams&) const = default;
};

// Total reference energy of the flexible devices; reporting metadata only.
struct FlexibleEnergyCap {
  double total_kwh = 0.0;
  double ev_kwh = 0.0;
  double wb_kwh = 0.0;
  double hp_kwh = 0.0;

  bool operator==(const FlexibleEnergyCap&) const = default;
};

struct Member {
  std::string id;
  Series fixed_load_kw;
  Series pv_max_kw;
  std::optional<BssParams> bss;
  std::optional<EvParams> ev;
  std::optional<WbParams> wb;
  std::optional<HpParams> hp;
  FlexibleEnergyCap flexible_energy_cap;

  [[nodiscard]] bool has_flexible_device() const { return ev || wb || hp; }

  bool operator==(const Member&) const = default;
};

struct Scenario {
  Horizon horizon;
  Prices prices;
  std::vector<Member> members;

  [[nodiscard]] const Member* find_member(std::string_view id) const;

  bool operator==(const Scenario&) const = default;
};

// One broken invariant. `path` is slash-separated, e.g.
// "members/h03/ev/power_ref_kw/17".
struct Violation {
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScenarioParseError : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

class ScenarioValidationError : public ScenarioError {
 public:
  explicit ScenarioValidationError(std::vector<Violation> violations);
  [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

inline constexpr int kScenarioSchemaVersion = 1;

// Checks every invariant of the scenario types, including that the
// reference device profiles are themselves feasible.
[[nodiscard]] std::vector<Violation> validate_scenario(const Scenario& s);

// Parses and validates a JSON scenario document.
[[nodiscard]] Scenario load_scenario(std::string_view document);
[[nodiscard]] Scenario load_scenario_file(const std::string& path);

[[nodiscard]] std::string serialize_scenario(const Scenario& s);
void save_scenario_file(const Scenario& s, const std::string& path);

struct SyntheticConfig {
  int members = 20;
  double wb_rate = 0.7;
  double ev_rate = 0.6;
  double hp_rate = 0.5;
  double bss_rate = 0.25;
  double pv_owner_rate = 0.75;
  double pv_total_kwp = 147.0;
  int days = 1;
  double dt_hours = 0.25;
  double import_price = 0.4;
  double export_price = 0.1;
  double community_fee = 0.01;
  std::uint64_t seed = 42;
};

// Deterministic stand-in for a stochastic residential load generator.
// Device counts are floor(rate * members). `pv_kwp`, when given, receives
// each member's PV rating (0 for non-owners); the ratings sum to
// pv_total_kwp.
[[nodiscard]] Scenario generate_synthetic(const SyntheticConfig& config,
                                          std::vector<double>* pv_kwp = nullptr);

}  // namespace reccoord
