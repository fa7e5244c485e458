// Bills, the activation reward, per-member benefits and the cross-mode
// summary table.
#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reccoord/planner.hpp"
#include "reccoord/scenario.hpp"

namespace reccoord {

class BillingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Bill {
  std::string member;
  double retailer_cost = 0.0;
  double retailer_revenue = 0.0;
  double community_fees = 0.0;
  double total = 0.0;  // cost - revenue + fees
};

struct Exchanges {
  std::span<const double> i_ret, e_ret, i_com, e_com;
};

// `prices` must be aligned with the exchange series (use Prices::day_slice).
Bill compute_bill(const Exchanges& x, const Prices& prices, double dt_hours);
Bill compute_bill(const MemberSchedule& m, const Prices& day_prices, double dt_hours);

// Reward per displaced kWh: import - export - 2 * fee, per timestep. Throws
// BillingError("non-positive activation reward") if any entry is <= 0.
Series activation_price(const Prices& prices);

// Half the L1 distance between a power schedule and its reference, in kWh:
// every shifted kWh counts once.
double activated_energy(std::span<const double> power, std::span<const double> ref,
                        double dt_hours);

// One mode's days, solved sequentially.
struct ModeResult {
  std::string mode;
  std::vector<DaySchedule> days;
};

struct MemberTotals {
  double bill = 0.0;
  double discomfort = 0.0;
  double flex_revenue = 0.0;
};

struct MemberBenefit {
  std::string member;
  std::string mode;
  double bill = 0.0;
  double bill_delta = 0.0;        // baseline bill - mode bill
  double discomfort = 0.0;
  double discomfort_delta = 0.0;  // mode discomfort - baseline discomfort
  double flex_revenue = 0.0;
};

MemberTotals member_totals(const ModeResult& r, const std::string& member);

// Rows ordered by mode (as given), then member id. Throws BillingError when
// the baseline is missing.
std::vector<MemberBenefit> individual_benefits(const std::vector<ModeResult>& results,
                                               const std::string& baseline);

// Metric names of the summary table, in row order.
inline const std::vector<std::string>& summary_metrics() {
  static const std::vector<std::string> names{
      "bill_eur",       "discomfort_eur", "objective_eur",  "j_ev_eur",
      "j_wb_eur",       "j_hp_eur",       "e_act_kwh",      "e_act_ev_kwh",
      "e_act_wb_kwh",   "e_act_hp_kwh",   "e_dis_bss_kwh",  "flex_revenue_eur",
      "import_ret_kwh", "export_ret_kwh", "community_kwh",  "gap",
      "deviation"};
  return names;
}

struct Report {
  std::vector<std::string> modes;
  // metric -> one value per mode; gap/deviation are NaN where undefined.
  std::map<std::string, std::vector<double>> metrics;

  [[nodiscard]] double get(const std::string& metric, const std::string& mode) const;
};

// gap = (B - B_ECFlex) / (B_SoloFix - B_ECFlex) and
// deviation = (B - B_ECFlex) / B_ECFlex, filled when both references ran.
Report summarize(const std::vector<ModeResult>& results);

}  // namespace reccoord
