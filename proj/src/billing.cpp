#include "reccoord/billing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace reccoord {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sum(const Series& s) {
  double acc = 0.0;
  for (double x : s) acc += x;
  return acc;
}

struct ModeTotals {
  double bill = 0, discomfort = 0, objective = 0;
  double j_ev = 0, j_wb = 0, j_hp = 0;
  double e_ev = 0, e_wb = 0, e_hp = 0, e_dis = 0;
  double revenue = 0, imp = 0, exp = 0, com = 0;
};

ModeTotals totals(const ModeResult& r) {
  ModeTotals t;
  for (const DaySchedule& d : r.days) {
    t.objective += d.objective;
    for (const MemberSchedule& m : d.members) {
      t.bill += m.bill;
      t.discomfort += m.discomfort;
      t.j_ev += sum(m.j_ev);
      t.j_wb += sum(m.j_wb);
      t.j_hp += sum(m.j_hp);
      if (!m.ref_ev.empty()) t.e_ev += activated_energy(m.p_ev, m.ref_ev, d.dt_hours);
      if (!m.ref_wb.empty()) t.e_wb += activated_energy(m.p_wb, m.ref_wb, d.dt_hours);
      if (!m.ref_hp.empty()) t.e_hp += activated_energy(m.p_hp, m.ref_hp, d.dt_hours);
      t.e_dis += sum(m.p_dis) * d.dt_hours;
      t.revenue += m.flex_revenue;
      t.imp += sum(m.i_ret) * d.dt_hours;
      t.exp += sum(m.e_ret) * d.dt_hours;
      t.com += sum(m.i_com) * d.dt_hours;
    }
  }
  return t;
}

const ModeResult* find_mode(const std::vector<ModeResult>& results, const std::string& mode) {
  for (const ModeResult& r : results) {
    if (r.mode == mode) return &r;
  }
  return nullptr;
}

}  // namespace

Bill compute_bill(const Exchanges& x, const Prices& prices, double dt_hours) {
  const std::size_t n = x.i_ret.size();
  if (x.e_ret.size() != n || x.i_com.size() != n || x.e_com.size() != n ||
      prices.import_price.size() != n || prices.export_price.size() != n ||
      prices.community_fee.size() != n) {
    throw BillingError("exchange and price series differ in length");
  }
  Bill b;
  for (std::size_t k = 0; k < n; ++k) {
    b.retailer_cost += prices.import_price[k] * x.i_ret[k];
    b.retailer_revenue += prices.export_price[k] * x.e_ret[k];
    b.community_fees += prices.community_fee[k] * (x.i_com[k] + x.e_com[k]);
  }
  b.retailer_cost *= dt_hours;
  b.retailer_revenue *= dt_hours;
  b.community_fees *= dt_hours;
  b.total = b.retailer_cost - b.retailer_revenue + b.community_fees;
  return b;
}

Bill compute_bill(const MemberSchedule& m, const Prices& day_prices, double dt_hours) {
  Bill b = compute_bill(Exchanges{m.i_ret, m.e_ret, m.i_com, m.e_com}, day_prices, dt_hours);
  b.member = m.id;
  return b;
}

Series activation_price(const Prices& prices) {
  const std::size_t n = prices.import_price.size();
  if (prices.export_price.size() != n || prices.community_fee.size() != n) {
    throw BillingError("price series differ in length");
  }
  Series out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = prices.import_price[k] - prices.export_price[k] - 2.0 * prices.community_fee[k];
    if (!(out[k] > 0.0)) throw BillingError("non-positive activation reward");
  }
  return out;
}

double activated_energy(std::span<const double> power, std::span<const double> ref,
                        double dt_hours) {
  if (power.size() != ref.size()) throw BillingError("power and reference differ in length");
  double l1 = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) l1 += std::abs(power[k] - ref[k]);
  return l1 * dt_hours / 2.0;
}

MemberTotals member_totals(const ModeResult& r, const std::string& member) {
  MemberTotals t;
  for (const DaySchedule& d : r.days) {
    for (const MemberSchedule& m : d.members) {
      if (m.id != member) continue;
      t.bill += m.bill;
      t.discomfort += m.discomfort;
      t.flex_revenue += m.flex_revenue;
    }
  }
  return t;
}

std::vector<MemberBenefit> individual_benefits(const std::vector<ModeResult>& results,
                                               const std::string& baseline) {
  const ModeResult* base = find_mode(results, baseline);
  if (!base) throw BillingError("baseline mode '" + baseline + "' was not run");
  std::set<std::string> ids;
  for (const DaySchedule& d : base->days) {
    for (const MemberSchedule& m : d.members) ids.insert(m.id);
  }
  std::vector<MemberBenefit> out;
  for (const ModeResult& r : results) {
    for (const std::string& id : ids) {
      const MemberTotals b = member_totals(*base, id);
      const MemberTotals t = member_totals(r, id);
      MemberBenefit mb;
      mb.member = id;
      mb.mode = r.mode;
      mb.bill = t.bill;
      mb.bill_delta = r.mode == baseline ? 0.0 : b.bill - t.bill;
      mb.discomfort = t.discomfort;
      mb.discomfort_delta = r.mode == baseline ? 0.0 : t.discomfort - b.discomfort;
      mb.flex_revenue = t.flex_revenue;
      out.push_back(mb);
    }
  }
  return out;
}

double Report::get(const std::string& metric, const std::string& mode) const {
  const auto it = metrics.find(metric);
  if (it == metrics.end()) throw BillingError("unknown metric '" + metric + "'");
  const auto pos = std::find(modes.begin(), modes.end(), mode);
  if (pos == modes.end()) throw BillingError("mode '" + mode + "' not in report");
  return it->second[static_cast<std::size_t>(pos - modes.begin())];
}

Report summarize(const std::vector<ModeResult>& results) {
  Report rep;
  for (const std::string& name : summary_metrics()) rep.metrics[name] = {};
  const ModeResult* central = find_mode(results, "ECFlex");
  const ModeResult* solo = find_mode(results, "SoloFix");
  const double b_central = central ? totals(*central).bill : kNaN;
  const double b_solo = solo ? totals(*solo).bill : kNaN;

  for (const ModeResult& r : results) {
    const ModeTotals t = totals(r);
    rep.modes.push_back(r.mode);
    auto put = [&rep](const char* name, double v) { rep.metrics[name].push_back(v); };
    put("bill_eur", t.bill);
    put("discomfort_eur", t.discomfort);
    put("objective_eur", t.objective);
    put("j_ev_eur", t.j_ev);
    put("j_wb_eur", t.j_wb);
    put("j_hp_eur", t.j_hp);
    put("e_act_kwh", t.e_ev + t.e_wb + t.e_hp);
    put("e_act_ev_kwh", t.e_ev);
    put("e_act_wb_kwh", t.e_wb);
    put("e_act_hp_kwh", t.e_hp);
    put("e_dis_bss_kwh", t.e_dis);
    put("flex_revenue_eur", t.revenue);
    put("import_ret_kwh", t.imp);
    put("export_ret_kwh", t.exp);
    put("community_kwh", t.com);
    const bool gap_defined = central && solo && b_solo != b_central;
    put("gap", gap_defined ? (t.bill - b_central) / (b_solo - b_central) : kNaN);
    put("deviation", central && b_central != 0.0 ? (t.bill - b_central) / b_central : kNaN);
  }
  return rep;
}

}  // namespace reccoord
