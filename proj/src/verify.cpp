#include "reccoord/verify.hpp"

#include <cmath>
#include <sstream>

#include "reccoord/billing.hpp"
#include "reccoord/devices.hpp"

namespace reccoord {

namespace {

class Checker {
 public:
  Checker(std::vector<VerifyIssue>& out, std::string prefix)
      : out_(out), prefix_(std::move(prefix)) {}

  void near(const std::string& where, double got, double want, double tol, const char* what) {
    const double err = std::abs(got - want);
    if (!(err <= tol)) out_.push_back({prefix_ + where, what, err});
  }
  void at_least(const std::string& where, double got, double lo, double tol, const char* what) {
    if (!(got >= lo - tol)) out_.push_back({prefix_ + where, what, lo - got});
  }
  void at_most(const std::string& where, double got, double hi, double tol, const char* what) {
    if (!(got <= hi + tol)) out_.push_back({prefix_ + where, what, got - hi});
  }

 private:
  std::vector<VerifyIssue>& out_;
  std::string prefix_;
};

std::string idx(const std::string& base, std::size_t k) {
  return base + "/" + std::to_string(k);
}

double sum(const Series& s) {
  double acc = 0.0;
  for (double x : s) acc += x;
  return acc;
}

std::span<const double> window(const Series& s, std::size_t first, std::size_t n) {
  return std::span<const double>(s).subspan(first, n);
}

}  // namespace

std::vector<VerifyIssue> verify_day(const Scenario& s, const DaySchedule& day,
                                    const CommunityState& start, const VerifyTolerances& tol) {
  std::vector<VerifyIssue> issues;
  Checker c(issues, "day " + std::to_string(day.day) + "/");
  const std::size_t n = static_cast<std::size_t>(s.horizon.steps_per_day);
  const std::size_t first = static_cast<std::size_t>(day.day) * n;
  const double dt = s.horizon.dt_hours;
  const Prices prices = s.prices.day_slice(day.day, s.horizon.steps_per_day);

  if (day.members.size() != s.members.size()) {
    issues.push_back({"day " + std::to_string(day.day), "member count differs from scenario",
                      0.0});
    return issues;
  }

  Series community(n, 0.0);
  for (std::size_t u = 0; u < s.members.size(); ++u) {
    const Member& m = s.members[u];
    const MemberSchedule& ms = day.members[u];
    const std::string id = m.id;
    if (ms.id != id) {
      issues.push_back({id, "member order differs from scenario", 0.0});
      continue;
    }
    const CarryState& st = start[u];

    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t t = first + k;
      const double flex = ms.p_ev[k] + ms.p_wb[k] + ms.p_hp[k];
      c.near(idx(id + "/physical", k), ms.p_inj[k],
             ms.p_pv[k] + ms.p_dis[k] - m.fixed_load_kw[t] - flex - ms.p_cha[k], tol.balance_kw,
             "physical balance");
      c.near(idx(id + "/virtual", k), ms.p_inj[k],
             ms.e_ret[k] + ms.e_com[k] - ms.i_ret[k] - ms.i_com[k], tol.balance_kw,
             "virtual balance");
      c.at_most(idx(id + "/pv", k), ms.p_pv[k], m.pv_max_kw[t], tol.balance_kw,
                "PV above available");
      for (const auto* x : {&ms.i_ret, &ms.e_ret, &ms.i_com, &ms.e_com, &ms.p_pv}) {
        c.at_least(idx(id + "/exchange", k), (*x)[k], 0.0, tol.balance_kw, "negative flow");
      }
      community[k] += ms.e_com[k] - ms.i_com[k];
    }

    if (m.bss) {
      const auto& b = *m.bss;
      const auto soc = simulate_bss(b, ms.p_cha, ms.p_dis, dt);
      for (std::size_t k = 0; k < n; ++k) {
        const std::string w = idx(id + "/bss", k);
        c.near(w, ms.soc_bss[k], soc[k], tol.state, "BSS state differs from simulation");
        c.at_least(w, soc[k], b.soc_min, tol.state, "BSS below soc_min");
        c.at_most(w, soc[k], b.soc_max, tol.state, "BSS above soc_max");
        c.at_least(w, ms.p_cha[k], 0.0, tol.balance_kw, "negative charge");
        c.at_least(w, ms.p_dis[k], 0.0, tol.balance_kw, "negative discharge");
        c.at_most(w, ms.p_cha[k], b.max_power_kw, tol.balance_kw, "charge above rating");
        c.at_most(w, ms.p_dis[k], b.max_power_kw, tol.balance_kw, "discharge above rating");
      }
      c.near(id + "/bss/end", soc[n - 1], b.soc_init, tol.state, "BSS not back at soc_init");
    } else {
      c.near(id + "/bss", sum(ms.p_cha) + sum(ms.p_dis), 0.0, tol.balance_kw,
             "battery power without a battery");
    }

    double discomfort = 0.0;
    if (m.ev) {
      const auto& e = *m.ev;
      const auto soc = simulate_ev(e, ms.p_ev, dt, first, st.ev_soc);
      const auto j = discomfort_ev(soc, window(e.soc_ref, first, n), e.reluctance_eur);
      discomfort += j.total;
      double ref = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t t = first + k;
        const std::string w = idx(id + "/ev", k);
        ref += e.power_ref_kw[t];
        c.near(w, ms.soc_ev[k], soc[k], tol.state, "EV state differs from simulation");
        c.at_most(w, soc[k], 1.0, tol.state, "EV above full");
        c.at_least(w, soc[k], e.departure[t] * e.soc_ref[t], tol.state, "EV misses departure");
        c.at_least(w, ms.p_ev[k], 0.0, tol.balance_kw, "negative EV power");
        c.at_most(w, ms.p_ev[k], e.plugged[t] * e.max_charge_kw, tol.balance_kw,
                  "EV power above rating or unplugged");
        c.near(w, ms.j_ev[k], j.per_step[k], tol.discomfort_eur, "EV discomfort differs");
      }
      c.near(id + "/ev/energy", sum(ms.p_ev), ref, tol.energy_kwh,
             "EV daily energy differs from reference");
    }
    if (m.wb) {
      const auto& wb = *m.wb;
      const auto temp = simulate_wb(wb, ms.p_wb, dt, first, st.wb_temp);
      const auto j = discomfort_thermal(temp, window(wb.temp_limit, first, n), wb.reluctance_eur);
      discomfort += j.total;
      double ref = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t t = first + k;
        const std::string w = idx(id + "/wb", k);
        ref += wb.power_ref_kw[t];
        c.near(w, ms.temp_wb[k], temp[k], tol.state, "WB state differs from simulation");
        c.at_most(w, temp[k], wb.temp_max[t], tol.state, "WB above temp_max");
        c.at_least(w, temp[k], wb.usage_event[t] * wb.temp_limit[t], tol.state,
                   "WB below limit during usage");
        c.at_least(w, ms.p_wb[k], 0.0, tol.balance_kw, "negative WB power");
        c.at_most(w, ms.p_wb[k], wb.max_power_kw, tol.balance_kw, "WB power above rating");
        c.near(w, ms.j_wb[k], j.per_step[k], tol.discomfort_eur, "WB discomfort differs");
      }
      c.near(id + "/wb/energy", sum(ms.p_wb), ref, tol.energy_kwh,
             "WB daily energy differs from reference");
    }
    if (m.hp) {
      const auto& hp = *m.hp;
      const auto temp = simulate_hp(hp, ms.p_hp, dt, first, st.hp_temp);
      const auto j = discomfort_thermal(temp, window(hp.temp_limit, first, n), hp.reluctance_eur);
      discomfort += j.total;
      double ref = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t t = first + k;
        const std::string w = idx(id + "/hp", k);
        ref += hp.power_ref_kw[t];
        c.near(w, ms.temp_hp[k], temp[k], tol.state, "HP state differs from simulation");
        c.at_least(w, ms.p_hp[k], 0.0, tol.balance_kw, "negative HP power");
        c.at_most(w, ms.p_hp[k], hp.max_power_kw, tol.balance_kw, "HP power above rating");
        c.near(w, ms.j_hp[k], j.per_step[k], tol.discomfort_eur, "HP discomfort differs");
      }
      c.near(id + "/hp/energy", sum(ms.p_hp), ref, tol.energy_kwh,
             "HP daily energy differs from reference");
    }
    c.near(id + "/discomfort", ms.discomfort, discomfort, tol.discomfort_eur * static_cast<double>(n),
           "discomfort total differs");
    c.near(id + "/bill", ms.bill, compute_bill(ms, prices, dt).total, tol.bill_eur, "bill differs");
  }
  for (std::size_t k = 0; k < n; ++k) {
    c.near(idx("community", k), community[k], 0.0, tol.balance_kw, "community balance");
  }
  return issues;
}

std::vector<VerifyIssue> verify_run(const Scenario& s, const std::vector<DaySchedule>& days,
                                    const VerifyTolerances& tol) {
  std::vector<VerifyIssue> all;
  CommunityState state = initial_state(s);
  for (const DaySchedule& d : days) {
    auto issues = verify_day(s, d, state, tol);
    all.insert(all.end(), issues.begin(), issues.end());
    state = final_state(d);
  }
  return all;
}

std::string describe(const std::vector<VerifyIssue>& issues, std::size_t max_lines) {
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size() && i < max_lines; ++i) {
    os << issues[i].where << ": " << issues[i].what << " (error " << issues[i].error << ")\n";
  }
  if (issues.size() > max_lines) os << "... " << issues.size() - max_lines << " more\n";
  return os.str();
}

}  // namespace reccoord
