#include "member_model.hpp"

namespace reccoord::detail {

namespace {

std::string name(const std::string& prefix, const char* what, int k) {
  return prefix + what + "[" + std::to_string(k) + "]";
}

Series values(const LpSolution& sol, const std::vector<VarId>& vars, int steps) {
  if (vars.empty()) return Series(static_cast<std::size_t>(steps), 0.0);
  Series out(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) out[k] = sol.value(vars[k]);
  return out;
}

double sum(const Series& s) {
  double acc = 0.0;
  for (double x : s) acc += x;
  return acc;
}

}  // namespace

std::vector<Term> MemberDeviceVars::controllable_terms(std::size_t k) const {
  std::vector<Term> terms;
  if (!ev.empty()) terms.push_back({ev[k], 1.0});
  if (!wb.empty()) terms.push_back({wb[k], 1.0});
  if (!hp.empty()) terms.push_back({hp[k], 1.0});
  if (!cha.empty()) {
    terms.push_back({cha[k], 1.0});
    terms.push_back({dis[k], -1.0});
  }
  return terms;
}

MemberDeviceVars add_member_devices(LpProblem& lp, const Member& m, const DayWindow& w,
                                    const DeviceRefs& refs, const CarryState& state,
                                    bool pin_flexible, const std::string& prefix) {
  MemberDeviceVars v;
  const int n = w.steps;
  const double dt = w.dt;
  auto at = [&w](int k) { return static_cast<std::size_t>(w.first_step + k); };

  if (m.bss) {
    const auto& b = *m.bss;
    for (int k = 0; k < n; ++k) {
      v.cha.push_back(lp.add_variable(name(prefix, "p_cha", k), 0.0, b.max_power_kw));
      v.dis.push_back(lp.add_variable(name(prefix, "p_dis", k), 0.0, b.max_power_kw));
      v.soc_bss.push_back(lp.add_variable(name(prefix, "soc_bss", k), b.soc_min, b.soc_max));
    }
    for (int k = 0; k < n; ++k) {
      std::vector<Term> row{{v.soc_bss[k], 1.0},
                            {v.cha[k], -dt * b.efficiency / b.capacity_kwh},
                            {v.dis[k], dt / (b.efficiency * b.capacity_kwh)}};
      double rhs = 0.0;
      if (k == 0) {
        rhs = b.soc_init;
      } else {
        row.push_back({v.soc_bss[k - 1], -1.0});
      }
      lp.add_constraint(name(prefix, "bss_dyn", k), std::move(row), Relation::Equal, rhs);
    }
    lp.add_constraint(prefix + "bss_end", {{v.soc_bss[n - 1], 1.0}}, Relation::Equal, b.soc_init);
  }

  if (m.ev) {
    const auto& e = *m.ev;
    const double init = state.ev_soc.value_or(e.soc_init);
    double ref_total = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::size_t t = at(k);
      const double ub = e.plugged[t] * e.max_charge_kw;
      const VarId p = lp.add_variable(name(prefix, "p_ev", k), 0.0, ub);
      if (pin_flexible) lp.fix(p, refs.ev[k]);
      v.ev.push_back(p);
      v.soc_ev.push_back(
          lp.add_variable(name(prefix, "soc_ev", k), e.departure[t] * e.soc_ref[t], 1.0));
      v.j_ev.push_back(lp.add_variable(name(prefix, "j_ev", k), 0.0, kInf, 1.0));
      ref_total += refs.ev[k];
    }
    for (int k = 0; k < n; ++k) {
      const std::size_t t = at(k);
      const double arr = e.arrival[t];
      std::vector<Term> row{{v.soc_ev[k], 1.0}, {v.ev[k], -dt * e.efficiency / e.capacity_kwh}};
      double rhs = arr * e.soc_arrival[t];
      if (k == 0) {
        rhs += (1.0 - arr) * init;
      } else if (arr != 1.0) {
        row.push_back({v.soc_ev[k - 1], -(1.0 - arr)});
      }
      lp.add_constraint(name(prefix, "ev_dyn", k), std::move(row), Relation::Equal, rhs);
      lp.add_constraint(name(prefix, "ev_disc", k),
                        {{v.j_ev[k], 1.0}, {v.soc_ev[k], e.reluctance_eur}},
                        Relation::GreaterEqual, e.reluctance_eur * e.soc_ref[t]);
    }
    std::vector<Term> total;
    for (const auto& p : v.ev) total.push_back({p, 1.0});
    lp.add_constraint(prefix + "ev_energy", std::move(total), Relation::Equal, ref_total);
  }

  if (m.wb) {
    const auto& wb = *m.wb;
    const double init = state.wb_temp.value_or(wb.temp_init);
    double ref_total = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::size_t t = at(k);
      const VarId p = lp.add_variable(name(prefix, "p_wb", k), 0.0, wb.max_power_kw);
      if (pin_flexible) lp.fix(p, refs.wb[k]);
      v.wb.push_back(p);
      v.temp_wb.push_back(lp.add_variable(name(prefix, "temp_wb", k),
                                          wb.usage_event[t] * wb.temp_limit[t], wb.temp_max[t]));
      v.j_wb.push_back(lp.add_variable(name(prefix, "j_wb", k), 0.0, kInf, 1.0));
      ref_total += refs.wb[k];
    }
    for (int k = 0; k < n; ++k) {
      const std::size_t t = at(k);
      std::vector<Term> row{{v.temp_wb[k], 1.0}, {v.wb[k], -dt * wb.thermal_coeff}};
      double rhs = -dt * wb.thermal_coeff * (wb.usage_loss_kw[t] + wb.envelope_loss_kw[t]);
      if (k == 0) {
        rhs += init;
      } else {
        row.push_back({v.temp_wb[k - 1], -1.0});
      }
      lp.add_constraint(name(prefix, "wb_dyn", k), std::move(row), Relation::Equal, rhs);
      lp.add_constraint(name(prefix, "wb_disc", k),
                        {{v.j_wb[k], 1.0}, {v.temp_wb[k], wb.reluctance_eur}},
                        Relation::GreaterEqual, wb.reluctance_eur * wb.temp_limit[t]);
    }
    std::vector<Term> total;
    for (const auto& p : v.wb) total.push_back({p, 1.0});
    lp.add_constraint(prefix + "wb_energy", std::move(total), Relation::Equal, ref_total);
  }

  if (m.hp) {
    const auto& hp = *m.hp;
    const double init = state.hp_temp.value_or(hp.temp_init);
    double ref_total = 0.0;
    for (int k = 0; k < n; ++k) {
      const VarId p = lp.add_variable(name(prefix, "p_hp", k), 0.0, hp.max_power_kw);
      if (pin_flexible) lp.fix(p, refs.hp[k]);
      v.hp.push_back(p);
      v.temp_hp.push_back(lp.add_variable(name(prefix, "temp_hp", k), -kInf, kInf));
      v.j_hp.push_back(lp.add_variable(name(prefix, "j_hp", k), 0.0, kInf, 1.0));
      ref_total += refs.hp[k];
    }
    for (int k = 0; k < n; ++k) {
      const std::size_t t = at(k);
      std::vector<Term> row{{v.temp_hp[k], 1.0}, {v.hp[k], -dt * hp.thermal_coeff * hp.cop}};
      double rhs = -dt * hp.thermal_coeff * hp.wall_loss_kw[t];
      if (k == 0) {
        rhs += init;
      } else {
        row.push_back({v.temp_hp[k - 1], -1.0});
      }
      lp.add_constraint(name(prefix, "hp_dyn", k), std::move(row), Relation::Equal, rhs);
      lp.add_constraint(name(prefix, "hp_disc", k),
                        {{v.j_hp[k], 1.0}, {v.temp_hp[k], hp.reluctance_eur}},
                        Relation::GreaterEqual, hp.reluctance_eur * hp.temp_limit[t]);
    }
    std::vector<Term> total;
    for (const auto& p : v.hp) total.push_back({p, 1.0});
    lp.add_constraint(prefix + "hp_energy", std::move(total), Relation::Equal, ref_total);
  }
  return v;
}

void extract_devices(const LpSolution& sol, const MemberDeviceVars& v, MemberSchedule& out,
                     int steps) {
  out.p_cha = values(sol, v.cha, steps);
  out.p_dis = values(sol, v.dis, steps);
  out.soc_bss = values(sol, v.soc_bss, steps);
  out.p_ev = values(sol, v.ev, steps);
  out.soc_ev = values(sol, v.soc_ev, steps);
  out.j_ev = values(sol, v.j_ev, steps);
  out.p_wb = values(sol, v.wb, steps);
  out.temp_wb = values(sol, v.temp_wb, steps);
  out.j_wb = values(sol, v.j_wb, steps);
  out.p_hp = values(sol, v.hp, steps);
  out.temp_hp = values(sol, v.temp_hp, steps);
  out.j_hp = values(sol, v.j_hp, steps);
  out.discomfort = sum(out.j_ev) + sum(out.j_wb) + sum(out.j_hp);
}

}  // namespace reccoord::detail
