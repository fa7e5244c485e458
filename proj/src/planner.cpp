#include "reccoord/planner.hpp"

#include <algorithm>
#include <stdexcept>

#include "member_model.hpp"

namespace reccoord {

namespace {

using detail::DayWindow;
using detail::MemberDeviceVars;

Series slice(const Series& s, int first, int n) {
  return {s.begin() + first, s.begin() + first + n};
}

DayWindow window_of(const Scenario& s, int day) {
  if (day < 0 || day >= s.horizon.num_days) {
    throw std::invalid_argument("day " + std::to_string(day) + " outside horizon");
  }
  return {day * s.horizon.steps_per_day, s.horizon.steps_per_day, s.horizon.dt_hours};
}

void check_refs(const Scenario& s, const CommunityRefs& refs, int n) {
  if (refs.size() != s.members.size()) {
    throw std::invalid_argument("reference set has " + std::to_string(refs.size()) +
                                " members, scenario has " + std::to_string(s.members.size()));
  }
  for (std::size_t u = 0; u < refs.size(); ++u) {
    const Member& m = s.members[u];
    auto check = [&](const Series& r, bool present, const char* dev) {
      const std::size_t want = present ? static_cast<std::size_t>(n) : 0;
      if (r.size() != want) {
        throw std::invalid_argument("reference " + m.id + "/" + dev + " has length " +
                                    std::to_string(r.size()) + ", expected " +
                                    std::to_string(want));
      }
    };
    check(refs[u].ev, m.ev.has_value(), "ev");
    check(refs[u].wb, m.wb.has_value(), "wb");
    check(refs[u].hp, m.hp.has_value(), "hp");
  }
}

struct MemberVars {
  std::vector<VarId> i_ret, e_ret, i_com, e_com, pv, inj;
  VarId bill;
  MemberDeviceVars dev;
};

struct DayModel {
  LpProblem lp;
  std::vector<MemberVars> members;
};

DayModel build_model(const Scenario& s, int day, PlannerMode mode, const DayInputs& in) {
  const DayWindow w = window_of(s, day);
  const int n = w.steps;
  const CommunityRefs default_refs = in.refs ? CommunityRefs{} : scenario_refs(s, day);
  const CommunityRefs& refs = in.refs ? *in.refs : default_refs;
  check_refs(s, refs, n);
  const CommunityState default_state = in.state ? CommunityState{} : initial_state(s);
  const CommunityState& state = in.state ? *in.state : default_state;
  if (state.size() != s.members.size()) {
    throw std::invalid_argument("carry state does not match the member count");
  }

  const bool community = allows_community_exchange(mode);
  const bool flexible = allows_flexibility(mode);
  const double com_ub = community ? kInf : 0.0;

  DayModel model;
  LpProblem& lp = model.lp;
  const Prices& pr = s.prices;

  for (std::size_t u = 0; u < s.members.size(); ++u) {
    const Member& m = s.members[u];
    const std::string prefix = m.id + ".";
    MemberVars v;
    for (int k = 0; k < n; ++k) {
      const std::size_t t = static_cast<std::size_t>(w.first_step + k);
      const std::string sfx = "[" + std::to_string(k) + "]";
      v.i_ret.push_back(lp.add_variable(prefix + "i_ret" + sfx));
      v.e_ret.push_back(lp.add_variable(prefix + "e_ret" + sfx));
      v.i_com.push_back(lp.add_variable(prefix + "i_com" + sfx, 0.0, com_ub));
      v.e_com.push_back(lp.add_variable(prefix + "e_com" + sfx, 0.0, com_ub));
      const double pv_max = m.pv_max_kw[t];
      v.pv.push_back(lp.add_variable(prefix + "p_pv" + sfx,
                                     in.options.allow_curtailment ? 0.0 : pv_max, pv_max));
      v.inj.push_back(lp.add_variable(prefix + "p_inj" + sfx, -kInf, kInf));
    }
    v.dev = detail::add_member_devices(lp, m, w, refs[u], state[u], !flexible, prefix);

    for (int k = 0; k < n; ++k) {
      const std::size_t t = static_cast<std::size_t>(w.first_step + k);
      const std::string sfx = "[" + std::to_string(k) + "]";
      std::vector<Term> phys = v.dev.controllable_terms(static_cast<std::size_t>(k));
      phys.push_back({v.inj[k], 1.0});
      phys.push_back({v.pv[k], -1.0});
      lp.add_constraint(prefix + "phys" + sfx, std::move(phys), Relation::Equal,
                        -m.fixed_load_kw[t]);
      lp.add_constraint(prefix + "virt" + sfx,
                        {{v.inj[k], 1.0},
                         {v.e_ret[k], -1.0},
                         {v.e_com[k], -1.0},
                         {v.i_ret[k], 1.0},
                         {v.i_com[k], 1.0}},
                        Relation::Equal, 0.0);
    }

    v.bill = lp.add_variable(prefix + "bill", -kInf, kInf, 1.0);
    std::vector<Term> bill{{v.bill, 1.0}};
    for (int k = 0; k < n; ++k) {
      const std::size_t t = static_cast<std::size_t>(w.first_step + k);
      bill.push_back({v.i_ret[k], -w.dt * pr.import_price[t]});
      bill.push_back({v.e_ret[k], w.dt * pr.export_price[t]});
      bill.push_back({v.i_com[k], -w.dt * pr.community_fee[t]});
      bill.push_back({v.e_com[k], -w.dt * pr.community_fee[t]});
    }
    lp.add_constraint(prefix + "bill_def", std::move(bill), Relation::Equal, 0.0);
    model.members.push_back(std::move(v));
  }

  for (int k = 0; k < n; ++k) {
    std::vector<Term> row;
    for (const auto& v : model.members) {
      row.push_back({v.e_com[k], 1.0});
      row.push_back({v.i_com[k], -1.0});
    }
    lp.add_constraint("community[" + std::to_string(k) + "]", std::move(row), Relation::Equal,
                      0.0);
  }
  return model;
}

Series values(const LpSolution& sol, const std::vector<VarId>& vars) {
  Series out(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) out[k] = sol.value(vars[k]);
  return out;
}

}  // namespace

std::string_view to_string(PlannerMode m) {
  switch (m) {
    case PlannerMode::SoloFix: return "SoloFix";
    case PlannerMode::SoloFlex: return "SoloFlex";
    case PlannerMode::ECFix: return "ECFix";
    case PlannerMode::ECFlex: return "ECFlex";
  }
  return "?";
}

bool allows_community_exchange(PlannerMode m) {
  return m == PlannerMode::ECFix || m == PlannerMode::ECFlex;
}

bool allows_flexibility(PlannerMode m) {
  return m == PlannerMode::SoloFlex || m == PlannerMode::ECFlex;
}

PlanningError::PlanningError(const std::string& what, int day, std::string mode, LpStatus status)
    : std::runtime_error(what), day_(day), mode_(std::move(mode)), status_(status) {}

CommunityRefs scenario_refs(const Scenario& s, int day) {
  const DayWindow w = window_of(s, day);
  CommunityRefs refs;
  refs.reserve(s.members.size());
  for (const Member& m : s.members) {
    DeviceRefs r;
    if (m.ev) r.ev = slice(m.ev->power_ref_kw, w.first_step, w.steps);
    if (m.wb) r.wb = slice(m.wb->power_ref_kw, w.first_step, w.steps);
    if (m.hp) r.hp = slice(m.hp->power_ref_kw, w.first_step, w.steps);
    refs.push_back(std::move(r));
  }
  return refs;
}

CommunityState initial_state(const Scenario& s) {
  CommunityState st;
  for (const Member& m : s.members) {
    CarryState c;
    if (m.ev) c.ev_soc = m.ev->soc_init;
    if (m.wb) c.wb_temp = m.wb->temp_init;
    if (m.hp) c.hp_temp = m.hp->temp_init;
    st.push_back(c);
  }
  return st;
}

CommunityState final_state(const DaySchedule& day) {
  CommunityState st;
  for (const MemberSchedule& m : day.members) {
    CarryState c;
    if (!m.ref_ev.empty()) c.ev_soc = m.soc_ev.back();
    if (!m.ref_wb.empty()) c.wb_temp = m.temp_wb.back();
    if (!m.ref_hp.empty()) c.hp_temp = m.temp_hp.back();
    st.push_back(c);
  }
  return st;
}

LpProblem build_day_problem(const Scenario& s, int day, PlannerMode mode,
                            const DayInputs& inputs) {
  return build_model(s, day, mode, inputs).lp;
}

DaySchedule solve_centralized(const Scenario& s, int day, PlannerMode mode,
                              const DayInputs& inputs) {
  DayModel model = build_model(s, day, mode, inputs);
  const LpSolution sol = solve_lp(model.lp);
  if (!sol.optimal()) {
    throw PlanningError(std::string(to_string(mode)) + " day " + std::to_string(day) + ": " +
                            std::string(to_string(sol.status)),
                        day, std::string(to_string(mode)), sol.status);
  }
  const DayWindow w = window_of(s, day);
  const CommunityRefs original = scenario_refs(s, day);

  DaySchedule out;
  out.day = day;
  out.mode = std::string(to_string(mode));
  out.first_step = w.first_step;
  out.dt_hours = w.dt;
  out.objective = sol.objective;
  for (std::size_t u = 0; u < s.members.size(); ++u) {
    const MemberVars& v = model.members[u];
    MemberSchedule ms;
    ms.id = s.members[u].id;
    ms.i_ret = values(sol, v.i_ret);
    ms.e_ret = values(sol, v.e_ret);
    ms.i_com = values(sol, v.i_com);
    ms.e_com = values(sol, v.e_com);
    ms.p_pv = values(sol, v.pv);
    ms.p_inj = values(sol, v.inj);
    detail::extract_devices(sol, v.dev, ms, w.steps);
    ms.ref_ev = original[u].ev;
    ms.ref_wb = original[u].wb;
    ms.ref_hp = original[u].hp;
    ms.act_up.assign(static_cast<std::size_t>(w.steps), 0.0);
    ms.act_down.assign(static_cast<std::size_t>(w.steps), 0.0);
    ms.bill = sol.value(v.bill);
    out.total_bill += ms.bill;
    out.total_discomfort += ms.discomfort;
    out.members.push_back(std::move(ms));
  }
  return out;
}

CommunityRefs prioritize_self_consumption(const Scenario& s, int day,
                                          const CommunityState* state,
                                          const PlannerOptions& options) {
  DayInputs in;
  in.state = state;
  in.options = options;
  const DaySchedule solo = solve_centralized(s, day, PlannerMode::SoloFlex, in);
  CommunityRefs refs;
  auto clean = [](const Series& p) {
    Series r(p);
    for (double& x : r) x = std::max(x, 0.0);
    return r;
  };
  for (std::size_t u = 0; u < s.members.size(); ++u) {
    const Member& m = s.members[u];
    const MemberSchedule& ms = solo.members[u];
    DeviceRefs r;
    if (m.ev) r.ev = clean(ms.p_ev);
    if (m.wb) r.wb = clean(ms.p_wb);
    if (m.hp) r.hp = clean(ms.p_hp);
    refs.push_back(std::move(r));
  }
  return refs;
}

std::vector<DaySchedule> run_centralized(const Scenario& s, PlannerMode mode, int days,
                                         const PlannerOptions& options) {
  std::vector<DaySchedule> out;
  CommunityState state = initial_state(s);
  for (int d = 0; d < days; ++d) {
    DayInputs in;
    in.state = &state;
    in.options = options;
    out.push_back(solve_centralized(s, d, mode, in));
    state = final_state(out.back());
  }
  return out;
}

}  // namespace reccoord
