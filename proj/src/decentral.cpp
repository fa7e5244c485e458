#include "reccoord/decentral.hpp"

#include <algorithm>
#include <numeric>

#include "member_model.hpp"
#include "reccoord/billing.hpp"

namespace reccoord {

namespace {

Series zeros(std::size_t n) { return Series(n, 0.0); }

Series clamp_small(Series s) {
  for (double& x : s) {
    if (x < kRequestClamp) x = 0.0;
  }
  return s;
}

Series controllable_total(const MemberSchedule& m) {
  Series out(m.p_ev.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = m.p_ev[k] + m.p_wb[k] + m.p_hp[k] + m.p_cha[k] - m.p_dis[k];
  }
  return out;
}

bool any_above(const Series& s, double eps) {
  return std::any_of(s.begin(), s.end(), [eps](double x) { return x > eps; });
}

}  // namespace

IterationCapError::IterationCapError(const std::string& what, std::vector<IterationTrace> trace)
    : std::runtime_error(what), trace_(std::move(trace)) {}

FlexRequest initial_request(const DaySchedule& ecfix, const Prices& day_prices) {
  const std::size_t n = ecfix.members.empty() ? day_prices.import_price.size()
                                              : ecfix.members.front().e_ret.size();
  FlexRequest r{zeros(n), zeros(n), activation_price(day_prices)};
  for (const MemberSchedule& m : ecfix.members) {
    for (std::size_t k = 0; k < n; ++k) {
      r.up_kw[k] += m.e_ret[k];
      r.down_kw[k] += m.i_ret[k];
    }
  }
  r.up_kw = clamp_small(std::move(r.up_kw));
  r.down_kw = clamp_small(std::move(r.down_kw));
  return r;
}

std::vector<ActivationBounds> refine_bounds(const std::vector<CapacityOffer>& offers,
                                            const FlexRequest& request, KeyKind key) {
  const std::size_t n = request.up_kw.size();
  std::vector<ActivationBounds> out;
  out.reserve(offers.size());
  for (const CapacityOffer& o : offers) out.push_back({o.member, zeros(n), zeros(n)});
  std::vector<double> column(offers.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t u = 0; u < offers.size(); ++u) column[u] = offers[u].up_kw[k];
    const auto up = apply_key(key, column, request.up_kw[k]);
    for (std::size_t u = 0; u < offers.size(); ++u) column[u] = offers[u].down_kw[k];
    const auto down = apply_key(key, column, request.down_kw[k]);
    for (std::size_t u = 0; u < offers.size(); ++u) {
      out[u].up_kw[k] = up[u];
      out[u].down_kw[k] = down[u];
    }
  }
  return out;
}

FlexRequest remaining_request(const FlexRequest& request,
                              const std::vector<Activation>& activations) {
  FlexRequest r = request;
  for (const Activation& a : activations) {
    for (std::size_t k = 0; k < r.up_kw.size(); ++k) {
      r.up_kw[k] -= a.up_kw[k];
      r.down_kw[k] -= a.down_kw[k];
    }
  }
  for (std::size_t k = 0; k < r.up_kw.size(); ++k) {
    r.up_kw[k] = std::max(r.up_kw[k], 0.0);
    r.down_kw[k] = std::max(r.down_kw[k], 0.0);
  }
  return r;
}

double activated_volume(const std::vector<Activation>& activations) {
  double total = 0.0;
  for (const Activation& a : activations) {
    for (double x : a.up_kw) total += x;
    for (double x : a.down_kw) total += x;
  }
  return total;
}

// ---- MemberAgent

struct MemberAgent::Solved {
  LpSolution solution;
  detail::MemberDeviceVars vars;
  std::vector<VarId> up, down;
};

MemberAgent::MemberAgent(const Member& member, int first_step, double dt_hours,
                         DeviceRefs device_refs, CarryState state,
                         const MemberSchedule& schedule)
    : member_(member),
      first_step_(first_step),
      dt_(dt_hours),
      device_refs_(std::move(device_refs)),
      state_(state),
      ref_total_(controllable_total(schedule)) {
  schedule_.id = member.id;
  schedule_.p_cha = schedule.p_cha;
  schedule_.p_dis = schedule.p_dis;
  schedule_.soc_bss = schedule.soc_bss;
  schedule_.p_ev = schedule.p_ev;
  schedule_.soc_ev = schedule.soc_ev;
  schedule_.j_ev = schedule.j_ev;
  schedule_.p_wb = schedule.p_wb;
  schedule_.temp_wb = schedule.temp_wb;
  schedule_.j_wb = schedule.j_wb;
  schedule_.p_hp = schedule.p_hp;
  schedule_.temp_hp = schedule.temp_hp;
  schedule_.j_hp = schedule.j_hp;
  schedule_.discomfort = schedule.discomfort;
}

bool MemberAgent::participates() const {
  return member_.bss.has_value() || member_.has_flexible_device();
}

MemberAgent::Solved MemberAgent::solve(const Series& up_ub, const Series& down_ub,
                                       const Series& price) const {
  const int n = static_cast<int>(ref_total_.size());
  LpProblem lp;
  Solved out;
  out.vars = detail::add_member_devices(lp, member_, {first_step_, n, dt_}, device_refs_,
                                        state_, false, "");
  for (int k = 0; k < n; ++k) {
    const std::string sfx = "[" + std::to_string(k) + "]";
    out.up.push_back(lp.add_variable("cap_up" + sfx, 0.0, up_ub[k], -price[k] * dt_));
    out.down.push_back(lp.add_variable("cap_down" + sfx, 0.0, down_ub[k]));
  }
  for (int k = 0; k < n; ++k) {
    auto row = out.vars.controllable_terms(static_cast<std::size_t>(k));
    row.push_back({out.up[k], -1.0});
    row.push_back({out.down[k], 1.0});
    lp.add_constraint("flex[" + std::to_string(k) + "]", std::move(row), Relation::Equal,
                      ref_total_[k]);
  }
  std::vector<Term> neutral;
  for (int k = 0; k < n; ++k) {
    neutral.push_back({out.up[k], 1.0});
    neutral.push_back({out.down[k], -1.0});
  }
  lp.add_constraint("neutral", std::move(neutral), Relation::Equal, 0.0);

  out.solution = solve_lp(lp);
  if (!out.solution.optimal()) {
    throw PlanningError("member " + member_.id + " flexibility problem: " +
                            std::string(to_string(out.solution.status)),
                        -1, "ECFlexIt", out.solution.status);
  }
  return out;
}

CapacityOffer MemberAgent::offer(const FlexRequest& request) {
  const std::size_t n = ref_total_.size();
  CapacityOffer o{member_.id, zeros(n), zeros(n)};
  if (!participates()) return o;
  const Solved s = solve(request.up_kw, request.down_kw, request.activation_price);
  for (std::size_t k = 0; k < n; ++k) {
    o.up_kw[k] = std::max(s.solution.value(s.up[k]), 0.0);
    o.down_kw[k] = std::max(s.solution.value(s.down[k]), 0.0);
  }
  return o;
}

Activation MemberAgent::activate(const ActivationBounds& bounds, const Series& activation_price) {
  const std::size_t n = ref_total_.size();
  Activation a{member_.id, zeros(n), zeros(n)};
  if (!participates()) return a;
  const Solved s = solve(bounds.up_kw, bounds.down_kw, activation_price);
  for (std::size_t k = 0; k < n; ++k) {
    a.up_kw[k] = std::max(s.solution.value(s.up[k]), 0.0);
    a.down_kw[k] = std::max(s.solution.value(s.down[k]), 0.0);
    ref_total_[k] += a.up_kw[k] - a.down_kw[k];
  }
  detail::extract_devices(s.solution, s.vars, schedule_, static_cast<int>(n));
  return a;
}

// ---- Coordinator loop

std::string decentral_mode_name(bool primed) { return primed ? "ECFlexItPrimed" : "ECFlexIt"; }

void settle_exchanges(DaySchedule& day, const Prices& day_prices) {
  const std::size_t n = day.members.empty() ? 0 : day.members.front().p_inj.size();
  const double dt = day.dt_hours;
  LpProblem lp;
  struct Flows {
    std::vector<VarId> i_ret, e_ret, i_com, e_com;
  };
  std::vector<Flows> flows(day.members.size());
  for (std::size_t u = 0; u < day.members.size(); ++u) {
    const MemberSchedule& m = day.members[u];
    Flows& f = flows[u];
    for (std::size_t k = 0; k < n; ++k) {
      const std::string sfx = m.id + "[" + std::to_string(k) + "]";
      f.i_ret.push_back(lp.add_variable("i_ret." + sfx, 0.0, kInf, dt * day_prices.import_price[k]));
      f.e_ret.push_back(lp.add_variable("e_ret." + sfx, 0.0, kInf, -dt * day_prices.export_price[k]));
      f.i_com.push_back(lp.add_variable("i_com." + sfx, 0.0, kInf, dt * day_prices.community_fee[k]));
      f.e_com.push_back(lp.add_variable("e_com." + sfx, 0.0, kInf, dt * day_prices.community_fee[k]));
      lp.add_constraint("virt." + sfx,
                        {{f.i_ret[k], 1.0}, {f.i_com[k], 1.0}, {f.e_ret[k], -1.0}, {f.e_com[k], -1.0}},
                        Relation::Equal, -m.p_inj[k]);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Term> row;
    for (const Flows& f : flows) {
      row.push_back({f.e_com[k], 1.0});
      row.push_back({f.i_com[k], -1.0});
    }
    lp.add_constraint("community[" + std::to_string(k) + "]", std::move(row), Relation::Equal, 0.0);
  }
  const LpSolution sol = solve_lp(lp);
  if (!sol.optimal()) {
    throw PlanningError("settlement: " + std::string(to_string(sol.status)), day.day, day.mode,
                        sol.status);
  }
  day.total_bill = 0.0;
  day.total_discomfort = 0.0;
  for (std::size_t u = 0; u < day.members.size(); ++u) {
    MemberSchedule& m = day.members[u];
    auto read = [&sol](const std::vector<VarId>& vars) {
      Series out(vars.size());
      for (std::size_t k = 0; k < vars.size(); ++k) out[k] = sol.value(vars[k]);
      return out;
    };
    m.i_ret = read(flows[u].i_ret);
    m.e_ret = read(flows[u].e_ret);
    m.i_com = read(flows[u].i_com);
    m.e_com = read(flows[u].e_com);
    m.bill = compute_bill(m, day_prices, dt).total;
    day.total_bill += m.bill;
    day.total_discomfort += m.discomfort;
  }
  day.objective = day.total_bill + day.total_discomfort;
}

DecentralDay run_ecflexit(const Scenario& s, int day, const DecentralOptions& options,
                          const CommunityState* state) {
  const CommunityState start = state ? *state : initial_state(s);
  const Prices day_prices = s.prices.day_slice(day, s.horizon.steps_per_day);
  const std::string mode = decentral_mode_name(options.primed);

  const CommunityRefs refs = options.primed
                                 ? prioritize_self_consumption(s, day, &start, options.planner)
                                 : scenario_refs(s, day);
  DayInputs in;
  in.refs = &refs;
  in.state = &start;
  in.options = options.planner;
  const DaySchedule ecfix = solve_centralized(s, day, PlannerMode::ECFix, in);

  DecentralDay result;
  result.initial = initial_request(ecfix, day_prices);
  const std::size_t members = s.members.size();
  const std::size_t n = static_cast<std::size_t>(s.horizon.steps_per_day);

  std::vector<MemberAgent> agents;
  agents.reserve(members);
  for (std::size_t u = 0; u < members; ++u) {
    agents.emplace_back(s.members[u], ecfix.first_step, ecfix.dt_hours, refs[u], start[u],
                        ecfix.members[u]);
  }
  std::vector<std::size_t> order = options.evaluation_order;
  if (order.empty()) {
    order.resize(members);
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> identity(members);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    if (sorted != identity) throw std::invalid_argument("evaluation order is not a permutation");
  }

  std::vector<Series> cum_up(members, zeros(n)), cum_down(members, zeros(n));
  FlexRequest request = result.initial;
  int iteration = 0;
  while (any_above(request.up_kw, kRequestEpsilon) || any_above(request.down_kw, kRequestEpsilon)) {
    if (iteration >= options.max_iterations) {
      throw IterationCapError(mode + " day " + std::to_string(day) + ": no convergence within " +
                                  std::to_string(options.max_iterations) + " iterations",
                              std::move(result.trace));
    }
    ++iteration;
    IterationTrace tr;
    tr.day = day;
    tr.iteration = iteration;
    tr.request_up = request.up_kw;
    tr.request_down = request.down_kw;

    // All members answer the same request; the coordinator waits for all.
    try {
      tr.offers.resize(members);
      for (std::size_t u : order) tr.offers[u] = agents[u].offer(request);
      tr.bounds = refine_bounds(tr.offers, request, options.key);
      tr.activations.resize(members);
      for (std::size_t u : order) {
        tr.activations[u] = agents[u].activate(tr.bounds[u], request.activation_price);
      }
    } catch (const PlanningError& e) {
      throw PlanningError(mode + " day " + std::to_string(day) + ", iteration " +
                              std::to_string(iteration) + ": " + e.what(),
                          day, mode, e.status());
    }
    for (std::size_t u = 0; u < members; ++u) {
      for (std::size_t k = 0; k < n; ++k) {
        cum_up[u][k] += tr.activations[u].up_kw[k];
        cum_down[u][k] += tr.activations[u].down_kw[k];
      }
    }
    request = remaining_request(request, tr.activations);
    tr.remaining_up = request.up_kw;
    tr.remaining_down = request.down_kw;
    tr.activated = activated_volume(tr.activations);
    const bool progressed = tr.activated > kRequestEpsilon;
    result.trace.push_back(std::move(tr));
    if (!progressed) break;
  }

  DaySchedule& out = result.schedule;
  out.day = day;
  out.mode = mode;
  out.first_step = ecfix.first_step;
  out.dt_hours = ecfix.dt_hours;
  const CommunityRefs original = scenario_refs(s, day);
  for (std::size_t u = 0; u < members; ++u) {
    const Member& m = s.members[u];
    MemberSchedule ms = agents[u].schedule();
    ms.p_pv = ecfix.members[u].p_pv;
    ms.p_inj.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t t = static_cast<std::size_t>(out.first_step) + k;
      ms.p_inj[k] = ms.p_pv[k] + ms.p_dis[k] - m.fixed_load_kw[t] - ms.p_ev[k] - ms.p_wb[k] -
                    ms.p_hp[k] - ms.p_cha[k];
    }
    ms.ref_ev = original[u].ev;
    ms.ref_wb = original[u].wb;
    ms.ref_hp = original[u].hp;
    ms.act_up = cum_up[u];
    ms.act_down = cum_down[u];
    for (std::size_t k = 0; k < n; ++k) {
      ms.flex_revenue += result.initial.activation_price[k] * ms.act_up[k] * out.dt_hours;
    }
    out.members.push_back(std::move(ms));
  }
  settle_exchanges(out, day_prices);
  return result;
}

std::vector<DecentralDay> run_decentralized(const Scenario& s, int days,
                                            const DecentralOptions& options) {
  std::vector<DecentralDay> out;
  CommunityState state = initial_state(s);
  for (int d = 0; d < days; ++d) {
    out.push_back(run_ecflexit(s, d, options, &state));
    state = final_state(out.back().schedule);
  }
  return out;
}

}  // namespace reccoord
