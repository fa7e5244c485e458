#include "reccoord/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "reccoord/devices.hpp"

namespace reccoord {

using Json = nlohmann::ordered_json;

Prices Prices::flat(int steps, double import_eur, double export_eur, double fee_eur) {
  const auto n = static_cast<std::size_t>(steps);
  return Prices{Series(n, import_eur), Series(n, export_eur), Series(n, fee_eur)};
}

Prices Prices::day_slice(int day, int steps_per_day) const {
  const auto first = static_cast<std::ptrdiff_t>(day) * steps_per_day;
  auto cut = [&](const Series& s) {
    return Series(s.begin() + first, s.begin() + first + steps_per_day);
  };
  return Prices{cut(import_price), cut(export_price), cut(community_fee)};
}

const Member* Scenario::find_member(std::string_view id) const {
  for (const auto& m : members) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

namespace {

// Every check runs (braced-init elements are evaluated in order) so all
// violations get reported.
bool all_passed(std::initializer_list<bool> results) {
  return std::all_of(results.begin(), results.end(), [](bool b) { return b; });
}

std::string join_violations(const std::vector<Violation>& v) {
  std::ostringstream os;
  os << "scenario validation failed (" << v.size() << " violation" << (v.size() == 1 ? "" : "s")
     << ")";
  for (std::size_t i = 0; i < v.size() && i < 10; ++i) {
    os << "\n  " << v[i].path << ": " << v[i].message;
  }
  if (v.size() > 10) os << "\n  ...";
  return os.str();
}

constexpr double kRefTol = 1e-9;

class Validator {
 public:
  explicit Validator(const Scenario& s) : s_(s), n_(static_cast<std::size_t>(s.horizon.total_steps())) {}

  std::vector<Violation> run() {
    check_horizon();
    if (horizon_ok_) check_prices();
    std::set<std::string> ids;
    for (const auto& m : s_.members) {
      const std::string base = "members/" + m.id;
      if (m.id.empty()) add("members", "empty member id");
      if (!ids.insert(m.id).second) add(base, "duplicate member id");
      if (!horizon_ok_) continue;
      nonneg_series(base + "/fixed_load_kw", m.fixed_load_kw);
      nonneg_series(base + "/pv_max_kw", m.pv_max_kw);
      if (m.bss) check_bss(base + "/bss", *m.bss);
      if (m.ev) check_ev(base + "/ev", *m.ev);
      if (m.wb) check_wb(base + "/wb", *m.wb);
      if (m.hp) check_hp(base + "/hp", *m.hp);
    }
    return std::move(out_);
  }

 private:
  void add(std::string path, std::string message) {
    out_.push_back({std::move(path), std::move(message)});
  }
  static std::string at(const std::string& path, std::size_t t) {
    return path + "/" + std::to_string(t);
  }

  void check_horizon() {
    const auto& h = s_.horizon;
    if (h.steps_per_day <= 0) add("horizon/steps_per_day", "must be positive");
    if (!(h.dt_hours > 0.0)) add("horizon/dt_hours", "must be positive");
    if (h.num_days <= 0) add("horizon/num_days", "must be positive");
    horizon_ok_ = out_.empty();
    if (horizon_ok_ && std::abs(h.steps_per_day * h.dt_hours - 24.0) > 1e-9) {
      add("horizon", "steps_per_day * dt_hours must equal 24");
    }
  }

  bool length_ok(const std::string& path, const Series& s) {
    if (s.size() != n_) {
      add(path, "length " + std::to_string(s.size()) + ", expected " + std::to_string(n_));
      return false;
    }
    return true;
  }

  bool nonneg_series(const std::string& path, const Series& s) {
    if (!length_ok(path, s)) return false;
    bool ok = true;
    for (std::size_t t = 0; t < n_; ++t) {
      if (!std::isfinite(s[t]) || s[t] < 0.0) {
        add(at(path, t), "must be finite and >= 0");
        ok = false;
      }
    }
    return ok;
  }

  bool binary_series(const std::string& path, const Series& s) {
    if (!length_ok(path, s)) return false;
    bool ok = true;
    for (std::size_t t = 0; t < n_; ++t) {
      if (s[t] != 0.0 && s[t] != 1.0) {
        add(at(path, t), "must be 0 or 1");
        ok = false;
      }
    }
    return ok;
  }

  bool unit_series(const std::string& path, const Series& s) {
    if (!length_ok(path, s)) return false;
    bool ok = true;
    for (std::size_t t = 0; t < n_; ++t) {
      if (!(s[t] >= 0.0 && s[t] <= 1.0)) {
        add(at(path, t), "must lie in [0,1]");
        ok = false;
      }
    }
    return ok;
  }

  void positive(const std::string& path, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) add(path, "must be positive");
  }
  void nonneg(const std::string& path, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) add(path, "must be >= 0");
  }
  void efficiency(const std::string& path, double v) {
    if (!(v > 0.0 && v <= 1.0)) add(path, "must lie in (0,1]");
  }

  bool power_ref(const std::string& path, const Series& p, double max_kw) {
    if (!nonneg_series(path, p)) return false;
    bool ok = true;
    for (std::size_t t = 0; t < n_; ++t) {
      if (p[t] > max_kw) {
        add(at(path, t), "reference power exceeds device rating");
        ok = false;
      }
    }
    return ok;
  }

  void check_prices() {
    const auto& p = s_.prices;
    const bool ok = all_passed({nonneg_series("prices/import_price", p.import_price),
                    nonneg_series("prices/export_price", p.export_price),
                    nonneg_series("prices/community_fee", p.community_fee)});
    if (!ok) return;
    for (std::size_t t = 0; t < n_; ++t) {
      if (!(p.import_price[t] - p.export_price[t] - 2.0 * p.community_fee[t] > 0.0)) {
        add(at("prices", t), "non-positive activation reward");
      }
    }
  }

  void check_bss(const std::string& base, const BssParams& b) {
    positive(base + "/capacity_kwh", b.capacity_kwh);
    nonneg(base + "/max_power_kw", b.max_power_kw);
    efficiency(base + "/efficiency", b.efficiency);
    for (auto [name, v] : {std::pair{"soc_min", b.soc_min}, {"soc_max", b.soc_max},
                           {"soc_init", b.soc_init}}) {
      if (!(v >= 0.0 && v <= 1.0)) add(base + "/" + name, "must lie in [0,1]");
    }
    if (!(b.soc_min <= b.soc_init && b.soc_init <= b.soc_max)) {
      add(base + "/soc_init", "soc_init out of [soc_min,soc_max]");
    }
  }

  void check_ev(const std::string& base, const EvParams& e) {
    positive(base + "/capacity_kwh", e.capacity_kwh);
    nonneg(base + "/max_charge_kw", e.max_charge_kw);
    efficiency(base + "/efficiency", e.efficiency);
    nonneg(base + "/reluctance_eur", e.reluctance_eur);
    if (!(e.soc_init >= 0.0 && e.soc_init <= 1.0)) add(base + "/soc_init", "must lie in [0,1]");
    bool ok = all_passed({binary_series(base + "/plugged", e.plugged),
              binary_series(base + "/arrival", e.arrival),
              binary_series(base + "/departure", e.departure),
              unit_series(base + "/soc_arrival", e.soc_arrival),
              unit_series(base + "/soc_ref", e.soc_ref),
              power_ref(base + "/power_ref_kw", e.power_ref_kw, e.max_charge_kw)});
    if (!ok) return;
    const auto steps = static_cast<std::size_t>(s_.horizon.steps_per_day);
    for (std::size_t t = 0; t < n_; ++t) {
      if (e.arrival[t] == 1.0 && e.plugged[t] != 1.0) {
        add(at(base + "/arrival", t), "arrival while unplugged");
        ok = false;
      }
      if (e.departure[t] == 1.0) {
        const bool same_day_next = (t + 1) % steps != 0 && t + 1 < n_;
        if (e.plugged[t] != 1.0 || (same_day_next && e.plugged[t + 1] != 0.0)) {
          add(at(base + "/departure", t), "departure must be plugged at t and unplugged at t+1");
          ok = false;
        }
      }
      if (e.power_ref_kw[t] > 0.0 && e.plugged[t] != 1.0) {
        add(at(base + "/power_ref_kw", t), "reference charging while unplugged");
        ok = false;
      }
    }
    if (!ok || !(e.capacity_kwh > 0.0)) return;
    const auto soc = simulate_ev(e, e.power_ref_kw, s_.horizon.dt_hours);
    for (std::size_t t = 0; t < n_; ++t) {
      if (soc[t] > 1.0 + kRefTol) {
        add(at(base + "/power_ref_kw", t), "reference profile overcharges the EV");
        return;
      }
      if (e.departure[t] == 1.0 && soc[t] < e.soc_ref[t] - kRefTol) {
        add(at(base + "/power_ref_kw", t), "reference profile misses the departure target");
        return;
      }
    }
  }

  void check_wb(const std::string& base, const WbParams& w) {
    positive(base + "/thermal_coeff", w.thermal_coeff);
    nonneg(base + "/max_power_kw", w.max_power_kw);
    nonneg(base + "/reluctance_eur", w.reluctance_eur);
    bool ok = all_passed({length_ok(base + "/temp_max", w.temp_max),
              length_ok(base + "/temp_limit", w.temp_limit),
              binary_series(base + "/usage_event", w.usage_event),
              nonneg_series(base + "/usage_loss_kw", w.usage_loss_kw),
              nonneg_series(base + "/envelope_loss_kw", w.envelope_loss_kw),
              power_ref(base + "/power_ref_kw", w.power_ref_kw, w.max_power_kw)});
    if (!ok) return;
    for (std::size_t t = 0; t < n_; ++t) {
      if (!(w.temp_limit[t] <= w.temp_max[t])) {
        add(at(base + "/temp_limit", t), "temp_limit above temp_max");
        ok = false;
      }
    }
    if (!ok || !(w.thermal_coeff > 0.0)) return;
    const auto temp = simulate_wb(w, w.power_ref_kw, s_.horizon.dt_hours);
    for (std::size_t t = 0; t < n_; ++t) {
      if (temp[t] > w.temp_max[t] + kRefTol) {
        add(at(base + "/power_ref_kw", t), "reference profile overheats the boiler");
        return;
      }
      if (w.usage_event[t] == 1.0 && temp[t] < w.temp_limit[t] - kRefTol) {
        add(at(base + "/power_ref_kw", t), "reference profile too cold at a usage event");
        return;
      }
    }
  }

  void check_hp(const std::string& base, const HpParams& h) {
    positive(base + "/thermal_coeff", h.thermal_coeff);
    positive(base + "/cop", h.cop);
    nonneg(base + "/max_power_kw", h.max_power_kw);
    nonneg(base + "/reluctance_eur", h.reluctance_eur);
    length_ok(base + "/temp_limit", h.temp_limit);
    nonneg_series(base + "/wall_loss_kw", h.wall_loss_kw);
    power_ref(base + "/power_ref_kw", h.power_ref_kw, h.max_power_kw);
  }

  const Scenario& s_;
  std::size_t n_;
  bool horizon_ok_ = false;
  std::vector<Violation> out_;
};

// --- JSON ------------------------------------------------------------------

const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ScenarioParseError(path + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioParseError(path + "/" + key + ": missing field");
  return *it;
}

double number(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_number()) throw ScenarioParseError(path + "/" + key + ": expected a number");
  return v.get<double>();
}

int integer(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_number_integer()) throw ScenarioParseError(path + "/" + key + ": expected an integer");
  return v.get<int>();
}

Series series(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_array()) throw ScenarioParseError(path + "/" + key + ": expected an array");
  Series out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw ScenarioParseError(path + "/" + key + ": non-numeric entry");
    out.push_back(x.get<double>());
  }
  return out;
}

bool present(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  return it != obj.end() && !it->is_null();
}

// Accepts temp_limit directly or the (temp_ref, temp_set) pair, taking the
// elementwise minimum of the latter.
Series temp_limit(const Json& obj, const std::string& path) {
  if (present(obj, "temp_limit")) return series(obj, "temp_limit", path);
  if (present(obj, "temp_ref") && present(obj, "temp_set")) {
    Series ref = series(obj, "temp_ref", path);
    const Series set = series(obj, "temp_set", path);
    if (ref.size() != set.size()) {
      throw ScenarioParseError(path + ": temp_ref and temp_set lengths differ");
    }
    for (std::size_t t = 0; t < ref.size(); ++t) ref[t] = std::min(ref[t], set[t]);
    return ref;
  }
  throw ScenarioParseError(path + "/temp_limit: missing field (or temp_ref + temp_set)");
}

Member parse_member(const Json& j, std::size_t index) {
  Member m;
  const std::string where = "members/" + std::to_string(index);
  const Json& id = field(j, "id", where);
  if (!id.is_string()) throw ScenarioParseError(where + "/id: expected a string");
  m.id = id.get<std::string>();
  const std::string base = "members/" + m.id;
  m.fixed_load_kw = series(j, "fixed_load_kw", base);
  m.pv_max_kw = series(j, "pv_max_kw", base);
  if (present(j, "bss")) {
    const Json& b = j["bss"];
    const std::string p = base + "/bss";
    m.bss = BssParams{number(b, "capacity_kwh", p), number(b, "max_power_kw", p),
                      number(b, "efficiency", p),   number(b, "soc_init", p),
                      number(b, "soc_min", p),      number(b, "soc_max", p)};
  }
  if (present(j, "ev")) {
    const Json& e = j["ev"];
    const std::string p = base + "/ev";
    EvParams ev;
    ev.capacity_kwh = number(e, "capacity_kwh", p);
    ev.max_charge_kw = number(e, "max_charge_kw", p);
    ev.efficiency = number(e, "efficiency", p);
    ev.plugged = series(e, "plugged", p);
    ev.arrival = series(e, "arrival", p);
    ev.departure = series(e, "departure", p);
    ev.soc_arrival = series(e, "soc_arrival", p);
    ev.soc_ref = series(e, "soc_ref", p);
    ev.soc_init = number(e, "soc_init", p);
    ev.power_ref_kw = series(e, "power_ref_kw", p);
    ev.reluctance_eur = number(e, "reluctance_eur", p);
    m.ev = std::move(ev);
  }
  if (present(j, "wb")) {
    const Json& w = j["wb"];
    const std::string p = base + "/wb";
    WbParams wb;
    wb.thermal_coeff = number(w, "thermal_coeff", p);
    wb.max_power_kw = number(w, "max_power_kw", p);
    wb.temp_init = number(w, "temp_init", p);
    wb.temp_max = series(w, "temp_max", p);
    wb.temp_limit = temp_limit(w, p);
    wb.usage_event = series(w, "usage_event", p);
    wb.usage_loss_kw = series(w, "usage_loss_kw", p);
    wb.envelope_loss_kw = series(w, "envelope_loss_kw", p);
    wb.power_ref_kw = series(w, "power_ref_kw", p);
    wb.reluctance_eur = number(w, "reluctance_eur", p);
    m.wb = std::move(wb);
  }
  if (present(j, "hp")) {
    const Json& h = j["hp"];
    const std::string p = base + "/hp";
    HpParams hp;
    hp.thermal_coeff = number(h, "thermal_coeff", p);
    hp.max_power_kw = number(h, "max_power_kw", p);
    hp.cop = number(h, "cop", p);
    hp.temp_init = number(h, "temp_init", p);
    hp.temp_limit = temp_limit(h, p);
    hp.wall_loss_kw = series(h, "wall_loss_kw", p);
    hp.power_ref_kw = series(h, "power_ref_kw", p);
    hp.reluctance_eur = number(h, "reluctance_eur", p);
    m.hp = std::move(hp);
  }
  if (present(j, "flexible_energy_cap_kwh")) {
    const Json& c = j["flexible_energy_cap_kwh"];
    const std::string p = base + "/flexible_energy_cap_kwh";
    if (c.is_number()) {
      m.flexible_energy_cap.total_kwh = c.get<double>();
    } else {
      m.flexible_energy_cap = {number(c, "total", p), number(c, "ev", p), number(c, "wb", p),
                               number(c, "hp", p)};
    }
  }
  return m;
}

Json member_json(const Member& m) {
  Json j;
  j["id"] = m.id;
  j["fixed_load_kw"] = m.fixed_load_kw;
  j["pv_max_kw"] = m.pv_max_kw;
  if (m.bss) {
    const auto& b = *m.bss;
    j["bss"] = {{"capacity_kwh", b.capacity_kwh}, {"max_power_kw", b.max_power_kw},
                {"efficiency", b.efficiency},     {"soc_init", b.soc_init},
                {"soc_min", b.soc_min},           {"soc_max", b.soc_max}};
  } else {
    j["bss"] = nullptr;
  }
  if (m.ev) {
    const auto& e = *m.ev;
    j["ev"] = {{"capacity_kwh", e.capacity_kwh}, {"max_charge_kw", e.max_charge_kw},
               {"efficiency", e.efficiency},     {"plugged", e.plugged},
               {"arrival", e.arrival},           {"departure", e.departure},
               {"soc_arrival", e.soc_arrival},   {"soc_ref", e.soc_ref},
               {"soc_init", e.soc_init},         {"power_ref_kw", e.power_ref_kw},
               {"reluctance_eur", e.reluctance_eur}};
  } else {
    j["ev"] = nullptr;
  }
  if (m.wb) {
    const auto& w = *m.wb;
    j["wb"] = {{"thermal_coeff", w.thermal_coeff},
               {"max_power_kw", w.max_power_kw},
               {"temp_init", w.temp_init},
               {"temp_max", w.temp_max},
               {"temp_limit", w.temp_limit},
               {"usage_event", w.usage_event},
               {"usage_loss_kw", w.usage_loss_kw},
               {"envelope_loss_kw", w.envelope_loss_kw},
               {"power_ref_kw", w.power_ref_kw},
               {"reluctance_eur", w.reluctance_eur}};
  } else {
    j["wb"] = nullptr;
  }
  if (m.hp) {
    const auto& h = *m.hp;
    j["hp"] = {{"thermal_coeff", h.thermal_coeff}, {"max_power_kw", h.max_power_kw},
               {"cop", h.cop},                     {"temp_init", h.temp_init},
               {"temp_limit", h.temp_limit},       {"wall_loss_kw", h.wall_loss_kw},
               {"power_ref_kw", h.power_ref_kw},   {"reluctance_eur", h.reluctance_eur}};
  } else {
    j["hp"] = nullptr;
  }
  const auto& c = m.flexible_energy_cap;
  j["flexible_energy_cap_kwh"] = {
      {"total", c.total_kwh}, {"ev", c.ev_kwh}, {"wb", c.wb_kwh}, {"hp", c.hp_kwh}};
  return j;
}

}  // namespace

ScenarioValidationError::ScenarioValidationError(std::vector<Violation> violations)
    : ScenarioError(join_violations(violations)), violations_(std::move(violations)) {}

std::vector<Violation> validate_scenario(const Scenario& s) { return Validator(s).run(); }

Scenario load_scenario(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioParseError(std::string("malformed scenario document: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioParseError("scenario document must be a JSON object");
  if (integer(doc, "schema", "") != kScenarioSchemaVersion) {
    throw ScenarioParseError("unsupported schema version (expected 1)");
  }
  Scenario s;
  const Json& h = field(doc, "horizon", "");
  s.horizon = {integer(h, "steps_per_day", "horizon"), number(h, "dt_hours", "horizon"),
               integer(h, "num_days", "horizon")};
  const Json& p = field(doc, "prices", "");
  s.prices = {series(p, "import_price", "prices"), series(p, "export_price", "prices"),
              series(p, "community_fee", "prices")};
  const Json& members = field(doc, "members", "");
  if (!members.is_array()) throw ScenarioParseError("members: expected an array");
  for (std::size_t i = 0; i < members.size(); ++i) s.members.push_back(parse_member(members[i], i));

  auto violations = validate_scenario(s);
  if (!violations.empty()) throw ScenarioValidationError(std::move(violations));
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  Json doc;
  doc["schema"] = kScenarioSchemaVersion;
  doc["horizon"] = {{"steps_per_day", s.horizon.steps_per_day},
                    {"dt_hours", s.horizon.dt_hours},
                    {"num_days", s.horizon.num_days}};
  doc["prices"] = {{"import_price", s.prices.import_price},
                   {"export_price", s.prices.export_price},
                   {"community_fee", s.prices.community_fee}};
  doc["members"] = Json::array();
  for (const auto& m : s.members) doc["members"].push_back(member_json(m));
  return doc.dump() + "\n";
}

void save_scenario_file(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write scenario file " + path);
  out << serialize_scenario(s);
  if (!out) throw ScenarioError("error writing scenario file " + path);
}

}  // namespace reccoord
