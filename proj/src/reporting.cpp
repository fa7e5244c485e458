#include "reccoord/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace reccoord {

namespace {

using Json = nlohmann::ordered_json;

// Variable name -> series accessor, in ascending name order.
struct VarSpec {
  const char* name;
  Series MemberSchedule::*series;
  char device;  // 0 always, 'b' BSS, 'e' EV, 'w' WB, 'h' HP
};

const std::vector<VarSpec>& schedule_vars() {
  static const std::vector<VarSpec> vars{
      {"act_down", &MemberSchedule::act_down, 0}, {"act_up", &MemberSchedule::act_up, 0},
      {"e_com", &MemberSchedule::e_com, 0},       {"e_ret", &MemberSchedule::e_ret, 0},
      {"i_com", &MemberSchedule::i_com, 0},       {"i_ret", &MemberSchedule::i_ret, 0},
      {"j_ev", &MemberSchedule::j_ev, 'e'},       {"j_hp", &MemberSchedule::j_hp, 'h'},
      {"j_wb", &MemberSchedule::j_wb, 'w'},       {"p_cha", &MemberSchedule::p_cha, 'b'},
      {"p_dis", &MemberSchedule::p_dis, 'b'},     {"p_ev", &MemberSchedule::p_ev, 'e'},
      {"p_hp", &MemberSchedule::p_hp, 'h'},       {"p_inj", &MemberSchedule::p_inj, 0},
      {"p_pv", &MemberSchedule::p_pv, 0},         {"p_wb", &MemberSchedule::p_wb, 'w'},
      {"soc_bss", &MemberSchedule::soc_bss, 'b'}, {"soc_ev", &MemberSchedule::soc_ev, 'e'},
      {"temp_hp", &MemberSchedule::temp_hp, 'h'}, {"temp_wb", &MemberSchedule::temp_wb, 'w'},
  };
  return vars;
}

const std::vector<std::pair<const char*, Series MemberSchedule::*>>& json_series() {
  static const std::vector<std::pair<const char*, Series MemberSchedule::*>> fields{
      {"i_ret", &MemberSchedule::i_ret},     {"e_ret", &MemberSchedule::e_ret},
      {"i_com", &MemberSchedule::i_com},     {"e_com", &MemberSchedule::e_com},
      {"p_pv", &MemberSchedule::p_pv},       {"p_cha", &MemberSchedule::p_cha},
      {"p_dis", &MemberSchedule::p_dis},     {"p_ev", &MemberSchedule::p_ev},
      {"p_wb", &MemberSchedule::p_wb},       {"p_hp", &MemberSchedule::p_hp},
      {"p_inj", &MemberSchedule::p_inj},     {"soc_bss", &MemberSchedule::soc_bss},
      {"soc_ev", &MemberSchedule::soc_ev},   {"temp_wb", &MemberSchedule::temp_wb},
      {"temp_hp", &MemberSchedule::temp_hp}, {"j_ev", &MemberSchedule::j_ev},
      {"j_wb", &MemberSchedule::j_wb},       {"j_hp", &MemberSchedule::j_hp},
      {"ref_ev", &MemberSchedule::ref_ev},   {"ref_wb", &MemberSchedule::ref_wb},
      {"ref_hp", &MemberSchedule::ref_hp},   {"act_up", &MemberSchedule::act_up},
      {"act_down", &MemberSchedule::act_down},
  };
  return fields;
}

bool owns(const Member& m, char device) {
  switch (device) {
    case 'b': return m.bss.has_value();
    case 'e': return m.ev.has_value();
    case 'w': return m.wb.has_value();
    case 'h': return m.hp.has_value();
    default: return true;
  }
}

Json directional(const std::string& member, const Series& up, const Series& down) {
  return Json{{"member", member}, {"up_kw", up}, {"down_kw", down}};
}

template <class T>
std::vector<T> read_directional(const Json& arr) {
  std::vector<T> out;
  for (const Json& j : arr) {
    T x;
    x.member = j.at("member").get<std::string>();
    x.up_kw = j.at("up_kw").get<Series>();
    x.down_kw = j.at("down_kw").get<Series>();
    out.push_back(std::move(x));
  }
  return out;
}

Json trace_json(const IterationTrace& it) {
  Json j;
  j["day"] = it.day;
  j["iteration"] = it.iteration;
  j["request_up_kw"] = it.request_up;
  j["request_down_kw"] = it.request_down;
  Json offers = Json::array(), bounds = Json::array(), acts = Json::array();
  for (const auto& o : it.offers) offers.push_back(directional(o.member, o.up_kw, o.down_kw));
  for (const auto& b : it.bounds) bounds.push_back(directional(b.member, b.up_kw, b.down_kw));
  for (const auto& a : it.activations) acts.push_back(directional(a.member, a.up_kw, a.down_kw));
  j["offers"] = std::move(offers);
  j["bounds"] = std::move(bounds);
  j["activations"] = std::move(acts);
  j["remaining_up_kw"] = it.remaining_up;
  j["remaining_down_kw"] = it.remaining_down;
  j["activated_kw"] = it.activated;
  return j;
}

IterationTrace trace_from(const Json& j) {
  IterationTrace it;
  it.day = j.at("day").get<int>();
  it.iteration = j.at("iteration").get<int>();
  it.request_up = j.at("request_up_kw").get<Series>();
  it.request_down = j.at("request_down_kw").get<Series>();
  it.offers = read_directional<CapacityOffer>(j.at("offers"));
  it.bounds = read_directional<ActivationBounds>(j.at("bounds"));
  it.activations = read_directional<Activation>(j.at("activations"));
  it.remaining_up = j.at("remaining_up_kw").get<Series>();
  it.remaining_down = j.at("remaining_down_kw").get<Series>();
  it.activated = j.at("activated_kw").get<double>();
  return it;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw ReportError("cannot open " + p.string() + " for writing");
  return f;
}

void close_out(std::ofstream& f, const std::filesystem::path& p) {
  f.flush();
  if (!f) throw ReportError("write failed: " + p.string());
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_summary_csv(const Report& report, std::ostream& out) {
  out << "metric";
  for (const auto& m : report.modes) out << ',' << csv_field(m);
  out << '\n';
  if (report.modes.empty()) return;
  for (const std::string& name : summary_metrics()) {
    const auto it = report.metrics.find(name);
    if (it == report.metrics.end()) continue;
    out << name;
    for (double v : it->second) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_benefits_csv(const std::vector<MemberBenefit>& rows, std::ostream& out) {
  out << "mode,member,bill_eur,bill_delta_eur,discomfort_eur,discomfort_delta_eur,"
         "flex_revenue_eur\n";
  for (const MemberBenefit& b : rows) {
    out << csv_field(b.mode) << ',' << csv_field(b.member) << ',' << format_number(b.bill) << ','
        << format_number(b.bill_delta) << ',' << format_number(b.discomfort) << ','
        << format_number(b.discomfort_delta) << ',' << format_number(b.flex_revenue) << '\n';
  }
}

void write_schedules_csv(const Scenario& s, const std::vector<ModeResult>& results,
                         std::ostream& out) {
  out << "mode,day,t,member,variable,value\n";
  std::vector<std::size_t> by_id(s.members.size());
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(),
            [&s](std::size_t a, std::size_t b) { return s.members[a].id < s.members[b].id; });
  for (const ModeResult& r : results) {
    const std::string mode = csv_field(r.mode);
    for (const DaySchedule& d : r.days) {
      if (d.members.size() != s.members.size()) {
        throw ReportError("schedule of " + r.mode + " does not match the scenario members");
      }
      const std::size_t n = d.members.empty() ? 0 : d.members.front().p_inj.size();
      for (std::size_t k = 0; k < n; ++k) {
        const std::string prefix = mode + ',' + std::to_string(d.day) + ',' + std::to_string(k);
        for (std::size_t u : by_id) {
          const Member& m = s.members[u];
          const MemberSchedule& ms = d.members[u];
          const std::string id = csv_field(m.id);
          for (const VarSpec& v : schedule_vars()) {
            if (!owns(m, v.device)) continue;
            const Series& series = ms.*(v.series);
            if (series.size() != n) continue;
            out << prefix << ',' << id << ',' << v.name << ',' << format_number(series[k])
                << '\n';
          }
        }
      }
    }
  }
}

std::string trace_to_json(const std::string& mode, const IterationTrace& it) {
  Json j;
  j["mode"] = mode;
  const Json body = trace_json(it);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j.dump();
}

void write_trace_jsonl(const std::vector<ModeTrace>& traces, std::ostream& out) {
  for (const ModeTrace& t : traces) {
    for (const IterationTrace& it : t.iterations) out << trace_to_json(t.mode, it) << '\n';
  }
}

ReportFiles write_report(const std::filesystem::path& dir, const Scenario& s,
                         const std::vector<ModeResult>& results,
                         const std::vector<MemberBenefit>& benefits,
                         const std::vector<ModeTrace>& traces) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ReportError("cannot create " + dir.string() + ": " + ec.message());
  ReportFiles files{dir / "summary.csv", dir / "benefits.csv", dir / "schedules.csv",
                    dir / "trace.jsonl"};
  {
    auto f = open_out(files.summary);
    write_summary_csv(summarize(results), f);
    close_out(f, files.summary);
  }
  {
    auto f = open_out(files.benefits);
    write_benefits_csv(benefits, f);
    close_out(f, files.benefits);
  }
  {
    auto f = open_out(files.schedules);
    write_schedules_csv(s, results, f);
    close_out(f, files.schedules);
  }
  {
    auto f = open_out(files.trace);
    write_trace_jsonl(traces, f);
    close_out(f, files.trace);
  }
  return files;
}

std::vector<ScheduleRow> read_schedules_csv(std::istream& in) {
  std::vector<ScheduleRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != "mode,day,t,member,variable,value") {
    throw ReportError("schedules: unexpected header");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw ReportError("schedules line " + std::to_string(lineno) + ": 6 fields expected");
    try {
      rows.push_back({f[0], std::stoi(f[1]), std::stoi(f[2]), f[3], f[4], std::stod(f[5])});
    } catch (const std::exception&) {
      throw ReportError("schedules line " + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

std::string day_record_to_json(const DaySchedule& day, const std::vector<IterationTrace>& trace) {
  Json j;
  j["day"] = day.day;
  j["mode"] = day.mode;
  j["first_step"] = day.first_step;
  j["dt_hours"] = day.dt_hours;
  j["objective"] = day.objective;
  j["total_bill"] = day.total_bill;
  j["total_discomfort"] = day.total_discomfort;
  Json members = Json::array();
  for (const MemberSchedule& m : day.members) {
    Json jm;
    jm["id"] = m.id;
    for (const auto& [name, field] : json_series()) jm[name] = m.*field;
    jm["bill"] = m.bill;
    jm["discomfort"] = m.discomfort;
    jm["flex_revenue"] = m.flex_revenue;
    members.push_back(std::move(jm));
  }
  j["members"] = std::move(members);
  Json tr = Json::array();
  for (const IterationTrace& it : trace) tr.push_back(trace_json(it));
  j["trace"] = std::move(tr);
  return j.dump();
}

void day_record_from_json(const std::string& line, DaySchedule& day,
                          std::vector<IterationTrace>& trace) {
  try {
    const Json j = Json::parse(line);
    day = {};
    day.day = j.at("day").get<int>();
    day.mode = j.at("mode").get<std::string>();
    day.first_step = j.at("first_step").get<int>();
    day.dt_hours = j.at("dt_hours").get<double>();
    day.objective = j.at("objective").get<double>();
    day.total_bill = j.at("total_bill").get<double>();
    day.total_discomfort = j.at("total_discomfort").get<double>();
    for (const Json& jm : j.at("members")) {
      MemberSchedule m;
      m.id = jm.at("id").get<std::string>();
      for (const auto& [name, field] : json_series()) m.*field = jm.at(name).get<Series>();
      m.bill = jm.at("bill").get<double>();
      m.discomfort = jm.at("discomfort").get<double>();
      m.flex_revenue = jm.at("flex_revenue").get<double>();
      day.members.push_back(std::move(m));
    }
    trace.clear();
    for (const Json& it : j.at("trace")) trace.push_back(trace_from(it));
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(std::string("bad checkpoint record: ") + e.what());
  }
}

}  // namespace reccoord
