#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "helpers.hpp"
#include "reccoord/reporting.hpp"
#include "reccoord/runner.hpp"

using namespace reccoord;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("reccoord_test_" + name);
  fs::remove_all(p);
  return p;
}

Scenario small() {
  SyntheticConfig c;
  c.members = 3;
  c.dt_hours = 1.0;
  c.seed = 9;
  c.pv_total_kwp = 10.0;
  c.bss_rate = 0.34;
  return generate_synthetic(c);
}

std::vector<ModeResult> run_modes(const Scenario& s, std::vector<ModeTrace>* traces = nullptr) {
  std::vector<ModeResult> out;
  for (RunMode m : {RunMode::SoloFix, RunMode::ECFlex, RunMode::ECFlexIt}) {
    std::vector<IterationTrace> tr;
    out.push_back(run_mode(s, m, 1, {}, &tr));
    if (traces) traces->push_back({std::string(to_string(m)), tr});
  }
  return out;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.28) == "0.28");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1234567890.0) == "1.23456789e+09");
  CHECK(format_number(std::nan("")) == "");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("empty report gives header-only files") {
  const fs::path dir = scratch("empty");
  const Scenario s = small();
  const ReportFiles f = write_report(dir, s, {}, {}, {});
  CHECK(slurp(f.summary) == "metric\n");
  CHECK(slurp(f.benefits) ==
        "mode,member,bill_eur,bill_delta_eur,discomfort_eur,discomfort_delta_eur,flex_revenue_eur\n");
  CHECK(slurp(f.schedules) == "mode,day,t,member,variable,value\n");
  CHECK(slurp(f.trace).empty());
  fs::remove_all(dir);
}

TEST_CASE("identical runs give byte-identical files; one summary column per mode") {
  const Scenario s = small();
  const fs::path a = scratch("a"), b = scratch("b");
  std::vector<ModeTrace> ta, tb;
  const auto ra = run_modes(s, &ta);
  const auto rb = run_modes(s, &tb);
  const ReportFiles fa = write_report(a, s, ra, individual_benefits(ra, "SoloFix"), ta);
  const ReportFiles fb = write_report(b, s, rb, individual_benefits(rb, "SoloFix"), tb);
  for (auto [x, y] : {std::pair{fa.summary, fb.summary}, {fa.benefits, fb.benefits},
                      {fa.schedules, fb.schedules}, {fa.trace, fb.trace}}) {
    CHECK(slurp(x) == slurp(y));
  }
  std::istringstream summary(slurp(fa.summary));
  std::string header;
  std::getline(summary, header);
  CHECK(header == "metric,SoloFix,ECFlex,ECFlexIt");
  std::string row;
  int rows = 0;
  while (std::getline(summary, row)) {
    ++rows;
    CHECK(std::count(row.begin(), row.end(), ',') == 3);
  }
  CHECK(rows == static_cast<int>(summary_metrics().size()));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("schedules round-trip and stay in order") {
  const Scenario s = small();
  const auto results = run_modes(s);
  std::ostringstream out;
  write_schedules_csv(s, results, out);
  std::istringstream in(out.str());
  const auto rows = read_schedules_csv(in);
  REQUIRE_FALSE(rows.empty());
  std::map<std::string, const ModeResult*> by_mode;
  for (const auto& r : results) by_mode[r.mode] = &r;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ScheduleRow& r = rows[i];
    const DaySchedule& d = by_mode.at(r.mode)->days.at(static_cast<std::size_t>(r.day));
    const auto it = std::find_if(d.members.begin(), d.members.end(),
                                 [&](const MemberSchedule& m) { return m.id == r.member; });
    REQUIRE(it != d.members.end());
    double expected = 0.0;
    if (r.variable == "p_inj") expected = it->p_inj[r.t];
    else if (r.variable == "i_ret") expected = it->i_ret[r.t];
    else continue;
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-8));
    if (i > 0 && rows[i - 1].mode == r.mode && rows[i - 1].t == r.t &&
        rows[i - 1].member == r.member) {
      CHECK(rows[i - 1].variable < r.variable);
    }
  }
  // Members without a device carry no rows for it.
  for (const Member& m : s.members) {
    if (m.ev) continue;
    CHECK(std::none_of(rows.begin(), rows.end(), [&](const ScheduleRow& r) {
      return r.member == m.id && r.variable == "soc_ev";
    }));
  }
}

TEST_CASE("checkpoint records round-trip exactly") {
  const Scenario s = small();
  std::vector<IterationTrace> trace;
  const ModeResult r = run_mode(s, RunMode::ECFlexItPrimed, 1, {}, &trace);
  const std::string line = day_record_to_json(r.days[0], trace);
  DaySchedule back;
  std::vector<IterationTrace> trace_back;
  day_record_from_json(line, back, trace_back);
  CHECK(day_record_to_json(back, trace_back) == line);
  CHECK(back.members[0].p_inj == r.days[0].members[0].p_inj);
  CHECK_THROWS_AS(day_record_from_json("{\"day\": 1}", back, trace_back), ReportError);
}

TEST_CASE("unwritable output directory names the path") {
  const fs::path file = scratch("blocker");
  std::ofstream(file) << "x";
  try {
    (void)write_report(file / "sub", small(), {}, {}, {});
    FAIL("expected ReportError");
  } catch (const ReportError& e) {
    CHECK(std::string(e.what()).find("blocker") != std::string::npos);
  }
  fs::remove_all(file);
}
