// Stable file output: summary and benefit tables, long-format schedules,
// iteration traces, and the per-day checkpoint records.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "reccoord/billing.hpp"
#include "reccoord/decentral.hpp"
#include "reccoord/planner.hpp"
#include "reccoord/scenario.hpp"

namespace reccoord {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 9 significant digits, "." separator; NaN becomes an empty cell.
std::string format_number(double v);
// RFC-4180 quoting when needed.
std::string csv_field(const std::string& s);

struct ReportFiles {
  std::filesystem::path summary, benefits, schedules, trace;
};

struct ModeTrace {
  std::string mode;
  std::vector<IterationTrace> iterations;
};

// Header "metric,<mode>,<mode>..." then one row per summary metric.
void write_summary_csv(const Report& report, std::ostream& out);
// Header "mode,member,bill_eur,bill_delta_eur,discomfort_eur,discomfort_delta_eur,flex_revenue_eur".
void write_benefits_csv(const std::vector<MemberBenefit>& rows, std::ostream& out);
// Header "mode,day,t,member,variable,value"; per mode: day, t, member id,
// variable name ascending. Device variables appear only for members that
// own the device.
void write_schedules_csv(const Scenario& s, const std::vector<ModeResult>& results,
                         std::ostream& out);
void write_trace_jsonl(const std::vector<ModeTrace>& traces, std::ostream& out);

// Writes the four files into `dir` (created if needed). Throws ReportError
// naming the path on I/O failure.
ReportFiles write_report(const std::filesystem::path& dir, const Scenario& s,
                         const std::vector<ModeResult>& results,
                         const std::vector<MemberBenefit>& benefits,
                         const std::vector<ModeTrace>& traces);

struct ScheduleRow {
  std::string mode;
  int day = 0;
  int t = 0;
  std::string member;
  std::string variable;
  double value = 0.0;
};

std::vector<ScheduleRow> read_schedules_csv(std::istream& in);

// One JSON line per day result (checkpoint format); includes the trace.
std::string day_record_to_json(const DaySchedule& day, const std::vector<IterationTrace>& trace);
void day_record_from_json(const std::string& line, DaySchedule& day,
                          std::vector<IterationTrace>& trace);

std::string trace_to_json(const std::string& mode, const IterationTrace& it);

}  // namespace reccoord
