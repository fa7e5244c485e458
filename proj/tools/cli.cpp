#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "reccoord/billing.hpp"
#include "reccoord/reporting.hpp"
#include "reccoord/runner.hpp"

namespace reccoord::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty() || !std::isfinite(x)) {
    throw std::invalid_argument("generate: bad number for '" + key + "': " + v);
  }
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw std::invalid_argument("generate: bad integer for '" + key + "': " + v);
  }
  return x;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// FNV-1a; identifies the inputs a checkpoint belongs to.
std::string fingerprint(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

struct RunArgs {
  std::string scenario_path;
  std::string generate;
  std::uint64_t seed = 42;
  bool seed_given = false;
  std::string modes = "SoloFix,SoloFlex,ECFix,ECFlex";
  std::string key;
  int days = 0;
  double dt = 0.0;
  std::string out_dir = "out";
  std::string baseline;
  bool trace = false;
  bool allow_curtailment = false;
  bool resume = false;
  int max_iters = 100;
};

struct GenerateArgs {
  std::string options;
  std::uint64_t seed = 42;
  int days = 0;
  double dt = 0.0;
  std::string out = "scenario.json";
};

Scenario resolve_scenario(const RunArgs& a) {
  if (!a.scenario_path.empty() && !a.generate.empty()) {
    throw UsageError("--scenario and --generate are mutually exclusive");
  }
  if (a.scenario_path.empty()) {
    SyntheticConfig cfg = parse_generate_options(a.generate);
    if (a.seed_given) cfg.seed = a.seed;
    if (a.days > 0) cfg.days = a.days;
    if (a.dt > 0.0) cfg.dt_hours = a.dt;
    return generate_synthetic(cfg);
  }
  Scenario s = load_scenario_file(a.scenario_path);
  if (a.dt > 0.0 && std::abs(a.dt - s.horizon.dt_hours) > 1e-12) {
    throw UsageError("--dt " + std::to_string(a.dt) + " does not match the scenario's " +
                     std::to_string(s.horizon.dt_hours) + " h step");
  }
  return s;
}

class Checkpoint {
 public:
  Checkpoint(fs::path dir, std::string mode, std::string stamp, bool resume)
      : path_(dir / (mode + ".jsonl")) {
    fs::create_directories(dir);
    if (resume && fs::exists(path_)) {
      std::ifstream in(path_);
      std::string line;
      if (std::getline(in, line) && line == header(stamp)) {
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          DayResult r;
          try {
            day_record_from_json(line, r.schedule, r.trace);
          } catch (const ReportError&) {
            break;  // torn last line from an interrupted write
          }
          records_.emplace(r.schedule.day, std::move(r));
        }
      }
    }
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw ReportError("cannot open " + path_.string() + " for writing");
    out_ << header(stamp) << '\n';
    for (const auto& [d, r] : records_) out_ << day_record_to_json(r.schedule, r.trace) << '\n';
    out_.flush();
  }

  bool lookup(int day, DayResult& r) {
    const auto it = records_.find(day);
    if (it == records_.end()) return false;
    r = it->second;
    ++reused_;
    return true;
  }

  void store(const DayResult& r) {
    out_ << day_record_to_json(r.schedule, r.trace) << '\n';
    out_.flush();
  }

  [[nodiscard]] int reused() const { return reused_; }

 private:
  static std::string header(const std::string& stamp) {
    return nlohmann::json{{"checkpoint", stamp}}.dump();
  }

  fs::path path_;
  std::map<int, DayResult> records_;
  std::ofstream out_;
  int reused_ = 0;
};

int do_run(const RunArgs& a, std::ostream& out) {
  std::vector<RunMode> modes;
  for (const std::string& name : split(a.modes, ',')) {
    if (name.empty()) continue;
    try {
      const RunMode m = parse_mode(name);
      if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (modes.empty()) throw UsageError("--modes: at least one mode is required");

  RunOptions opt;
  opt.planner.allow_curtailment = a.allow_curtailment;
  opt.max_iterations = a.max_iters;
  if (a.max_iters <= 0) throw UsageError("--max-iters must be positive");
  const bool decentral = std::any_of(modes.begin(), modes.end(), is_decentralized);
  if (!a.key.empty()) {
    try {
      opt.key = parse_key(a.key);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else if (decentral) {
    throw UsageError("--key is required for ECFlexIt modes (equal, prorate or cascade)");
  }

  const Scenario s = resolve_scenario(a);
  const int days = a.days > 0 ? a.days : s.horizon.num_days;
  if (days > s.horizon.num_days) {
    throw UsageError("--days " + std::to_string(days) + " exceeds the scenario's " +
                     std::to_string(s.horizon.num_days) + " days");
  }
  activation_price(s.prices);  // fail before any solve

  const fs::path out_dir(a.out_dir);
  const std::string stamp =
      fingerprint(serialize_scenario(s) + "|" + std::string(to_string(opt.key)) + "|" +
                  std::to_string(opt.max_iterations) + "|" +
                  (opt.planner.allow_curtailment ? "c" : "-"));

  std::vector<ModeResult> results;
  std::vector<ModeTrace> traces;
  for (RunMode m : modes) {
    const std::string name(to_string(m));
    Checkpoint cp(out_dir / "checkpoint", name, stamp, a.resume);
    ModeTrace tr{name, {}};
    results.push_back(run_mode(
        s, m, days, opt, &tr.iterations, [&cp](int d, DayResult& r) { return cp.lookup(d, r); },
        [&cp](const DayResult& r) { cp.store(r); }));
    if (a.trace && is_decentralized(m)) traces.push_back(std::move(tr));
    out << name << ": bill " << format_number(summarize({results.back()}).get("bill_eur", name))
        << " EUR over " << days << " day(s)";
    if (cp.reused() > 0) out << " (" << cp.reused() << " from checkpoint)";
    out << '\n';
  }

  std::string baseline = a.baseline;
  if (baseline.empty()) {
    baseline = std::find(modes.begin(), modes.end(), RunMode::SoloFix) != modes.end()
                   ? "SoloFix"
                   : results.front().mode;
  } else {
    try {
      baseline = std::string(to_string(parse_mode(baseline)));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (std::find(modes.begin(), modes.end(), parse_mode(baseline)) == modes.end()) {
      throw UsageError("--baseline " + baseline + " is not among the modes run");
    }
  }
  const auto files = write_report(out_dir, s, results, individual_benefits(results, baseline), traces);
  out << "wrote " << files.summary.string() << ", " << files.benefits.string() << ", "
      << files.schedules.string() << ", " << files.trace.string() << '\n';
  return kOk;
}

}  // namespace

SyntheticConfig parse_generate_options(std::string_view text) {
  SyntheticConfig c;
  if (text.empty()) return c;
  for (const std::string& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("generate: expected key=value, got '" + item + "'");
    const std::string k = item.substr(0, eq);
    const std::string v = item.substr(eq + 1);
    if (k == "members") c.members = to_int(k, v);
    else if (k == "days") c.days = to_int(k, v);
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "wb") c.wb_rate = to_double(k, v);
    else if (k == "ev") c.ev_rate = to_double(k, v);
    else if (k == "hp") c.hp_rate = to_double(k, v);
    else if (k == "bss") c.bss_rate = to_double(k, v);
    else if (k == "pv_owners") c.pv_owner_rate = to_double(k, v);
    else if (k == "pv_kwp") c.pv_total_kwp = to_double(k, v);
    else if (k == "dt") c.dt_hours = to_double(k, v);
    else if (k == "import") c.import_price = to_double(k, v);
    else if (k == "export") c.export_price = to_double(k, v);
    else if (k == "fee") c.community_fee = to_double(k, v);
    else throw std::invalid_argument("generate: unknown parameter '" + k + "'");
  }
  return c;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Day-ahead scheduling for renewable energy communities", "reccoord"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Solve the requested modes and write the report");
  auto* src = run->add_option("--scenario", ra.scenario_path, "Scenario JSON file");
  auto* gen = run->add_option("--generate", ra.generate,
                              "Synthetic community, e.g. members=20,ev=0.6 (keys: members, days, "
                              "wb, ev, hp, bss, pv_owners, pv_kwp, dt, import, export, fee)");
  src->excludes(gen);
  run->add_option("--seed", ra.seed, "Generator seed")->each([&ra](const std::string&) {
    ra.seed_given = true;
  });
  run->add_option("--modes", ra.modes,
                  "Comma list of SoloFix, SoloFlex, ECFix, ECFlex, ECFlexIt, ECFlexItPrimed")
      ->capture_default_str();
  run->add_option("--key", ra.key, "Key of repartition: equal, prorate, cascade");
  run->add_option("--days", ra.days, "Days to solve (default: whole horizon)");
  run->add_option("--dt", ra.dt, "Step length in hours");
  run->add_option("--out", ra.out_dir, "Output directory")->capture_default_str();
  run->add_option("--baseline", ra.baseline, "Mode the benefits are measured against");
  run->add_flag("--trace", ra.trace, "Write ECFlexIt iteration traces");
  run->add_flag("--allow-curtailment", ra.allow_curtailment, "Let PV be curtailed");
  run->add_flag("--resume", ra.resume, "Reuse finished days from <out>/checkpoint");
  run->add_option("--max-iters", ra.max_iters, "ECFlexIt iteration cap")->capture_default_str();

  GenerateArgs ga;
  auto* generate = app.add_subcommand("generate", "Write a synthetic scenario file");
  generate->add_option("options", ga.options, "key=value list as for run --generate");
  generate->add_option("--seed", ga.seed, "Generator seed")->capture_default_str();
  generate->add_option("--days", ga.days, "Days");
  generate->add_option("--dt", ga.dt, "Step length in hours");
  generate->add_option("--out,-o", ga.out, "Output file")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (run->parsed()) {
      if (ra.scenario_path.empty() && ra.generate.empty()) {
        throw UsageError("one of --scenario or --generate is required");
      }
      return do_run(ra, out);
    }
    SyntheticConfig cfg = parse_generate_options(ga.options);
    cfg.seed = ga.seed;
    if (ga.days > 0) cfg.days = ga.days;
    if (ga.dt > 0.0) cfg.dt_hours = ga.dt;
    save_scenario_file(generate_synthetic(cfg), ga.out);
    out << "wrote " << ga.out << '\n';
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nrun 'reccoord run --help' for usage\n";
    return kUsage;
  } catch (const ScenarioValidationError& e) {
    err << "error: invalid scenario\n";
    for (const Violation& v : e.violations()) err << "  " << v.path << ": " << v.message << '\n';
    return kUsage;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BillingError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const PlanningError& e) {
    err << "error: " << e.mode() << " day " << e.day() << ": " << e.what() << '\n';
    return kInfeasible;
  } catch (const IterationCapError& e) {
    err << "error: " << e.what() << " (" << e.trace().size() << " iterations traced)\n";
    return kIterationCap;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace reccoord::cli
