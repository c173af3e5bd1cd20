#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "statemon/cli.hpp"
#include "statemon/csv.hpp"
#include "statemon/report.hpp"
#include "statemon/scenario.hpp"

namespace statemon {

namespace fs = std::filesystem;

namespace {

// Thrown inside a command to leave with a given exit code.
struct Exit {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kExitIo, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Exit{kExitIo, "error reading '" + path + "'"};
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Exit{kExitIo, "cannot write '" + path.string() + "'"};
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Exit{kExitIo, "cannot create directory '" + dir.string() + "'"};
}

Timestamp timestamp_arg(const std::string& text, const char* flag) {
  const auto t = parse_timestamp(text);
  if (!t) throw Exit{kExitIo, std::string(flag) + ": not an ISO-8601 timestamp: '" + text + "'"};
  return *t;
}

TimeZone zone_arg(const std::string& name) {
  const auto zone = TimeZone::load(name);
  if (!zone) throw Exit{kExitIo, "--tz: unknown time zone '" + name + "'"};
  return *zone;
}

void print_diagnostics(std::ostream& err, const std::vector<Diagnostic>& diags,
                       const std::string& source) {
  for (const auto& d : diags) err << format_diagnostic(d, source) << '\n';
}

std::int64_t floor_to(std::int64_t v, std::int64_t step) {
  std::int64_t q = v / step;
  if (v % step != 0 && v < 0) --q;
  return q * step;
}

ResolvedSpec load_or_exit(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path);
  ResolveResult loaded = load_spec(text, path);
  print_diagnostics(err, loaded.diagnostics, path);
  if (!loaded.spec) throw Exit{kExitSpecError, ""};
  return std::move(*loaded.spec);
}

// -- check -----------------------------------------------------------------

struct CheckArgs {
  std::string spec;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const ResolvedSpec spec = load_or_exit(a.spec, err);
  out << a.spec << ": ok (" << spec.document.elements.size() << " elements, "
      << spec.warnings.size() << " warnings)\n";
  return kExitOk;
}

// -- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string spec;
  std::vector<std::string> data;
  std::string markers;
  std::string bounds;
  std::string from;
  std::string to;
  std::int64_t step = kDefaultStepSeconds;
  std::string tz = "UTC";
  std::string mode;
  std::string out = ".";
  double eq_eps = kDefaultEqEps;
};

std::string rules_csv(const ResolvedSpec& spec, SeriesEvaluator& ev, const Grid& grid) {
  std::vector<std::size_t> rules;
  for (std::size_t i = 0; i < spec.document.elements.size(); ++i) {
    if (std::holds_alternative<RuleDef>(spec.element(i))) rules.push_back(i);
  }
  std::vector<const std::vector<TriState>*> columns;
  std::string out = "timestamp";
  for (const std::size_t r : rules) {
    out += "," + std::string(element_name(spec.element(r)));
    columns.push_back(&ev.rule(r));
  }
  out += '\n';
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    out += format_timestamp(grid.at(i));
    for (const auto* c : columns) {
      out += ',';
      out += to_string((*c)[i]);
    }
    out += '\n';
  }
  return out;
}

std::size_t dst_shifted(const StateSpaceResult& r, const TimeZone& zone) {
  if (r.grid.step_seconds <= 0 || 86400 % r.grid.step_seconds != 0) return 0;
  return build_carpet(r, CarpetKind::Verdict, zone).dst_shifted_cells;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.step < 1) throw Exit{kExitIo, "--step must be at least 1"};
  if (!(a.eq_eps >= 0)) throw Exit{kExitIo, "--eq-eps must be non-negative"};
  std::optional<SpaceMode> mode;
  if (!a.mode.empty()) {
    mode = parse_space_mode(a.mode);
    if (!mode) throw Exit{kExitIo, "--mode must be exclusive or permissive"};
  }
  const TimeZone zone = zone_arg(a.tz);

  // Spec plus the inferred integrating rules.
  const ResolvedSpec base = load_or_exit(a.spec, err);
  InferredRules inferred = with_inferred_rules(base.document);
  print_diagnostics(err, inferred.warnings, a.spec);
  ResolveResult full = resolve_spec(std::move(inferred.document));
  if (!full.spec) {
    print_diagnostics(err, full.diagnostics, a.spec);
    throw Exit{kExitSpecError, "inferred rules do not resolve"};
  }
  const ResolvedSpec& spec = *full.spec;

  std::vector<RawSample> samples;
  PreprocessCounters counters;
  for (const auto& path : a.data) {
    try {
      SensorCsv csv = parse_sensor_csv(read_file(path));
      counters.rejected_rows += csv.rejected_rows;
      samples.insert(samples.end(), std::make_move_iterator(csv.samples.begin()),
                     std::make_move_iterator(csv.samples.end()));
    } catch (const FormatError& e) {
      throw Exit{kExitIo, path + ": " + e.what()};
    }
  }

  Timestamp from{};
  Timestamp to{};
  if (!a.from.empty()) {
    from = timestamp_arg(a.from, "--from");
  } else {
    const auto it = std::min_element(samples.begin(), samples.end(),
                                     [](const auto& x, const auto& y) { return x.at < y.at; });
    from = Timestamp{std::chrono::seconds{floor_to(it->at.time_since_epoch().count(), a.step)}};
  }
  if (!a.to.empty()) {
    to = timestamp_arg(a.to, "--to");
  } else {
    const auto it = std::max_element(samples.begin(), samples.end(),
                                     [](const auto& x, const auto& y) { return x.at < y.at; });
    to = Timestamp{std::chrono::seconds{floor_to(it->at.time_since_epoch().count(), a.step) + a.step}};
  }
  if (!(from < to)) throw Exit{kExitIo, "--from must precede --to"};
  Grid grid;
  try {
    grid = Grid::make(from, to, a.step);
  } catch (const std::invalid_argument& e) {
    throw Exit{kExitIo, e.what()};
  }

  std::map<std::string, PlausibilityBounds> bounds;
  if (!a.bounds.empty()) {
    try {
      bounds = parse_bounds_csv(read_file(a.bounds));
    } catch (const FormatError& e) {
      throw Exit{kExitIo, a.bounds + ": " + e.what()};
    }
  }
  PreprocessResult pre = preprocess(group_by_sensor(samples), grid, bounds);
  pre.counters.rejected_rows += counters.rejected_rows;

  std::optional<EvalContext> ctx;
  try {
    ctx.emplace(spec, std::move(pre.dataset), grid, zone, EvalOptions{a.eq_eps});
  } catch (const MissingSensorsError& e) {
    err << "error: data lacks required sensors:";
    for (const auto& id : e.ids()) err << ' ' << id;
    err << '\n';
    return kExitMissingSensors;
  }

  MarkerCsv markers;
  if (!a.markers.empty()) {
    try {
      markers = parse_marker_csv(read_file(a.markers), grid);
    } catch (const FormatError& e) {
      throw Exit{kExitIo, a.markers + ": " + e.what()};
    }
  }

  const fs::path dir(a.out);
  make_dir(dir);
  SeriesEvaluator ev(*ctx);
  write_file(dir / "rules.csv", rules_csv(spec, ev, grid));

  const auto spaces = spec.state_spaces();
  std::string summary_text;
  std::string summary_csv = "key,value\n";
  std::string mismatches_csv = "statespace,cell,timestamp,observed_marker,expected_states\n";
  std::string transitions_csv = "statespace,from_marker,to_marker,count,declared\n";
  std::size_t violated = 0;
  std::size_t no_data = 0;

  for (const StateSpaceDef* ss : spaces) {
    StateSpaceResult result = eval_statespace(*ss, *ctx, mode);
    std::optional<Reconciliation> rec;
    if (const auto it = markers.by_statespace.find(ss->name); it != markers.by_statespace.end()) {
      attach_markers(result, it->second);
      rec = reconcile_markers(result, it->second, marker_map(*ss));
      for (const auto& m : rec->mismatches) {
        std::string expected;
        for (const auto& id : m.expected_states) expected += (expected.empty() ? "" : "|") + id;
        mismatches_csv += ss->name + "," + std::to_string(m.cell_index) + "," +
                          format_timestamp(grid.at(m.cell_index)) + "," +
                          csv_escape(m.observed_marker.value_or("")) + "," + expected + "\n";
      }
      for (const auto& t : transition_diagnostics(it->second, *ss)) {
        transitions_csv += ss->name + "," + csv_escape(t.from_marker) + "," +
                           csv_escape(t.to_marker) + "," + std::to_string(t.count) + "," +
                           (t.declared ? "true" : "false") + "\n";
      }
    }
    const std::string name =
        spaces.size() == 1 ? "results.csv" : "results-" + ss->name + ".csv";
    write_file(dir / name, export_results_csv(result));

    const Summary s = summarize(result, pre.counters, rec ? &*rec : nullptr, dst_shifted(result, zone));
    summary_text += render_summary_text(s);
    if (spaces.size() > 1) summary_text += '\n';
    std::string kv = render_summary_csv(s);
    kv.erase(0, kv.find('\n') + 1);
    if (spaces.size() > 1) {
      std::string prefixed;
      std::istringstream lines(kv);
      for (std::string line; std::getline(lines, line);) prefixed += ss->name + "." + line + "\n";
      kv = prefixed;
    }
    summary_csv += kv;

    violated += result.verdict.count(TriState::Violated);
    no_data += result.verdict.count(TriState::NoData);
    out << ss->name << ": " << result.verdict.count(TriState::Satisfied) << " satisfied, "
        << result.verdict.count(TriState::Violated) << " violated, "
        << result.verdict.count(TriState::NoData) << " no-data of " << result.cell_count()
        << " cells";
    if (rec) out << "; " << rec->mismatches.size() << " marker mismatches";
    out << '\n';
  }

  if (spaces.empty()) {
    // Without a state space the rules themselves carry the verdict.
    for (std::size_t i = 0; i < spec.document.elements.size(); ++i) {
      if (!std::holds_alternative<RuleDef>(spec.element(i))) continue;
      const auto& column = ev.rule(i);
      violated += static_cast<std::size_t>(std::count(column.begin(), column.end(), TriState::Violated));
      no_data += static_cast<std::size_t>(std::count(column.begin(), column.end(), TriState::NoData));
    }
    summary_text = "no state spaces; " + std::to_string(violated) + " violated and " +
                   std::to_string(no_data) + " no-data rule cells\n";
    summary_csv += "violated_rule_cells," + std::to_string(violated) + "\n";
    summary_csv += "no_data_rule_cells," + std::to_string(no_data) + "\n";
  }

  write_file(dir / "summary.txt", summary_text);
  write_file(dir / "summary.csv", summary_csv);
  write_file(dir / "mismatches.csv", mismatches_csv);
  write_file(dir / "transitions.csv", transitions_csv);

  if (violated > 0) return kExitViolations;
  if (no_data > 0) err << "warning: " << no_data << " cells without data\n";
  return kExitOk;
}

// -- report --------------------------------------------------------------------

struct ReportArgs {
  std::string results;
  std::string kind = "states";
  std::string out;
  std::string tz = "UTC";
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream&) {
  const auto kind = parse_carpet_kind(a.kind);
  if (!kind) throw Exit{kExitIo, "--kind must be states or verdict"};
  const TimeZone zone = zone_arg(a.tz);
  StateSpaceResult result;
  try {
    result = read_results_csv(read_file(a.results));
  } catch (const FormatError& e) {
    throw Exit{kExitIo, a.results + ": " + e.what()};
  }
  CarpetGrid grid;
  try {
    grid = build_carpet(result, *kind, zone);
  } catch (const std::invalid_argument& e) {
    throw Exit{kExitIo, e.what()};
  }
  write_file(a.out, render_svg(grid));
  out << a.out << ": " << grid.columns.size() << " days x " << grid.rows.size() << " slots\n";
  return kExitOk;
}

// -- generate ------------------------------------------------------------------

struct GenerateArgs {
  std::string out = ".";
  int days = 1;
  std::int64_t step = kDefaultStepSeconds;
  std::uint64_t seed = 1;
  std::string start;
  double reference_value = 21.0;
  std::vector<std::string> presence;
  std::vector<std::string> faults;
  std::vector<std::string> window_open;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

int minute_arg(const std::string& text) {
  int h = 0;
  int m = 0;
  char colon = 0;
  std::istringstream in(text);
  if (!(in >> h >> colon >> m) || colon != ':' || h < 0 || h > 24 || m < 0 || m > 59 ||
      h * 60 + m > 1440) {
    throw Exit{kExitIo, "--presence: bad time '" + text + "'"};
  }
  return h * 60 + m;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream&) {
  ScenarioConfig config;
  config.days = a.days;
  config.step_seconds = a.step;
  config.seed = a.seed;
  config.reference_value = a.reference_value;
  if (!a.start.empty()) config.start = timestamp_arg(a.start, "--start");
  if (!a.presence.empty()) {
    config.presence.clear();
    for (const auto& p : a.presence) {
      const auto parts = split(p, '-');
      if (parts.size() != 2) throw Exit{kExitIo, "--presence expects HH:MM-HH:MM"};
      config.presence.push_back({minute_arg(parts[0]), minute_arg(parts[1])});
    }
  }
  for (const auto& w : a.window_open) {
    const auto parts = split(w, ',');
    if (parts.size() != 2) throw Exit{kExitIo, "--window-open expects FROM,TO"};
    config.window_open.push_back({timestamp_arg(parts[0], "--window-open"),
                                  timestamp_arg(parts[1], "--window-open")});
  }
  std::vector<FaultInjection> faults;
  for (const auto& f : a.faults) {
    const auto parts = split(f, ',');
    if (parts.size() != 3 && parts.size() != 4) {
      throw Exit{kExitIo, "--fault expects KIND,FROM,TO[,MAGNITUDE]"};
    }
    const auto kind = parse_fault_kind(parts[0]);
    if (!kind) throw Exit{kExitIo, "--fault: unknown kind '" + parts[0] + "'"};
    FaultInjection fault{*kind, {timestamp_arg(parts[1], "--fault"), timestamp_arg(parts[2], "--fault")}, 0.0};
    if (parts.size() == 4) {
      try {
        fault.magnitude = std::stod(parts[3]);
      } catch (const std::exception&) {
        throw Exit{kExitIo, "--fault: bad magnitude '" + parts[3] + "'"};
      }
    }
    faults.push_back(fault);
  }

  ScenarioOutput scenario;
  try {
    scenario = generate(config, faults);
  } catch (const std::invalid_argument& e) {
    throw Exit{kExitIo, e.what()};
  }
  const fs::path dir(a.out);
  make_dir(dir);
  write_file(dir / "sensors.csv", scenario.sensor_csv);
  write_file(dir / "markers.csv", scenario.marker_csv);
  write_file(dir / "room_control.ens", scenario.spec_text);
  out << "wrote sensors.csv, markers.csv and room_control.ens to " << dir.string() << " ("
      << scenario.grid.cell_count() << " cells)\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Specification-based monitoring of building automation data", "statemon"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Parse and resolve a specification");
  c->add_option("spec,--spec", check.spec, "Specification file (.ens)")->required();

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Evaluate a specification against sensor data");
  e->add_option("--spec", ev.spec, "Specification file")->required();
  e->add_option("--data", ev.data, "Sensor CSV (repeatable)")->required();
  e->add_option("--markers", ev.markers, "Marker CSV");
  e->add_option("--bounds", ev.bounds, "Plausibility bounds CSV");
  e->add_option("--from", ev.from, "Grid start (ISO-8601)");
  e->add_option("--to", ev.to, "Grid end, exclusive (ISO-8601)");
  e->add_option("--step", ev.step, "Grid step in seconds")->capture_default_str();
  e->add_option("--tz", ev.tz, "IANA time zone for time routines")->capture_default_str();
  e->add_option("--mode", ev.mode, "Override state-space mode: exclusive|permissive");
  e->add_option("--out", ev.out, "Output directory")->capture_default_str();
  e->add_option("--eq-eps", ev.eq_eps, "Absolute tolerance of =, <=, >=")->capture_default_str();

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Render a carpet plot from a results CSV");
  r->add_option("results,--results", rep.results, "Results CSV")->required();
  r->add_option("--kind", rep.kind, "states|verdict")->capture_default_str();
  r->add_option("--out", rep.out, "SVG output file")->required();
  r->add_option("--tz", rep.tz, "IANA time zone for the date columns")->capture_default_str();

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate the room temperature control scenario");
  g->add_option("--out", gen.out, "Output directory")->capture_default_str();
  g->add_option("--days", gen.days, "Number of days")->capture_default_str();
  g->add_option("--step", gen.step, "Grid step in seconds")->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--start", gen.start, "First day (ISO-8601), default 2011-01-10T00:00:00Z");
  g->add_option("--reference-value", gen.reference_value, "Reference temperature")->capture_default_str();
  g->add_option("--presence", gen.presence, "Daily presence window HH:MM-HH:MM (repeatable)");
  g->add_option("--fault", gen.faults, "KIND,FROM,TO[,MAGNITUDE] (repeatable)");
  g->add_option("--window-open", gen.window_open, "FROM,TO window-open event (repeatable)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& s) {
    return app.exit(s, out, err);
  } catch (const CLI::ParseError& pe) {
    app.exit(pe, out, err);
    return kExitIo;
  }

  try {
    if (*c) return cmd_check(check, out, err);
    if (*e) return cmd_evaluate(ev, out, err);
    if (*r) return cmd_report(rep, out, err);
    return cmd_generate(gen, out, err);
  } catch (const Exit& x) {
    if (!x.message.empty()) err << "error: " << x.message << '\n';
    return x.code;
  }
}

}  // namespace statemon
