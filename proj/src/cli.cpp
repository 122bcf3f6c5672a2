#include "contacttrees/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "contacttrees/render.hpp"
#include "contacttrees/service.hpp"
#include "contacttrees/synth.hpp"
#include "json_util.hpp"

namespace contacttrees::cli {

namespace fs = std::filesystem;
using detail::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return kExitUsage;
    case ErrorKind::UnknownPreset:
    case ErrorKind::IncompatibleKind:
    case ErrorKind::InvalidMapping:
    case ErrorKind::MissingAttribute:
    case ErrorKind::UnmappedValue: return kExitMapping;
    default: return kExitData;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MalformedInput, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

Diary load_diary(const std::string& data, bool check) {
  auto comma = data.find(',');
  if (comma != std::string::npos)
    return parse_diary_csv(read_file(data.substr(0, comma)), read_file(data.substr(comma + 1)),
                           canonical_schema(), check);
  if (fs::is_directory(data)) {
    const fs::path dir(data);
    const auto schema = fs::exists(dir / "schema.json")
                            ? parse_schema_json(read_file((dir / "schema.json").string()))
                            : canonical_schema();
    const auto ties = read_file((dir / "ties.csv").string());
    const auto contacts = read_file((dir / "contacts.csv").string());
    if (fs::exists(dir / "egos.csv"))
      return parse_diary_csv(ties, contacts, read_file((dir / "egos.csv").string()), schema, check);
    return parse_diary_csv(ties, contacts, schema, check);
  }
  return parse_diary_json(read_file(data), check);
}

MappingSpec load_mapping(const std::string& preset_or_path) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), preset_or_path) != names.end())
    return preset_mapping(preset_or_path);
  if (!fs::is_regular_file(preset_or_path))
    throw Error(ErrorKind::UnknownPreset,
                "'" + preset_or_path + "' is neither a preset nor a mapping file");
  return parse_mapping_json(read_file(preset_or_path));
}

LayoutParams load_params(const std::optional<std::string>& path) {
  if (!path) return {};
  try {
    return parse_layout_params(read_file(*path));
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidParams, e.what());
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json exclusions(const std::vector<Exclusion>& list) {
  json a = json::array();
  for (const auto& e : list) a.push_back({{"id", e.id}, {"reason", e.reason}});
  return a;
}

json timing_json(const Timing& t) {
  return {{"parse", t.parse_ms}, {"layout", t.layout_ms}, {"render", t.render_ms}};
}

json panel_json(const RunReport& r) {
  return {{"ego", r.ego},
          {"period", r.period},
          {"included", r.included},
          {"excluded", exclusions(r.excluded)},
          {"excluded_contacts", exclusions(r.excluded_contacts)}};
}

RunReport report_for(const SceneGraph& scene) {
  RunReport r;
  r.ego = scene.meta.ego;
  r.period = scene.meta.period;
  r.included = scene.curves.size();
  r.excluded = scene.meta.excluded_ties;
  r.excluded_contacts = scene.meta.excluded_contacts;
  return r;
}

std::optional<Period> parse_period(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  try {
    return Period::parse(*text);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidParams, e.what());
  }
}

MappingSpec checked_mapping(const std::string& mapping, const Diary& diary, std::ostream& err) {
  auto spec = load_mapping(mapping);
  auto report = validate_mapping(spec, diary.schema);
  if (!report.ok()) {
    err << report_to_json(report);
    throw Error(ErrorKind::InvalidMapping, "mapping '" + spec.name + "' does not fit the data");
  }
  return spec;
}

struct RenderArgs {
  std::string data, ego, mapping = std::string(kPresetDiaryDefault), out, format = "svg";
  std::optional<std::string> params, period;
};

int cmd_render(const RenderArgs& a, std::ostream& out, std::ostream& err) {
  Timing t;
  auto t0 = Clock::now();
  const Diary diary = load_diary(a.data);
  const auto params = load_params(a.params);
  const auto period = parse_period(a.period);
  const auto spec = checked_mapping(a.mapping, diary, err);
  t.parse_ms = ms_since(t0);

  t0 = Clock::now();
  const auto scene = layout_tree(diary, a.ego, period, spec, params);
  t.layout_ms = ms_since(t0);

  t0 = Clock::now();
  std::vector<std::pair<std::string, std::string>> files;
  fs::path base(a.out);
  if (a.format == "both") {
    files.emplace_back(fs::path(base).replace_extension(".svg").string(), scene_to_svg(scene));
    files.emplace_back(fs::path(base).replace_extension(".json").string(), scene_to_json(scene));
  } else {
    files.emplace_back(a.out, a.format == "json" ? scene_to_json(scene) : scene_to_svg(scene));
  }
  t.render_ms = ms_since(t0);

  RunReport r = report_for(scene);
  for (const auto& [path, bytes] : files) {
    write_file(path, bytes);
    r.outputs.push_back(path);
  }
  r.timing = t;
  out << report_json({r}, t, r.outputs);
  return kExitOk;
}

struct CompareArgs {
  std::vector<std::string> data, periods;
  std::string ego, mapping = std::string(kPresetDiaryDefault), out;
  std::optional<std::string> params;
  bool shared_norm = false;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  const std::size_t panels = std::max(a.data.size(), a.periods.size());
  if (panels > 3) {
    err << "error: compare draws at most 3 panels, got " << panels << "\n";
    return kExitTooManyPanels;
  }
  if (panels < 2) {
    err << "error: compare needs at least 2 panels (repeat --data or --period)\n";
    return kExitUsage;
  }
  if (a.data.size() > 1 && a.periods.size() > 1) {
    err << "error: repeat either --data or --period, not both\n";
    return kExitUsage;
  }

  Timing total;
  auto t0 = Clock::now();
  const auto params = load_params(a.params);
  struct Panel {
    std::string data;
    std::optional<Period> period;
    std::string caption;
  };
  std::vector<Panel> plan;
  for (std::size_t i = 0; i < panels; ++i) {
    Panel p;
    p.data = a.data.size() > 1 ? a.data[i] : a.data.at(0);
    if (!a.periods.empty()) p.period = parse_period(a.periods.size() > 1 ? a.periods[i] : a.periods[0]);
    plan.push_back(std::move(p));
  }
  if (a.periods.size() > 1)
    std::stable_sort(plan.begin(), plan.end(), [](const Panel& x, const Panel& y) {
      return x.period->from < y.period->from;
    });

  std::map<std::string, Diary> diaries;
  for (const auto& p : plan)
    if (!diaries.count(p.data)) diaries.emplace(p.data, load_diary(p.data));
  auto spec = checked_mapping(a.mapping, diaries.begin()->second, err);
  for (const auto& [_, d] : diaries) checked_mapping(a.mapping, d, err);
  total.parse_ms = ms_since(t0);

  t0 = Clock::now();
  std::vector<SceneGraph> scenes;
  for (const auto& p : plan)
    scenes.push_back(layout_tree(diaries.at(p.data), a.ego, p.period, spec, params));

  if (a.shared_norm && !spec.leaf_size.fixed_range) {
    // Second pass with one leaf-size range spanning every panel.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      std::set<std::string_view> drawn;
      for (const auto& l : scenes[i].leaves) drawn.insert(l.contact);
      for (const auto& c : diaries.at(plan[i].data).contacts) {
        if (!drawn.count(c.id)) continue;
        auto it = c.attributes.find(spec.leaf_size.source);
        if (it == c.attributes.end()) continue;
        if (auto v = numeric_value(it->second)) {
          lo = std::min(lo, *v);
          hi = std::max(hi, *v);
        }
      }
    }
    if (lo <= hi) {
      spec.leaf_size.fixed_range = {lo, hi};
      for (std::size_t i = 0; i < plan.size(); ++i)
        scenes[i] = layout_tree(diaries.at(plan[i].data), a.ego, plan[i].period, spec, params);
    }
  }
  total.layout_ms = ms_since(t0);

  t0 = Clock::now();
  std::vector<ScenePanel> views;
  std::vector<RunReport> reports;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    std::string caption = a.ego;
    if (a.data.size() > 1) caption = dataset_id_for(plan[i].data) + ": " + caption;
    if (plan[i].period) caption += " " + plan[i].period->label();
    views.push_back({&scenes[i], caption});
    reports.push_back(report_for(scenes[i]));
  }
  const auto svg = panels_to_svg(views);
  total.render_ms = ms_since(t0);

  write_file(a.out, svg);
  out << report_json(reports, total, {a.out});
  return kExitOk;
}

int cmd_validate(const std::string& data, std::ostream& out) {
  ValidationReport report;
  try {
    report = validate_diary(load_diary(data, false));
  } catch (const Error& e) {
    report.errors.push_back({"input", data, std::string(to_string(e.kind())), e.what()});
  }
  out << report_to_json(report);
  return report.ok() ? kExitOk : kExitData;
}

struct SynthArgs {
  std::uint64_t seed = 0;
  std::string profile = "default", out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SynthProfile profile;
  if (a.profile == "stress")
    profile = stress_profile();
  else if (a.profile != "default")
    profile = parse_synth_profile(read_file(a.profile));
  const Diary diary = generate_synthetic_diary(a.seed, profile);
  write_file(a.out, serialize_diary_json(diary));
  out << json{{"seed", a.seed},
              {"egos", diary.egos.size()},
              {"ties", diary.ties.size()},
              {"contacts", diary.contacts.size()},
              {"out", a.out}}
             .dump(2)
      << "\n";
  return kExitOk;
}

int cmd_presets(const std::optional<std::string>& name, std::ostream& out) {
  if (name) {
    out << serialize_mapping_json(preset_mapping(*name));
    return kExitOk;
  }
  out << json{{"presets", preset_names()}}.dump(2) << "\n";
  return kExitOk;
}

struct ServeArgs {
  std::vector<std::string> data;
  std::optional<int> port;
  std::string host = "127.0.0.1";
  std::optional<std::string> static_dir;
};

int cmd_serve(const ServeArgs& a, std::ostream& err) {
  ServeOptions opts;
  opts.host = a.host;
  opts.static_dir = a.static_dir;
  if (a.port) {
    opts.port = *a.port;
  } else if (const char* env = std::getenv("CONTACTTREES_PORT")) {
    try {
      opts.port = std::stoi(env);
    } catch (const std::exception&) {
      err << "error: CONTACTTREES_PORT='" << env << "' is not a port\n";
      return kExitUsage;
    }
  }
  if (opts.port < 0 || opts.port > 65535) {
    err << "error: port " << opts.port << " out of range\n";
    return kExitUsage;
  }
  LayoutService service;
  for (const auto& d : a.data) service.add_dataset(dataset_id_for(d), load_diary(d));
  HttpServer server(service, opts);
  int port = 0;
  try {
    port = server.bind();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << "listening on http://" << opts.host << ":" << port << "\n";
  server.listen();
  return kExitOk;
}

}  // namespace

std::string report_json(const std::vector<RunReport>& panels, const Timing& total,
                        const std::vector<std::string>& outputs) {
  json j;
  if (panels.size() == 1) {
    j = panel_json(panels[0]);
  } else {
    j["panels"] = json::array();
    for (const auto& p : panels) j["panels"].push_back(panel_json(p));
  }
  j["timing_ms"] = timing_json(total);
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Draw egocentric contact diaries as trees.", "contacttrees"};
  app.require_subcommand(1);

  RenderArgs ra;
  auto* render = app.add_subcommand("render", "Lay out and draw one ego's tree");
  render->add_option("--data", ra.data, "Diary JSON, CSV directory, or ties.csv,contacts.csv")
      ->required();
  render->add_option("--ego", ra.ego, "Ego id")->required();
  render->add_option("--mapping", ra.mapping, "Preset name or mapping JSON file");
  render->add_option("--params", ra.params, "Layout parameter JSON file");
  render->add_option("--period", ra.period, "2004, FROM..TO, ..TO or FROM..");
  render->add_option("--out", ra.out, "Output path")->required();
  render->add_option("--format", ra.format, "svg, json or both")
      ->check(CLI::IsMember({"svg", "json", "both"}));

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Draw 2-3 trees side by side at one scale");
  compare->add_option("--data", ca.data, "Diary source; repeat for one panel per dataset")
      ->required();
  compare->add_option("--period", ca.periods, "Period; repeat for one panel per period");
  compare->add_option("--ego", ca.ego, "Ego id")->required();
  compare->add_option("--mapping", ca.mapping, "Preset name or mapping JSON file");
  compare->add_option("--params", ca.params, "Layout parameter JSON file");
  compare->add_option("--out", ca.out, "Output SVG path")->required();
  compare->add_flag("--shared-norm", ca.shared_norm, "Normalize leaf size across all panels");

  std::string validate_data;
  auto* validate = app.add_subcommand("validate", "Check a diary and print the report");
  validate->add_option("--data", validate_data, "Diary source")->required();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic diary");
  synth->add_option("--seed", sa.seed, "Random seed")->required();
  synth->add_option("--profile", sa.profile, "default, stress, or a profile JSON file");
  synth->add_option("--out", sa.out, "Output diary JSON")->required();

  std::string stats_data;
  auto* stats = app.add_subcommand("stats", "Print per-ego summary statistics");
  stats->add_option("--data", stats_data, "Diary source")->required();

  std::optional<std::string> preset_name;
  auto* presets = app.add_subcommand("presets", "List mapping presets or print one");
  presets->add_option("--name", preset_name, "Preset to print as JSON");

  ServeArgs va;
  auto* serve = app.add_subcommand("serve", "Serve the layout API over HTTP");
  serve->add_option("--data", va.data, "Diary source; repeatable")->required();
  serve->add_option("--port", va.port, "Port (default: CONTACTTREES_PORT or 8080)");
  serve->add_option("--host", va.host, "Bind address");
  serve->add_option("--static", va.static_dir, "Directory served at /")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*render) return cmd_render(ra, out, err);
    if (*compare) return cmd_compare(ca, out, err);
    if (*validate) return cmd_validate(validate_data, out);
    if (*synth) return cmd_synth(sa, out);
    if (*stats) {
      out << stats_to_json(diary_stats(load_diary(stats_data)));
      return kExitOk;
    }
    if (*presets) return cmd_presets(preset_name, out);
    if (*serve) return cmd_serve(va, err);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace contacttrees::cli
