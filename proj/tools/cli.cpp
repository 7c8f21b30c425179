#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "autometric/autometric.hpp"
#include "manifest.hpp"

namespace autometric::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};

std::optional<std::size_t> grid_points_from_env() {
  const char* raw = std::getenv("AUTOMETRIC_GRID_POINTS");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(raw, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || raw[pos] != '\0' || v < kMinGridPoints)
    throw UsageError(fmt::format("AUTOMETRIC_GRID_POINTS must be an integer >= {}, got '{}'", kMinGridPoints, raw));
  return static_cast<std::size_t>(v);
}

bool is_builtin(std::string_view ref) { return ref == "takeover" || ref == "dilemma"; }

EthicsArchitecture load_ref(const std::string& ref, std::optional<std::size_t> grid_points) {
  const std::size_t grid = grid_points.value_or(kDefaultGridPoints);
  if (ref == "takeover") return build_takeover_architecture(grid);
  if (ref == "dilemma") return build_dilemma_architecture(grid);
  auto arch = load_architecture(ref);
  return grid_points ? arch.with_grid_points(*grid_points) : arch;
}

Labeling default_labeling(const EthicsArchitecture& arch) {
  if (arch.name() == "takeover") return Labeling::takeover;
  if (arch.name() == "dilemma") return Labeling::dilemma;
  return Labeling::none;
}

// name=value pairs from repeated options.
std::map<std::string, double, std::less<>> parse_assignments(const std::vector<std::string>& items, std::string_view flag) {
  std::map<std::string, double, std::less<>> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError(fmt::format("{} expects CHANNEL=VALUE, got '{}'", flag, item));
    try {
      std::size_t pos = 0;
      const std::string value = item.substr(eq + 1);
      const double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
      out[item.substr(0, eq)] = v;
    } catch (const std::exception&) {
      throw UsageError(fmt::format("{}: '{}' is not a number", flag, item.substr(eq + 1)));
    }
  }
  return out;
}

SimulationSchedule default_schedule(const EthicsArchitecture& arch, Waveform wave, std::size_t steps) {
  // Configs reusing a builtin name only get its schedule if the channels match.
  if (arch.name() == "takeover")
    if (auto s = canonical_takeover_schedule(wave, steps); s.violations(arch.sensors()).empty()) return s;
  if (arch.name() == "dilemma")
    if (auto s = canonical_dilemma_schedule(wave, steps); s.violations(arch.sensors()).empty()) return s;
  // Other architectures sweep each sensor once over the range of the first
  // input that reads it.
  SimulationSchedule s;
  s.duration = 10.0;
  s.steps = steps;
  auto sensor_range = [&](const std::string& channel) -> std::pair<double, double> {
    for (const auto& stage : arch.stages())
      for (const auto& in : stage.system.inputs) {
        const auto& src = stage.wiring.find(in.name)->second;
        if (src.kind == Source::Kind::sensor && src.name == channel) return {in.lo, in.hi};
      }
    return {0.0, 1.0};
  };
  for (const auto& channel : arch.sensors()) {
    const auto [lo, hi] = sensor_range(channel);
    s.generators.emplace(channel, SignalGenerator{wave, lo, hi, 1.0, s.duration});
  }
  return s;
}

std::size_t default_steps(std::string_view arch_name) { return arch_name == "dilemma" ? 26 : 308; }

struct Labelled {
  LabeledDataset dataset;
  std::optional<double> median;
};

Labelled apply_labeling(LabeledDataset ds, Labeling labeling) {
  switch (labeling) {
    case Labeling::takeover: return {label_takeover(std::move(ds)), std::nullopt};
    case Labeling::dilemma: {
      auto [labelled, cut] = label_dilemma(std::move(ds));
      return {std::move(labelled), cut};
    }
    case Labeling::none: break;
  }
  return {std::move(ds), std::nullopt};
}

std::string take_class_note(VirtuousClass cls) {
  switch (cls) {
    case VirtuousClass::class0: return "do not take control";
    case VirtuousClass::class1: return "grey state";
    case VirtuousClass::class2: return "take control";
  }
  return {};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  f << text;
  if (!f) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

const std::vector<std::string> kTakeoverColumns{"time", "distance", "lane", "speed", "rightwrong_out",
                                                "goodbad_out", "vmec_out", "class"};

// --- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string arch;
  std::map<std::string, double> named;
  std::vector<std::string> sensors;
  bool json = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto arch = load_ref(a.arch, grid_points_from_env());
  ValueMap values;
  for (const auto& [k, v] : a.named) values[k] = v;
  for (const auto& [k, v] : parse_assignments(a.sensors, "--sensor")) values[k] = v;
  std::vector<std::string> missing;
  for (const auto& ch : arch.sensors())
    if (!values.contains(ch)) missing.push_back(ch);
  if (!missing.empty())
    throw UsageError(fmt::format("missing sensor value(s): {} (use --{} or --sensor NAME=VALUE)", fmt::join(missing, ", "),
                                 missing.front()));
  for (const auto& [k, v] : values)
    if (std::find(arch.sensors().begin(), arch.sensors().end(), k) == arch.sensors().end())
      throw UsageError(fmt::format("architecture '{}' has no sensor '{}'", arch.name(), k));

  const auto trace = arch.evaluate(values);
  const bool takeover = arch.name() == "takeover";
  if (a.json) {
    nlohmann::ordered_json j;
    j["architecture"] = arch.name();
    j["sensors"] = nlohmann::ordered_json::object();
    for (const auto& ch : arch.sensors()) j["sensors"][ch] = trace.sensors.at(ch);
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : trace.stages) j["stages"].push_back({{"name", s.stage}, {"value", s.value}, {"no_firing", s.no_firing}});
    j["final"] = trace.final;
    if (takeover) j["class"] = class_index(classify_takeover(trace.final));
    out << j.dump(2) << '\n';
    return kOk;
  }
  fmt::print(out, "architecture {}\n", arch.name());
  for (const auto& ch : arch.sensors()) fmt::print(out, "  sensor {:<12} {:.6g}\n", ch, trace.sensors.at(ch));
  for (const auto& s : trace.stages)
    fmt::print(out, "  stage  {:<12} {:.6f}{}\n", s.stage, s.value, s.no_firing ? "  (no rule fired; midpoint)" : "");
  fmt::print(out, "final {:.6f}\n", trace.final);
  if (takeover) {
    const auto cls = classify_takeover(trace.final);
    fmt::print(out, "class {} ({})\n", class_index(cls), take_class_note(cls));
  }
  return kOk;
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string arch;
  std::string replay;
  std::optional<std::size_t> steps;
  std::string waveform = "triangle";
  std::optional<double> duration;
  std::vector<std::string> cycles, mins, maxs;
  std::string labeling;
  std::string out;
  std::string manifest;
  std::string plot_data;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  RunManifest m;
  if (!a.replay.empty()) {
    m = manifest_from_json(read_text_file(a.replay));
  } else {
    if (a.arch.empty()) throw UsageError("simulate needs an architecture or --replay MANIFEST");
    const auto wave = parse_waveform(a.waveform);
    if (!wave) throw UsageError(fmt::format("unknown waveform '{}' (triangle, sawtooth, sine)", a.waveform));
    m.architecture = a.arch;
    m.grid_points = grid_points_from_env();
    const auto probe = load_ref(a.arch, m.grid_points);
    m.schedule = default_schedule(probe, *wave, a.steps.value_or(default_steps(probe.name())));
    if (a.duration) {
      m.schedule.duration = *a.duration;
      for (auto& [ch, g] : m.schedule.generators) g.duration = *a.duration;
    }
    auto apply = [&](const std::vector<std::string>& items, std::string_view flag, double SignalGenerator::*field) {
      for (const auto& [ch, v] : parse_assignments(items, flag)) {
        auto it = m.schedule.generators.find(ch);
        if (it == m.schedule.generators.end()) throw UsageError(fmt::format("{}: no sensor channel '{}'", flag, ch));
        it->second.*field = v;
      }
    };
    apply(a.cycles, "--cycles", &SignalGenerator::cycles);
    apply(a.mins, "--min", &SignalGenerator::min);
    apply(a.maxs, "--max", &SignalGenerator::max);
    if (!a.labeling.empty()) {
      const auto l = parse_labeling(a.labeling);
      if (!l) throw UsageError(fmt::format("unknown labeling '{}' (takeover, dilemma, none)", a.labeling));
      m.labeling = *l;
    } else {
      m.labeling = default_labeling(probe);
    }
  }
  m.tool_version = kVersion;
  if (!a.out.empty()) m.csv_path = a.out;
  if (m.csv_path.empty()) m.csv_path = fmt::format("{}.csv", std::filesystem::path(m.architecture).stem().string());
  if (!a.plot_data.empty()) m.plot_data_path = a.plot_data;

  const auto arch = load_ref(m.architecture, m.grid_points);
  auto [ds, cut] = apply_labeling(run_simulation(arch, m.schedule), m.labeling);
  const auto rows = export_csv(ds, std::filesystem::path(m.csv_path));
  if (!m.plot_data_path.empty()) {
    std::ostringstream plot;
    export_plot_data(ds, plot, {{"speed", 0.1}});
    write_file(m.plot_data_path, plot.str());
  }
  const std::string manifest_path = a.manifest.empty() ? m.csv_path + ".manifest.json" : a.manifest;
  write_file(manifest_path, manifest_to_json(m));

  fmt::print(out, "wrote {} rows to {}\n", rows, m.csv_path);
  fmt::print(out, "manifest {}\n", manifest_path);
  if (cut) fmt::print(out, "median cut {:.4f}\n", *cut);
  out << render_text(summarize(ds));
  return kOk;
}

// --- induce ---------------------------------------------------------------

struct InduceArgs {
  std::string csv;
  std::vector<std::string> features;
  std::size_t min_covered = kDefaultMinCovered;
  std::optional<std::size_t> kfold;
  std::uint64_t seed = 1;
  std::string rules_json;
  std::vector<std::string> display_scale;
};

int cmd_induce(const InduceArgs& a, std::ostream& out) {
  const auto ds = read_csv(std::filesystem::path(a.csv));
  if (ds.empty()) throw ValidationError({"dataset has no rows"});
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    if (ds.rows[i].label.empty()) throw ValidationError({fmt::format("row {} has no class label", i + 1)});
  const auto features = a.features.empty() ? ds.feature_names() : a.features;
  const auto examples = examples_from(ds, features);
  const auto model = train(examples, features);
  const double acc = accuracy(model, examples);
  const auto correct = static_cast<std::size_t>(std::lround(acc * static_cast<double>(examples.size())));

  fmt::print(out, "features {}\n", fmt::join(features, ", "));
  fmt::print(out, "exemplars {}\n", model.exemplars().size());
  fmt::print(out, "resubstitution accuracy {:.2f}% ({}/{})\n", 100.0 * acc, correct, examples.size());
  const auto rules = extract_rules(model, a.min_covered);
  fmt::print(out, "rules covering at least {} examples: {}\n", a.min_covered, rules.size());
  // Pedestrian readings are age / 10; print them in years unless told otherwise.
  DisplayScale scale;
  if (std::find(features.begin(), features.end(), "pedestrian") != features.end()) scale["pedestrian"] = 10.0;
  for (const auto& [f, v] : parse_assignments(a.display_scale, "--display-scale")) scale[f] = v;
  for (auto it = scale.begin(); it != scale.end();) it = it->second == 1.0 ? scale.erase(it) : std::next(it);
  out << render_rules_text(rules, scale);
  if (!a.rules_json.empty()) write_file(a.rules_json, render_rules_json(rules) + "\n");
  if (a.kfold) {
    const auto cv = kfold_eval(examples, features, *a.kfold, a.seed);
    fmt::print(out, "{}-fold cross-validation (seed {})\n", *a.kfold, a.seed);
    for (std::size_t f = 0; f < cv.fold_accuracy.size(); ++f) fmt::print(out, "  fold {:>2} {:.2f}%\n", f + 1, 100.0 * cv.fold_accuracy[f]);
    fmt::print(out, "  mean    {:.2f}%\n", 100.0 * cv.mean_accuracy);
  }
  return kOk;
}

// --- analyze --------------------------------------------------------------

struct AnalyzeArgs {
  std::string csv;
  std::string plot_data;
  std::string json;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const auto ds = read_csv(std::filesystem::path(a.csv));
  if (ds.columns() != kTakeoverColumns)
    throw ValidationError({fmt::format("analyze expects the takeover schema {}, got {}", fmt::join(kTakeoverColumns, ","),
                                       fmt::join(ds.columns(), ","))});
  if (ds.empty()) throw ValidationError({"dataset has no rows"});

  const auto vmec = ds.finals();
  const double d_rw = stream_sq_distance(vmec, ds.column("rightwrong_out"));
  const double d_gb = stream_sq_distance(vmec, ds.column("goodbad_out"));
  fmt::print(out, "stream proximity (squared Euclidean)\n");
  fmt::print(out, "  d(vmec, rightwrong) {:.4f}\n  d(vmec, goodbad)    {:.4f}\n", d_rw, d_gb);
  fmt::print(out, "  vmec is closer to {}\n", d_rw < d_gb ? "rightwrong" : d_gb < d_rw ? "goodbad" : "neither (tie)");

  const std::vector<std::string> regressors{"distance", "lane", "speed", "rightwrong_out", "goodbad_out"};
  nlohmann::ordered_json report;
  report["proximity"] = {{"vmec_rightwrong", d_rw}, {"vmec_goodbad", d_gb}};
  fmt::print(out, "linear regression of vmec_out\n");
  if (ds.size() <= regressors.size() + 1) {
    fmt::print(out, "  skipped: {} rows is too few for {} regressors\n", ds.size(), regressors.size());
    report["regression"] = nullptr;
  } else {
    std::vector<std::vector<double>> cols;
    for (const auto& r : regressors) cols.push_back(ds.column(r));
    try {
      const auto fit = ols_fit(regressors, cols, vmec);
      std::istringstream lines(render_text(fit));
      for (std::string line; std::getline(lines, line);) out << "  " << line << '\n';
      report["regression"] = nlohmann::ordered_json::parse(render_json(fit));
    } catch (const Error& e) {
      fmt::print(out, "  skipped: {}\n", e.what());
      report["regression"] = nullptr;
    }
  }

  const auto summary = summarize(ds);
  fmt::print(out, "summary\n");
  std::istringstream lines(render_text(summary));
  for (std::string line; std::getline(lines, line);) out << "  " << line << '\n';
  report["summary"] = nlohmann::ordered_json::parse(render_json(summary));

  const std::string plot_path = a.plot_data.empty() ? a.csv + ".plot.csv" : a.plot_data;
  std::ostringstream plot;
  export_plot_data(ds, plot, {{"speed", 0.1}});
  write_file(plot_path, plot.str());
  fmt::print(out, "plot data {}\n", plot_path);
  if (!a.json.empty()) write_file(a.json, report.dump(2) + "\n");
  return kOk;
}

// --- validate / export-config --------------------------------------------

int cmd_validate(const std::string& ref, std::ostream& out) {
  std::vector<std::string> problems;
  if (is_builtin(ref)) {
    const auto arch = load_ref(ref, std::nullopt);
    problems = validate_config(architecture_to_json(arch));
  } else {
    problems = validate_config(read_text_file(ref));
  }
  if (problems.empty()) {
    fmt::print(out, "{}: ok\n", ref);
    return kOk;
  }
  fmt::print(out, "{}: {} problem(s)\n", ref, problems.size());
  for (const auto& p : problems) fmt::print(out, "  - {}\n", p);
  return kValidation;
}

int cmd_export_config(const std::string& ref, const std::string& path, std::ostream& out) {
  const auto text = architecture_to_json(load_ref(ref, grid_points_from_env()));
  if (path.empty()) out << text;
  else write_file(path, text);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fuzzy ethics architectures: evaluate, simulate, induce interval rules, analyze streams"};
  app.name("autometric");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate an architecture at one sensor reading");
  eval_cmd->add_option("arch", eval.arch, "takeover | dilemma | config.json")->required();
  for (const char* ch : {"distance", "lane", "speed", "straight", "swerve", "pedestrian"})
    eval_cmd->add_option_function<double>(std::string("--") + ch, [&eval, ch](double v) { eval.named[ch] = v; },
                                          std::string(ch) + " sensor value");
  eval_cmd->add_option("-s,--sensor", eval.sensors, "Sensor value as NAME=VALUE (repeatable)");
  eval_cmd->add_flag("--json", eval.json, "Print the trace as JSON");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a fixed-step simulation and write a labelled CSV");
  sim_cmd->add_option("arch", sim.arch, "takeover | dilemma | config.json");
  sim_cmd->add_option("--replay", sim.replay, "Re-run the schedule recorded in a manifest");
  sim_cmd->add_option("--steps", sim.steps, "Number of samples (default 308 takeover, 26 dilemma)")->check(CLI::Range(2, 100000000));
  sim_cmd->add_option("--waveform", sim.waveform, "triangle | sawtooth | sine")->capture_default_str();
  sim_cmd->add_option("--duration", sim.duration, "Simulated time units (default 10)");
  sim_cmd->add_option("--cycles", sim.cycles, "Per-channel cycles as CHANNEL=VALUE (repeatable)");
  sim_cmd->add_option("--min", sim.mins, "Per-channel minimum as CHANNEL=VALUE (repeatable)");
  sim_cmd->add_option("--max", sim.maxs, "Per-channel maximum as CHANNEL=VALUE (repeatable)");
  sim_cmd->add_option("--labeling", sim.labeling, "takeover | dilemma | none (default from the architecture)");
  sim_cmd->add_option("-o,--out", sim.out, "CSV output path (default <arch>.csv)");
  sim_cmd->add_option("--manifest", sim.manifest, "Manifest path (default <out>.manifest.json)");
  sim_cmd->add_option("--plot-data", sim.plot_data, "Also write plot data (speed scaled by 0.1)");

  InduceArgs ind;
  auto* ind_cmd = app.add_subcommand("induce", "Learn NNge interval rules from a labelled CSV");
  ind_cmd->add_option("csv", ind.csv, "Simulation CSV")->required();
  ind_cmd->add_option("--features", ind.features, "Feature columns (default: sensors and non-final stage outputs)")
      ->delimiter(',');
  ind_cmd->add_option("--min-covered", ind.min_covered, "Only report rules covering at least this many rows")
      ->capture_default_str();
  ind_cmd->add_option("--kfold", ind.kfold, "Also run K-fold cross-validation")->check(CLI::Range(2, 1000000));
  ind_cmd->add_option("--seed", ind.seed, "Shuffle seed for cross-validation")->capture_default_str();
  ind_cmd->add_option("--rules-json", ind.rules_json, "Write the rules as JSON (always in sensor units)");
  ind_cmd->add_option("--display-scale", ind.display_scale,
                      "Multiply a feature for rule text as FEATURE=FACTOR (default pedestrian=10)");

  AnalyzeArgs ana;
  auto* ana_cmd = app.add_subcommand("analyze", "Stream proximity, regression and class summary of a takeover CSV");
  ana_cmd->add_option("csv", ana.csv, "Takeover simulation CSV")->required();
  ana_cmd->add_option("--plot-data", ana.plot_data, "Plot data path (default <csv>.plot.csv)");
  ana_cmd->add_option("--json", ana.json, "Write the report as JSON");

  std::string validate_ref;
  auto* val_cmd = app.add_subcommand("validate", "Check an architecture config");
  val_cmd->add_option("arch", validate_ref, "takeover | dilemma | config.json")->required();

  std::string export_ref;
  std::string export_out;
  auto* exp_cmd = app.add_subcommand("export-config", "Write an architecture as JSON config");
  exp_cmd->add_option("arch", export_ref, "takeover | dilemma | config.json")->required();
  exp_cmd->add_option("-o,--out", export_out, "Output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    if (sim_cmd->parsed()) return cmd_simulate(sim, out);
    if (ind_cmd->parsed()) return cmd_induce(ind, out);
    if (ana_cmd->parsed()) return cmd_analyze(ana, out);
    if (val_cmd->parsed()) return cmd_validate(validate_ref, out);
    if (exp_cmd->parsed()) return cmd_export_config(export_ref, export_out, out);
  } catch (const UsageError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const IoError& e) {
    fmt::print(err, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const ParseError& e) {
    fmt::print(err, "parse error: {}\n", e.what());
    return kValidation;
  } catch (const ValidationError& e) {
    fmt::print(err, "{}\n", e.what());
    return kValidation;
  } catch (const TrainingError& e) {
    fmt::print(err, "training error: {}\n", e.what());
    return kValidation;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kValidation;
  }
  return kUsage;
}

}  // namespace autometric::cli
