#include "autometric/architecture.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "autometric/error.hpp"

namespace autometric {

double EvaluationTrace::stage(std::string_view name) const {
  for (const auto& s : stages)
    if (s.stage == name) return s.value;
  throw LookupError(fmt::format("trace has no stage '{}'", name));
}

namespace {

std::size_t index_of_stage(const std::vector<Stage>& stages, std::string_view name) {
  for (std::size_t i = 0; i < stages.size(); ++i)
    if (stages[i].name() == name) return i;
  return stages.size();
}

// Kahn's algorithm, ready stages taken in declaration order. Returns fewer
// than stages.size() indices when there is a cycle.
std::vector<std::size_t> topological_order(const std::vector<Stage>& stages) {
  const std::size_t n = stages.size();
  std::vector<std::vector<std::size_t>> deps(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [input, source] : stages[i].wiring)
      if (source.kind == Source::Kind::stage) {
        const auto j = index_of_stage(stages, source.name);
        if (j < n && j != i) deps[i].push_back(j);
      }
  std::vector<bool> done(n, false);
  std::vector<std::size_t> order;
  bool progressed = true;
  while (order.size() < n && progressed) {
    progressed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (std::all_of(deps[i].begin(), deps[i].end(), [&](std::size_t j) { return done[j]; })) {
        done[i] = true;
        order.push_back(i);
        progressed = true;
        break;
      }
    }
  }
  return order;
}

}  // namespace

std::vector<std::string> validate_architecture(const std::vector<std::string>& sensors,
                                               const std::vector<Stage>& stages) {
  std::vector<std::string> out;
  std::set<std::string_view> sensor_names;
  for (const auto& s : sensors) {
    if (s.empty()) out.push_back("sensor channel with an empty name");
    if (!sensor_names.insert(s).second) out.push_back(fmt::format("duplicate sensor channel '{}'", s));
  }
  if (stages.empty()) {
    out.push_back("architecture has no stages");
    return out;
  }

  std::set<std::string_view> stage_names;
  std::set<std::string_view> consumed;
  for (const auto& stage : stages) {
    if (!stage_names.insert(stage.name()).second) out.push_back(fmt::format("duplicate stage '{}'", stage.name()));
    for (auto v : validate_system(stage.system)) out.push_back(fmt::format("stage '{}': {}", stage.name(), v));

    for (const auto& input : stage.system.inputs)
      if (!stage.wiring.contains(input.name))
        out.push_back(fmt::format("stage '{}': input '{}' is not wired", stage.name(), input.name));
    for (const auto& [input, source] : stage.wiring) {
      if (stage.system.find_input(input) == nullptr)
        out.push_back(fmt::format("stage '{}': wiring names unknown input '{}'", stage.name(), input));
      if (source.kind == Source::Kind::sensor) {
        if (!sensor_names.contains(source.name))
          out.push_back(fmt::format("stage '{}': input '{}' reads unknown sensor '{}'", stage.name(), input, source.name));
      } else {
        consumed.insert(source.name);
        if (source.name == stage.name())
          out.push_back(fmt::format("stage '{}': input '{}' reads its own output", stage.name(), input));
        else if (index_of_stage(stages, source.name) == stages.size())
          out.push_back(fmt::format("stage '{}': input '{}' reads unknown stage '{}'", stage.name(), input, source.name));
      }
    }
  }

  if (topological_order(stages).size() != stages.size()) out.push_back("stage wiring contains a cycle");

  std::vector<std::string_view> terminals;
  for (const auto& stage : stages)
    if (!consumed.contains(stage.name())) terminals.push_back(stage.name());
  if (terminals.size() != 1)
    out.push_back(fmt::format("expected exactly one terminal stage, found {}", terminals.size()));
  return out;
}

EthicsArchitecture::EthicsArchitecture(std::string name, std::vector<std::string> sensors, std::vector<Stage> stages)
    : name_(std::move(name)), sensors_(std::move(sensors)) {
  if (auto v = validate_architecture(sensors_, stages); !v.empty()) throw ValidationError(std::move(v));

  // With a single sink every stage reaches it, so the terminal sorts last.
  for (auto i : topological_order(stages)) stages_.push_back(std::move(stages[i]));

  for (const auto& stage : stages_) {
    engines_.emplace_back(stage.system);
    std::vector<Feed> feeds;
    for (const auto& input : stage.system.inputs) {
      const auto& source = stage.wiring.find(input.name)->second;
      if (source.kind == Source::Kind::sensor) {
        auto it = std::find(sensors_.begin(), sensors_.end(), source.name);
        feeds.push_back({Source::Kind::sensor, static_cast<std::size_t>(it - sensors_.begin())});
      } else {
        feeds.push_back({Source::Kind::stage, index_of_stage(stages_, source.name)});
      }
    }
    feeds_.push_back(std::move(feeds));
  }
}

EthicsArchitecture EthicsArchitecture::with_grid_points(std::size_t points) const {
  auto stages = stages_;
  for (auto& stage : stages) stage.system.grid_points = points;
  return {name_, sensors_, std::move(stages)};
}

EvaluationTrace EthicsArchitecture::evaluate(std::span<const double> sensors) const {
  if (sensors.size() != sensors_.size())
    throw Error(fmt::format("architecture '{}' expects {} sensor values, got {}", name_, sensors_.size(), sensors.size()));
  EvaluationTrace trace;
  for (std::size_t i = 0; i < sensors_.size(); ++i) trace.sensors.emplace(sensors_[i], sensors[i]);

  std::vector<double> outputs(stages_.size(), 0.0);
  std::vector<double> inputs;
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    inputs.clear();
    // Stages are topologically sorted, so every upstream output is ready.
    for (const auto& feed : feeds_[s])
      inputs.push_back(feed.kind == Source::Kind::sensor ? sensors[feed.index] : outputs[feed.index]);
    const auto crisp = engines_[s].infer(inputs);
    outputs[s] = crisp.value;
    trace.stages.push_back({stages_[s].name(), crisp.value, crisp.no_firing});
  }
  trace.final = outputs.back();
  return trace;
}

EvaluationTrace EthicsArchitecture::evaluate(const ValueMap& sensors) const {
  std::vector<double> ordered;
  ordered.reserve(sensors_.size());
  for (const auto& channel : sensors_) {
    auto it = sensors.find(channel);
    if (it == sensors.end()) throw LookupError(fmt::format("architecture '{}': missing sensor '{}'", name_, channel));
    ordered.push_back(it->second);
  }
  return evaluate(ordered);
}

namespace {

using MF = MembershipFunction;

FuzzyVariable risk_variable(std::string name, double lo, double hi, std::string low_label, MF low,
                            std::string high_label, MF high) {
  return {std::move(name), lo, hi, {{std::move(low_label), low}, {std::move(high_label), high}}};
}

Rule rule(std::string name, std::vector<Clause> antecedents, Clause consequent) {
  return {std::move(name), std::move(antecedents), std::move(consequent)};
}

std::vector<FuzzyVariable> takeover_sensors(const MF& speed_high) {
  return {
      risk_variable("distance", 1, 10, "lowrisk", MF::trapezoid(0, 0, 5, 6), "highrisk", MF::trapezoid(5, 6, 10, 10)),
      risk_variable("lane", 1, 10, "lowrisk", MF::trapezoid(0, 0, 8, 9), "highrisk", MF::trapezoid(7, 8, 10, 10)),
      risk_variable("speed", 1, 100, "lowrisk", MF::trapezoid(0, 0, 40, 80), "highrisk", speed_high),
  };
}

std::vector<Clause> all_sensors(const std::string& label) {
  return {{"distance", label}, {"lane", label}, {"speed", label}};
}

std::map<std::string, Source, std::less<>> wire_sensors(std::initializer_list<std::string> names) {
  std::map<std::string, Source, std::less<>> wiring;
  for (const auto& n : names) wiring.emplace(n, Source::sensor(n));
  return wiring;
}

}  // namespace

EthicsArchitecture build_takeover_architecture(std::size_t grid_points) {
  Stage rightwrong;
  rightwrong.system = {
      "rightwrong",
      takeover_sensors(MF::trapezoid(40, 80, 100, 100)),
      {"tcrightwrong", 1, 10, {{"tcwrong", MF::z_spline(7, 10)}, {"tcright", MF::s_spline(4, 7)}}},
      {rule("RWP1", all_sensors("lowrisk"), {"tcrightwrong", "tcwrong"}),
       rule("RWP2", all_sensors("highrisk"), {"tcrightwrong", "tcright"})},
      grid_points};
  rightwrong.wiring = wire_sensors({"distance", "lane", "speed"});

  Stage goodbad;
  goodbad.system = {
      "goodbad",
      // The tabled "[40, 80, 100, 10]" is a truncated [40, 80, 100, 100].
      takeover_sensors(MF::trapezoid(40, 80, 100, 100)),
      {"tcgoodbad", 1, 10, {{"tcbad", MF::z_spline(4, 8)}, {"tcgood", MF::s_spline(2, 6)}}},
      {rule("GBP1", all_sensors("lowrisk"), {"tcgoodbad", "tcbad"}),
       rule("GBP2", all_sensors("highrisk"), {"tcgoodbad", "tcgood"})},
      grid_points};
  goodbad.wiring = wire_sensors({"distance", "lane", "speed"});

  Stage vmec;
  vmec.system = {
      "vmec",
      {risk_variable("tcrw", 1, 10, "rwdtc", MF::z_spline(1, 10), "rwtc", MF::s_spline(1, 10)),
       risk_variable("tcgb", 1, 10, "gbdtc", MF::trapezoid(0, 0, 5, 6), "gbtc", MF::trapezoid(5, 6, 10, 10))},
      {"control", 1, 10, {{"vcno", MF::z_spline(5.5, 10)}, {"vcyes", MF::s_spline(1, 5.5)}}},
      {rule("VMP1", {{"tcrw", "rwtc"}, {"tcgb", "gbtc"}}, {"control", "vcyes"}),
       rule("VMP2", {{"tcrw", "rwdtc"}, {"tcgb", "gbdtc"}}, {"control", "vcno"})},
      grid_points};
  vmec.wiring = {{"tcrw", Source::stage("rightwrong")}, {"tcgb", Source::stage("goodbad")}};

  return {"takeover", {"distance", "lane", "speed"}, {std::move(rightwrong), std::move(goodbad), std::move(vmec)}};
}

EthicsArchitecture build_dilemma_architecture(std::size_t grid_points) {
  const auto low_death = MF::trapezoid(0, 0, 2, 3);
  const auto high_death = MF::trapezoid(2, 3, 10, 10);

  Stage rightwrong;
  rightwrong.system = {
      "rightwrong",
      {risk_variable("straight", 1, 10, "lowriskdeath", low_death, "highriskdeath", high_death),
       risk_variable("swerve", 1, 10, "lowriskdeath", low_death, "highriskdeath", high_death)},
      {"swerverightwrong", 1, 10, {{"swervewrong", MF::z_spline(5, 6)}, {"swerveright", MF::s_spline(5, 6)}}},
      {rule("RWDP1", {{"straight", "highriskdeath"}, {"swerve", "lowriskdeath"}}, {"swerverightwrong", "swerveright"}),
       rule("RWDP2", {{"straight", "lowriskdeath"}, {"swerve", "highriskdeath"}}, {"swerverightwrong", "swervewrong"})},
      grid_points};
  rightwrong.wiring = wire_sensors({"straight", "swerve"});

  Stage goodbad;
  goodbad.system = {
      "goodbad",
      {risk_variable("pedestrian", 1, 10, "young", MF::trapezoid(0, 0, 2, 3), "notyoung", MF::trapezoid(2, 5, 10, 10))},
      {"avoid", 1, 10, {{"avoidbad", MF::z_spline(4, 8)}, {"avoidgood", MF::s_spline(2, 6)}}},
      {rule("GBDP1", {{"pedestrian", "young"}}, {"avoid", "avoidgood"}),
       rule("GBDP2", {{"pedestrian", "notyoung"}}, {"avoid", "avoidbad"})},
      grid_points};
  goodbad.wiring = wire_sensors({"pedestrian"});

  Stage dilemma;
  dilemma.system = {
      "dilemma",
      {risk_variable("deathrisk", 1, 10, "riskdeathlow", MF::generalized_bell(4.5, 3, 1), "riskdeathhigh",
                     MF::generalized_bell(4.5, 2.5, 10)),
       risk_variable("pedestrianrisk", 1, 10, "avoidbad", MF::generalized_bell(5, 2.5, 0), "avoidgood",
                     MF::generalized_bell(5, 2.5, 10))},
      {"dilemmadecision", 1, 10, {{"straight_ahead", MF::gaussian(1, 3)}, {"swerve", MF::gaussian(1, 7)}}},
      {rule("EDCP1", {{"deathrisk", "riskdeathhigh"}, {"pedestrianrisk", "avoidgood"}}, {"dilemmadecision", "swerve"}),
       rule("EDCP2", {{"deathrisk", "riskdeathlow"}, {"pedestrianrisk", "avoidbad"}},
            {"dilemmadecision", "straight_ahead"})},
      grid_points};
  dilemma.wiring = {{"deathrisk", Source::stage("rightwrong")}, {"pedestrianrisk", Source::stage("goodbad")}};

  return {"dilemma", {"straight", "swerve", "pedestrian"}, {std::move(rightwrong), std::move(goodbad), std::move(dilemma)}};
}

VirtuousClass classify_takeover(double vmec_out) noexcept {
  if (vmec_out < 5.0) return VirtuousClass::class0;
  if (vmec_out < 6.0) return VirtuousClass::class1;
  return VirtuousClass::class2;
}

int class_index(VirtuousClass cls) noexcept { return static_cast<int>(cls); }

std::string class_label(VirtuousClass cls) { return std::to_string(class_index(cls)); }

std::string_view to_string(ControlState state) noexcept { return state == ControlState::human ? "human" : "iav"; }

ControlState control_transition(ControlState state, VirtuousClass cls) noexcept {
  if (state == ControlState::human && cls == VirtuousClass::class2) return ControlState::iav;
  if (state == ControlState::iav && cls == VirtuousClass::class0) return ControlState::human;
  return state;
}

}  // namespace autometric
