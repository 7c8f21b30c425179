#include "autometric/config.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "autometric/error.hpp"

namespace autometric {

using json = nlohmann::ordered_json;

namespace {

json variable_to_json(const FuzzyVariable& var) {
  json terms = json::array();
  for (const auto& t : var.terms) {
    const auto p = t.mf.params();
    terms.push_back({{"label", t.label}, {"shape", std::string(shape_name(t.mf.shape()))}, {"params", std::vector<double>(p.begin(), p.end())}});
  }
  return {{"name", var.name}, {"range", {var.lo, var.hi}}, {"terms", terms}};
}

json source_to_json(const Source& s) {
  return {{s.kind == Source::Kind::sensor ? "sensor" : "stage", s.name}};
}

// Shape errors are collected rather than thrown so that `validate` can list
// everything wrong with a document in one pass.
class Reader {
 public:
  std::vector<std::string> problems;

  const json* field(const json& obj, const char* key, std::string_view where) {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(fmt::format("{}: missing '{}'", where, key));
      return nullptr;
    }
    return &obj.at(key);
  }

  std::string string(const json& obj, const char* key, std::string_view where) {
    const auto* f = field(obj, key, where);
    if (f == nullptr) return {};
    if (!f->is_string()) {
      problems.push_back(fmt::format("{}: '{}' must be a string", where, key));
      return {};
    }
    return f->get<std::string>();
  }

  std::vector<double> numbers(const json& value, std::string_view where) {
    std::vector<double> out;
    if (!value.is_array()) {
      problems.push_back(fmt::format("{}: expected an array of numbers", where));
      return out;
    }
    for (const auto& v : value) {
      if (!v.is_number()) {
        problems.push_back(fmt::format("{}: expected an array of numbers", where));
        return {};
      }
      out.push_back(v.get<double>());
    }
    return out;
  }

  FuzzyVariable variable(const json& obj, std::string_view where) {
    FuzzyVariable var;
    var.name = string(obj, "name", where);
    const std::string here = fmt::format("{} '{}'", where, var.name);
    if (const auto* r = field(obj, "range", here)) {
      auto range = numbers(*r, here + " range");
      if (range.size() == 2) {
        var.lo = range[0];
        var.hi = range[1];
      } else if (!range.empty()) {
        problems.push_back(fmt::format("{}: range needs exactly two numbers", here));
      }
    }
    if (const auto* terms = field(obj, "terms", here)) {
      if (!terms->is_array()) problems.push_back(fmt::format("{}: 'terms' must be an array", here));
      else
        for (const auto& t : *terms) {
          Term term{string(t, "label", here + " term"), MembershipFunction::trapezoid(0, 0, 0, 0)};
          const auto shape_text = string(t, "shape", here + " term");
          const auto shape = parse_shape(shape_text);
          if (!shape_text.empty() && !shape) problems.push_back(fmt::format("{} term '{}': unknown shape '{}'", here, term.label, shape_text));
          std::vector<double> params;
          if (const auto* p = field(t, "params", here + " term")) params = numbers(*p, here + " term params");
          if (shape) term.mf = MembershipFunction::unchecked(*shape, params);
          var.terms.push_back(std::move(term));
        }
    }
    return var;
  }

  Clause clause(const json& value, std::string_view where) {
    if (!value.is_array() || value.size() != 2 || !value[0].is_string() || !value[1].is_string()) {
      problems.push_back(fmt::format("{}: a clause is a [variable, label] pair of strings", where));
      return {};
    }
    return {value[0].get<std::string>(), value[1].get<std::string>()};
  }
};

struct Parsed {
  std::string name;
  std::vector<std::string> sensors;
  std::vector<Stage> stages;
  std::vector<std::string> problems;
};

Parsed parse(std::string_view text) {
  Parsed out;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    out.problems.push_back(fmt::format("malformed JSON: {}", e.what()));
    return out;
  }
  Reader rd;
  if (!doc.is_object()) {
    out.problems.push_back("config must be a JSON object");
    return out;
  }
  if (const auto* v = rd.field(doc, "schema_version", "config")) {
    if (!v->is_number_integer() || v->get<int>() != kConfigSchemaVersion)
      rd.problems.push_back(fmt::format("config: unsupported schema_version {}, expected {}", v->dump(), kConfigSchemaVersion));
  }
  out.name = rd.string(doc, "name", "config");
  if (const auto* s = rd.field(doc, "sensors", "config")) {
    if (!s->is_array()) rd.problems.push_back("config: 'sensors' must be an array of strings");
    else
      for (const auto& name : *s) {
        if (name.is_string()) out.sensors.push_back(name.get<std::string>());
        else rd.problems.push_back("config: 'sensors' must be an array of strings");
      }
  }
  if (const auto* stages = rd.field(doc, "stages", "config")) {
    if (!stages->is_array()) rd.problems.push_back("config: 'stages' must be an array");
    else
      for (const auto& st : *stages) {
        Stage stage;
        stage.system.name = rd.string(st, "name", "stage");
        const std::string where = fmt::format("stage '{}'", stage.system.name);
        if (st.contains("grid_points")) {
          const auto& g = st.at("grid_points");
          if (g.is_number_unsigned()) stage.system.grid_points = g.get<std::size_t>();
          else rd.problems.push_back(fmt::format("{}: grid_points must be a positive integer", where));
        }
        if (const auto* inputs = rd.field(st, "inputs", where)) {
          if (!inputs->is_array()) rd.problems.push_back(fmt::format("{}: 'inputs' must be an array", where));
          else
            for (const auto& in : *inputs) {
              auto var = rd.variable(in, where + " input");
              if (const auto* src = rd.field(in, "source", where + " input '" + var.name + "'")) {
                if (src->is_object() && src->size() == 1 && src->contains("sensor") && src->at("sensor").is_string())
                  stage.wiring.emplace(var.name, Source::sensor(src->at("sensor").get<std::string>()));
                else if (src->is_object() && src->size() == 1 && src->contains("stage") && src->at("stage").is_string())
                  stage.wiring.emplace(var.name, Source::stage(src->at("stage").get<std::string>()));
                else
                  rd.problems.push_back(fmt::format("{} input '{}': source must be {{\"sensor\": name}} or {{\"stage\": name}}", where, var.name));
              }
              stage.system.inputs.push_back(std::move(var));
            }
        }
        if (const auto* o = rd.field(st, "output", where)) stage.system.output = rd.variable(*o, where + " output");
        if (const auto* rules = rd.field(st, "rules", where)) {
          if (!rules->is_array()) rd.problems.push_back(fmt::format("{}: 'rules' must be an array", where));
          else
            for (const auto& r : *rules) {
              Rule rule;
              if (r.contains("name") && r.at("name").is_string()) rule.name = r.at("name").get<std::string>();
              const std::string rwhere = fmt::format("{} rule '{}'", where, rule.name);
              if (const auto* ifs = rd.field(r, "if", rwhere)) {
                if (!ifs->is_array()) rd.problems.push_back(fmt::format("{}: 'if' must be an array of clauses", rwhere));
                else
                  for (const auto& c : *ifs) rule.antecedents.push_back(rd.clause(c, rwhere));
              }
              if (const auto* then = rd.field(r, "then", rwhere)) rule.consequent = rd.clause(*then, rwhere);
              stage.system.rules.push_back(std::move(rule));
            }
        }
        out.stages.push_back(std::move(stage));
      }
  }
  out.problems = std::move(rd.problems);
  return out;
}

}  // namespace

std::string architecture_to_json(const EthicsArchitecture& arch) {
  json stages = json::array();
  for (const auto& stage : arch.stages()) {
    json inputs = json::array();
    for (const auto& in : stage.system.inputs) {
      auto j = variable_to_json(in);
      j["source"] = source_to_json(stage.wiring.find(in.name)->second);
      inputs.push_back(std::move(j));
    }
    json rules = json::array();
    for (const auto& r : stage.system.rules) {
      json ifs = json::array();
      for (const auto& c : r.antecedents) ifs.push_back({c.variable, c.label});
      rules.push_back({{"name", r.name}, {"if", ifs}, {"then", {r.consequent.variable, r.consequent.label}}});
    }
    stages.push_back({{"name", stage.name()},
                      {"grid_points", stage.system.grid_points},
                      {"inputs", inputs},
                      {"output", variable_to_json(stage.system.output)},
                      {"rules", rules}});
  }
  json doc = {{"schema_version", kConfigSchemaVersion}, {"name", arch.name()}, {"sensors", arch.sensors()}, {"stages", stages}};
  return doc.dump(2) + "\n";
}

std::vector<std::string> validate_config(std::string_view json_text) {
  auto parsed = parse(json_text);
  if (!parsed.problems.empty()) return parsed.problems;
  return validate_architecture(parsed.sensors, parsed.stages);
}

EthicsArchitecture architecture_from_json(std::string_view json_text) {
  auto parsed = parse(json_text);
  if (!parsed.problems.empty()) {
    std::string what = "invalid architecture config";
    for (const auto& p : parsed.problems) what += "\n  - " + p;
    throw ParseError(what, 0);
  }
  return {std::move(parsed.name), std::move(parsed.sensors), std::move(parsed.stages)};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EthicsArchitecture load_architecture(const std::filesystem::path& path) { return architecture_from_json(read_text_file(path)); }

}  // namespace autometric
