#include "semdrought/service/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "semdrought/cep/engine.hpp"
#include "semdrought/core/error.hpp"
#include "semdrought/core/term.hpp"
#include "semdrought/core/vocabulary.hpp"
#include "semdrought/ingest/alignment.hpp"
#include "semdrought/store/triple_store.hpp"

namespace semdrought::service {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& reason) {
  throw Error(Errc::InvalidConfig, field + ": " + reason, field);
}

std::string read_file(const fs::path& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, field + " file not found: " + path.string(), path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const json* optional_field(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return nullptr;
  return &doc.at(key);
}

std::string string_field(const json& doc, const char* key) {
  const auto* v = optional_field(doc, key);
  if (!v) invalid(key, "missing");
  if (!v->is_string()) invalid(key, "must be a string");
  return v->get<std::string>();
}

double number_field(const json& obj, const char* key, double fallback, const std::string& field) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) invalid(field, std::string(key) + " must be a number");
  return obj.at(key).get<double>();
}

fs::path resolve(const fs::path& base_dir, const std::string& text) {
  fs::path p(text);
  return p.is_absolute() ? p : base_dir / p;
}

CalendarMonth month_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_string()) invalid("baseline", std::string(key) + " must be YYYY-MM");
  const auto m = parse_year_month(obj.at(key).get<std::string>());
  if (!m) invalid("baseline", std::string(key) + " must be YYYY-MM");
  return *m;
}

}  // namespace

std::set<std::string> reserved_event_kinds(const Vocabulary& vocabulary) {
  std::set<std::string> out;
  for (const auto& p : vocabulary.properties()) out.insert(p);
  out.insert(std::string(ik::kDrierObservation));
  out.insert(std::string(ik::kWetterObservation));
  return out;
}

Config config_from_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) invalid("config", "must be a JSON object");
  Config c;

  if (const auto* v = optional_field(doc, "base_iri")) {
    if (!v->is_string() || !is_valid_iri(v->get<std::string>())) invalid("base_iri", "must be an absolute IRI");
    c.base_iri = v->get<std::string>();
  }
  const Namespaces ns(c.base_iri);

  if (const auto* v = optional_field(doc, "weights")) {
    if (!v->is_object()) invalid("weights", "must be an object");
    c.weights.precipitation = number_field(*v, "precipitation", c.weights.precipitation, "weights");
    c.weights.soil_moisture = number_field(*v, "soil_moisture", c.weights.soil_moisture, "weights");
    c.weights.temperature = number_field(*v, "temperature", c.weights.temperature, "weights");
    c.weights.ik = number_field(*v, "ik", c.weights.ik, "weights");
    try {
      forecast::validate(c.weights);
    } catch (const Error& e) {
      invalid("weights", e.what());
    }
  }
  if (const auto* v = optional_field(doc, "thresholds")) {
    if (!v->is_object()) invalid("thresholds", "must be an object");
    c.thresholds.watch = number_field(*v, "watch", c.thresholds.watch, "thresholds");
    c.thresholds.warning = number_field(*v, "warning", c.thresholds.warning, "thresholds");
    c.thresholds.severe = number_field(*v, "severe", c.thresholds.severe, "thresholds");
    try {
      forecast::validate(c.thresholds);
    } catch (const Error& e) {
      invalid("thresholds", e.what());
    }
  }

  const auto* regions = optional_field(doc, "regions");
  if (!regions || !regions->is_object() || regions->empty()) invalid("regions", "must map region ids to sensor lists");
  std::set<std::string> assigned;
  for (const auto& [id, sensors] : regions->items()) {
    if (id.empty()) invalid("regions", "empty region id");
    if (!sensors.is_array() || sensors.empty()) invalid("regions", id + " needs a non-empty sensor list");
    for (const auto& s : sensors) {
      if (!s.is_string() || s.get<std::string>().empty()) invalid("regions", id + " has a non-string sensor id");
      if (!assigned.insert(to_lower(trim(s.get<std::string>()))).second)
        invalid("regions", "sensor " + s.get<std::string>() + " is assigned twice");
      c.regions[id].push_back(s.get<std::string>());
    }
  }

  if (const auto* v = optional_field(doc, "http")) {
    if (!v->is_object()) invalid("http", "must be an object");
    if (v->contains("host")) {
      if (!v->at("host").is_string()) invalid("http", "host must be a string");
      c.http.host = v->at("host").get<std::string>();
    }
    if (v->contains("port")) {
      if (!v->at("port").is_number_integer()) invalid("http", "port must be an integer");
      c.http.port = v->at("port").get<int>();
      if (c.http.port < 0 || c.http.port > 65535) invalid("http", "port out of range");
    }
  }
  if (optional_field(doc, "persistence_dir")) c.persistence_dir = resolve(base_dir, string_field(doc, "persistence_dir"));
  if (const auto* v = optional_field(doc, "baseline")) {
    if (!v->is_object()) invalid("baseline", "must be an object with from and to");
    c.baseline = BaselineRange{month_field(*v, "from"), month_field(*v, "to")};
    if (month_start(c.baseline->to) < month_start(c.baseline->from)) invalid("baseline", "from is after to");
  }
  if (const auto* v = optional_field(doc, "ik")) {
    if (!v->is_object()) invalid("ik", "must be an object");
    const double count = number_field(*v, "count", c.ik.count, "ik");
    const double days = number_field(*v, "window_days", c.ik.window_days, "ik");
    c.ik.severity = number_field(*v, "severity", c.ik.severity, "ik");
    if (count < 1 || count != static_cast<int>(count)) invalid("ik", "count must be a positive integer");
    if (days < 1 || days != static_cast<int>(days)) invalid("ik", "window_days must be a positive integer");
    if (!(c.ik.severity >= 0.0 && c.ik.severity <= 1.0)) invalid("ik", "severity must be in [0, 1]");
    c.ik.count = static_cast<int>(count);
    c.ik.window_days = static_cast<int>(days);
  }
  if (const auto* v = optional_field(doc, "min_baseline")) {
    if (!v->is_number_integer() || v->get<long long>() < 2) invalid("min_baseline", "must be an integer >= 2");
    c.min_baseline = v->get<std::size_t>();
  }

  const auto vocabulary = Vocabulary::standard(ns);
  if (optional_field(doc, "alignment")) {
    c.alignment = resolve(base_dir, string_field(doc, "alignment"));
    try {
      ingest::AlignmentTable::load(*c.alignment, vocabulary);
    } catch (const Error& e) {
      if (e.code() == Errc::NotFound) throw;
      invalid("alignment", e.what());
    }
  }

  if (optional_field(doc, "indicators")) {
    c.indicators = resolve(base_dir, string_field(doc, "indicators"));
    try {
      c.indicator_set = ik::load_indicators(*c.indicators);
      ik::IkKnowledge probe;
      for (const auto& ind : c.indicator_set) probe.register_indicator(ind);
    } catch (const Error& e) {
      if (e.code() == Errc::NotFound) throw;
      invalid("indicators", e.what());
    }
    for (const auto& ind : c.indicator_set)
      if (!c.regions.contains(ind.region))
        invalid("indicators", ind.id + " refers to unknown region " + ind.region);
  }

  c.rules = resolve(base_dir, string_field(doc, "rules"));
  const auto rules_text = read_file(c.rules, "rules");
  try {
    c.rule_set = cep::parse_ruleset(rules_text);
    for (auto& r : ik::compile_indicator_rules(ik::IkKnowledge{}, c.ik.count,
                                               static_cast<std::int64_t>(c.ik.window_days) * 86400, c.ik.severity))
      c.rule_set.push_back(std::move(r));
    cep::Engine probe(c.rule_set, ns, reserved_event_kinds(vocabulary));
  } catch (const ParseFailure& e) {
    invalid("rules", c.rules.string() + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                         e.what());
  } catch (const Error& e) {
    invalid("rules", e.what());
  }

  if (optional_field(doc, "inference_rules")) {
    c.inference_rules = resolve(base_dir, string_field(doc, "inference_rules"));
    c.inference_text = read_file(*c.inference_rules, "inference_rules");
    try {
      store::parse_inference_rules(c.inference_text, ns);
    } catch (const ParseFailure& e) {
      invalid("inference_rules", "line " + std::to_string(e.line()) + ": " + e.what());
    } catch (const Error& e) {
      invalid("inference_rules", e.what());
    }
  }
  return c;
}

Config load_config(const fs::path& path) {
  const auto text = read_file(path, "config");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid("config", std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

}  // namespace semdrought::service
