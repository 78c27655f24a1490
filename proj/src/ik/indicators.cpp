#include "semdrought/ik/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"

namespace semdrought::ik {

using nlohmann::json;

std::string_view kind_name(IndicatorKind k) noexcept {
  switch (k) {
    case IndicatorKind::Presence: return "presence";
    case IndicatorKind::Absence: return "absence";
    case IndicatorKind::Behavior: return "behavior";
    case IndicatorKind::Flowering: return "flowering";
  }
  return "?";
}

std::string_view valence_name(Valence v) noexcept { return v == Valence::Drier ? "drier" : "wetter"; }

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(Errc::InvalidIndicator, field + ": " + why, field);
}

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key)) invalid(key, "missing");
  if (!j.at(key).is_string()) invalid(key, "must be a string");
  return j.at(key).get<std::string>();
}

bool identifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

IkIndicator indicator_from_json(const json& j) {
  if (!j.is_object()) invalid("indicator", "must be a JSON object");
  IkIndicator ind;
  ind.id = string_field(j, "id");
  if (!identifier(ind.id)) invalid("id", "must be a non-empty identifier");
  ind.phenomenon = j.contains("phenomenon") ? string_field(j, "phenomenon") : std::string{};
  ind.region = string_field(j, "region");
  if (!identifier(ind.region)) invalid("region", "must be a non-empty identifier");

  const auto kind = string_field(j, "kind");
  if (kind == "presence") ind.kind = IndicatorKind::Presence;
  else if (kind == "absence") ind.kind = IndicatorKind::Absence;
  else if (kind == "behavior") ind.kind = IndicatorKind::Behavior;
  else if (kind == "flowering") ind.kind = IndicatorKind::Flowering;
  else invalid("kind", "unknown kind '" + kind + "'");

  const auto valence = string_field(j, "valence");
  if (valence == "drier") ind.valence = Valence::Drier;
  else if (valence == "wetter") ind.valence = Valence::Wetter;
  else invalid("valence", "must be drier or wetter");

  if (!j.contains("weight") || !j.at("weight").is_number()) invalid("weight", "must be a number");
  ind.weight = j.at("weight").get<double>();
  if (!(ind.weight > 0.0 && ind.weight <= 1.0))
    throw Error(Errc::InvalidWeight, "weight must be in (0, 1]", ind.id);

  if (!j.contains("season") || !j.at("season").is_array()) invalid("season", "must be an array of months");
  for (const auto& m : j.at("season")) {
    if (!m.is_number_integer() || m.get<int>() < 1 || m.get<int>() > 12)
      invalid("season", "months are integers 1..12");
    ind.season.insert(m.get<unsigned>());
  }
  if (ind.season.empty()) invalid("season", "must not be empty");
  return ind;
}

json indicator_to_json(const IkIndicator& ind) {
  return json{{"id", ind.id},
              {"phenomenon", ind.phenomenon},
              {"kind", kind_name(ind.kind)},
              {"valence", valence_name(ind.valence)},
              {"weight", ind.weight},
              {"season", std::vector<unsigned>(ind.season.begin(), ind.season.end())},
              {"region", ind.region}};
}

std::vector<IkIndicator> load_indicators(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, "cannot open indicator file " + path.string(), path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::Malformed, path.string() + ": " + e.what(), path.string());
  }
  std::vector<IkIndicator> out;
  if (doc.is_array()) {
    for (const auto& item : doc) out.push_back(indicator_from_json(item));
  } else {
    out.push_back(indicator_from_json(doc));
  }
  return out;
}

IkObservation observation_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::Malformed, "IK observation must be a JSON object");
  for (const char* key : {"indicatorId", "timestamp"})
    if (!j.contains(key)) throw Error(Errc::MissingKey, std::string(key) + " missing", key);
  IkObservation obs;
  if (!j.at("indicatorId").is_string())
    throw Error(Errc::WrongType, "indicatorId must be a string", "indicatorId");
  obs.indicator_id = j.at("indicatorId").get<std::string>();

  const auto& ts = j.at("timestamp");
  if (ts.is_string()) {
    const auto parsed = parse_iso8601(ts.get<std::string>());
    if (!parsed) throw Error(Errc::BadTimestamp, "unparseable timestamp", ts.get<std::string>());
    obs.timestamp = *parsed;
  } else if (ts.is_number_integer()) {
    obs.timestamp = ts.get<std::int64_t>();
    if (obs.timestamp < 0) throw Error(Errc::BadTimestamp, "negative timestamp", ts.dump());
  } else {
    throw Error(Errc::WrongType, "timestamp must be an ISO-8601 string or epoch seconds", "timestamp");
  }

  if (j.contains("region") && !j.at("region").is_null()) {
    if (!j.at("region").is_string()) throw Error(Errc::WrongType, "region must be a string", "region");
    obs.region = j.at("region").get<std::string>();
  }
  if (j.contains("confidence")) {
    if (!j.at("confidence").is_number())
      throw Error(Errc::WrongType, "confidence must be a number", "confidence");
    obs.confidence = j.at("confidence").get<double>();
  }
  return obs;
}

json observation_to_json(const IkObservation& obs) {
  json j{{"indicatorId", obs.indicator_id},
         {"timestamp", format_iso8601(obs.timestamp)},
         {"confidence", obs.confidence}};
  if (!obs.region.empty()) j["region"] = obs.region;
  return j;
}

void IkKnowledge::register_indicator(IkIndicator ind) {
  if (!(ind.weight > 0.0 && ind.weight <= 1.0))
    throw Error(Errc::InvalidWeight, "weight must be in (0, 1]", ind.id);
  if (ind.season.empty()) throw Error(Errc::InvalidIndicator, "season must not be empty", ind.id);
  if (std::any_of(ind.season.begin(), ind.season.end(), [](unsigned m) { return m < 1 || m > 12; }))
    throw Error(Errc::InvalidIndicator, "season months are 1..12", ind.id);
  if (indicators_.contains(ind.id))
    throw Error(Errc::DuplicateId, "indicator " + ind.id + " already registered", ind.id);
  auto id = ind.id;
  indicators_.emplace(std::move(id), std::move(ind));
}

const IkIndicator* IkKnowledge::find(std::string_view id) const {
  const auto it = indicators_.find(id);
  return it == indicators_.end() ? nullptr : &it->second;
}

void IkKnowledge::check(const IkObservation& obs) const {
  const auto* ind = find(obs.indicator_id);
  if (!ind) throw Error(Errc::UnknownIndicator, "no indicator " + obs.indicator_id, obs.indicator_id);
  if (!std::isfinite(obs.confidence) || obs.confidence < 0.0 || obs.confidence > 1.0)
    throw Error(Errc::BadConfidence, "confidence must be in [0, 1]", obs.indicator_id);
  if (obs.timestamp < 0) throw Error(Errc::BadTimestamp, "negative timestamp", obs.indicator_id);
  if (!ind->season.contains(month_of(obs.timestamp).month))
    throw Error(Errc::OutOfSeason,
                obs.indicator_id + " is not in season at " + format_iso8601(obs.timestamp),
                obs.indicator_id);
}

cep::Event IkKnowledge::to_event(const IkObservation& obs) const {
  check(obs);
  const auto& ind = *find(obs.indicator_id);
  cep::Event e;
  e.kind = std::string(ind.valence == Valence::Drier ? kDrierObservation : kWetterObservation);
  e.timestamp = obs.timestamp;
  e.value = ind.weight * obs.confidence;
  e.attributes["indicator"] = ind.id;
  e.attributes["region"] = obs.region.empty() ? ind.region : obs.region;
  return e;
}

cep::Event IkKnowledge::record(IkObservation obs) {
  auto event = to_event(obs);
  if (obs.region.empty()) obs.region = find(obs.indicator_id)->region;
  log_.push_back(std::move(obs));
  return event;
}

IkSignal IkKnowledge::signal(std::string_view region, std::int64_t start, std::int64_t end) const {
  IkSignal out;
  double num = 0.0, den = 0.0;
  for (const auto& obs : log_) {
    if (obs.region != region || obs.timestamp <= start || obs.timestamp > end) continue;
    const auto& ind = *find(obs.indicator_id);
    const double mass = ind.weight * obs.confidence;
    num += static_cast<int>(ind.valence) * mass;
    den += mass;
    ++out.support;
  }
  if (den > 0.0) out.value = std::clamp(num / den, -1.0, 1.0);
  return out;
}

std::vector<cep::CepRule> compile_indicator_rules(const IkKnowledge& knowledge, int k,
                                                  std::int64_t window_seconds, double severity) {
  (void)knowledge;
  if (k < 1) throw Error(Errc::PreconditionViolation, "k must be at least 1", std::to_string(k));
  if (window_seconds <= 0 || window_seconds % 60 != 0)
    throw Error(Errc::PreconditionViolation, "window must be a positive number of minutes");
  std::vector<cep::CepRule> out;
  for (const auto& [name, observed, emitted] :
       {std::tuple{"ik_drier", kDrierObservation, kDrierSignal},
        std::tuple{"ik_wetter", kWetterObservation, kWetterSignal}}) {
    const auto text = "RULE " + std::string(name) + " WHEN COUNT(" + std::string(observed) +
                      ") >= " + std::to_string(k) + " WITHIN " + cep::print_duration(window_seconds) +
                      " EMIT " + std::string(emitted) + " SEVERITY " + canonical_double(severity);
    out.push_back(cep::parse_rule(text));
  }
  return out;
}

}  // namespace semdrought::ik
