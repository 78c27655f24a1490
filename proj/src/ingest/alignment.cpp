#include "semdrought/ingest/alignment.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"

namespace semdrought::ingest {

UnitEntry UnitEntry::inverse(std::string raw_unit_iri) const {
  return UnitEntry{std::move(raw_unit_iri), 1.0 / scale, -offset / scale};
}

AlignmentTable::AlignmentTable(Vocabulary vocabulary) : vocabulary_(std::move(vocabulary)) {
  const auto& ns = vocabulary_.ns();
  const auto spellings = [&](const std::string& iri) {
    const auto compact = ns.compact(iri);
    std::vector<std::string> out{key(iri), key(compact)};
    if (compact.rfind("ex:", 0) == 0) out.push_back(key(compact.substr(3)));
    return out;
  };
  for (const auto& p : vocabulary_.properties()) {
    for (const auto& k : spellings(p)) {
      terms_[k] = p;
      seeded_terms_.insert(k);
    }
  }
  for (const auto& u : vocabulary_.units()) {
    for (const auto& k : spellings(u)) {
      units_[k] = UnitEntry{u, 1.0, 0.0};
      seeded_units_.insert(k);
    }
  }
}

std::string AlignmentTable::key(std::string_view raw) { return to_lower(trim(raw)); }

void AlignmentTable::add_term(std::string_view raw, std::string_view property_iri) {
  const auto k = key(raw);
  if (k.empty()) throw Error(Errc::InvalidAlignment, "empty term key");
  const auto iri = vocabulary_.ns().expand(property_iri);
  if (!vocabulary_.is_property(iri))
    throw Error(Errc::InvalidAlignment, "term '" + k + "' maps to non-canonical property", iri);
  if (terms_.count(k) && !seeded_terms_.count(k))
    throw Error(Errc::InvalidAlignment, "duplicate term entry '" + k + "'", k);
  seeded_terms_.erase(k);
  terms_[k] = iri;
}

void AlignmentTable::add_unit(std::string_view raw, UnitEntry entry) {
  const auto k = key(raw);
  if (k.empty()) throw Error(Errc::InvalidAlignment, "empty unit key");
  entry.iri = vocabulary_.ns().expand(entry.iri);
  if (!std::isfinite(entry.scale) || !std::isfinite(entry.offset) || entry.scale == 0.0)
    throw Error(Errc::InvalidAlignment, "unit '" + k + "' needs finite non-zero scale", k);
  bool canonical_somewhere = false;
  for (const auto& p : vocabulary_.properties())
    canonical_somewhere = canonical_somewhere || vocabulary_.canonical_unit(p) == entry.iri;
  if (!canonical_somewhere)
    throw Error(Errc::InvalidAlignment, "unit '" + k + "' targets a non-canonical unit", entry.iri);
  if (units_.count(k) && !seeded_units_.count(k))
    throw Error(Errc::InvalidAlignment, "duplicate unit entry '" + k + "'", k);
  seeded_units_.erase(k);
  units_[k] = std::move(entry);
}

void AlignmentTable::add_sensor(std::string_view raw, SensorEntry entry) {
  const auto k = key(raw);
  if (k.empty()) throw Error(Errc::InvalidAlignment, "empty sensor key");
  if (entry.iri.empty()) entry.iri = vocabulary_.ns().ex("sensor/" + std::string(trim(raw)));
  entry.iri = vocabulary_.ns().expand(entry.iri);
  if (!is_valid_iri(entry.iri)) throw Error(Errc::InvalidAlignment, "bad sensor IRI", entry.iri);
  if ((entry.lat && !(*entry.lat >= -90 && *entry.lat <= 90)) ||
      (entry.lon && !(*entry.lon >= -180 && *entry.lon <= 180)))
    throw Error(Errc::InvalidAlignment, "station location out of range", k);
  if (!sensors_.emplace(k, std::move(entry)).second)
    throw Error(Errc::InvalidAlignment, "duplicate sensor entry '" + k + "'", k);
}

const std::string* AlignmentTable::term(std::string_view raw) const {
  auto it = terms_.find(key(raw));
  return it == terms_.end() ? nullptr : &it->second;
}

const UnitEntry* AlignmentTable::unit(std::string_view raw) const {
  auto it = units_.find(key(raw));
  return it == units_.end() ? nullptr : &it->second;
}

SensorEntry AlignmentTable::sensor(std::string_view raw) const {
  auto it = sensors_.find(key(raw));
  if (it != sensors_.end()) return it->second;
  return SensorEntry{vocabulary_.ns().ex("sensor/" + std::string(trim(raw))), {}, {}};
}

AlignmentTable AlignmentTable::from_json(std::string_view document, Vocabulary vocabulary) {
  AlignmentTable table(std::move(vocabulary));
  try {
    const auto doc = nlohmann::json::parse(document);
    if (!doc.is_object()) throw Error(Errc::InvalidAlignment, "alignment must be a JSON object");
    if (doc.contains("terms"))
      for (const auto& [raw, iri] : doc.at("terms").items())
        table.add_term(raw, iri.get<std::string>());
    if (doc.contains("units"))
      for (const auto& [raw, spec] : doc.at("units").items())
        table.add_unit(raw, UnitEntry{spec.at("iri").get<std::string>(),
                                      spec.value("scale", 1.0), spec.value("offset", 0.0)});
    if (doc.contains("sensors")) {
      for (const auto& [raw, spec] : doc.at("sensors").items()) {
        SensorEntry e;
        e.iri = spec.value("iri", std::string{});
        if (spec.contains("lat")) e.lat = spec.at("lat").get<double>();
        if (spec.contains("lon")) e.lon = spec.at("lon").get<double>();
        table.add_sensor(raw, std::move(e));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidAlignment, std::string("alignment JSON: ") + e.what());
  }
  return table;
}

AlignmentTable AlignmentTable::load(const std::filesystem::path& path, Vocabulary vocabulary) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, "cannot open alignment table " + path.string(), path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str(), std::move(vocabulary));
}

double convert_unit(double value, const UnitEntry& entry) {
  const double out = value * entry.scale + entry.offset;
  if (!std::isfinite(out)) throw Error(Errc::NonFinite, "unit conversion overflowed");
  return out;
}

namespace {

double parse_coordinate(const std::string& text, const char* name) {
  const auto v = parse_double(text);
  if (!v) throw Error(Errc::BadNumber, std::string(name) + " is not a number: '" + text + "'", text);
  return *v;
}

}  // namespace

CanonicalObservation canonicalize(const RawObservation& raw, const AlignmentTable& table) {
  const auto& vocab = table.vocabulary();
  const auto& ns = vocab.ns();

  const auto* property = table.term(raw.property);
  if (!property)
    throw Error(Errc::UnknownTerm, "no alignment for property '" + raw.property + "'", raw.property);
  const auto* unit = table.unit(raw.unit);
  if (!unit) throw Error(Errc::UnknownUnit, "no alignment for unit '" + raw.unit + "'", raw.unit);
  if (vocab.canonical_unit(*property) != unit->iri)
    throw Error(Errc::UnitMismatch,
                "unit '" + raw.unit + "' does not convert to the canonical unit of " +
                    ns.compact(*property),
                raw.unit);

  const auto value = parse_double(raw.value);
  if (!value) throw Error(Errc::BadNumber, "value is not a number: '" + raw.value + "'", raw.value);

  const auto ts = parse_iso8601(trim(raw.timestamp));
  if (!ts || *ts < 0)
    throw Error(Errc::BadTimestamp, "timestamp must be YYYY-MM-DDTHH:MM:SSZ: '" + raw.timestamp + "'",
                raw.timestamp);

  const auto sensor = table.sensor(raw.sensor_id);
  if (!is_valid_iri(sensor.iri))
    throw Error(Errc::Malformed, "sensor id cannot form an IRI: '" + raw.sensor_id + "'",
                raw.sensor_id);

  CanonicalObservation obs;
  obs.sensor_id = sensor.iri;
  obs.property = *property;
  obs.unit = unit->iri;
  obs.value = convert_unit(*value, *unit);
  obs.timestamp = *ts;

  const auto locate = [&](const std::string& text, const std::optional<double>& station,
                          const char* name) {
    if (!text.empty()) return parse_coordinate(text, name);
    if (station) return *station;
    throw Error(Errc::MissingLocation, std::string(name) + " missing and no station metadata",
                raw.sensor_id);
  };
  obs.lat = locate(raw.lat, sensor.lat, "lat");
  obs.lon = locate(raw.lon, sensor.lon, "lon");
  if (!(obs.lat >= -90.0 && obs.lat <= 90.0))
    throw Error(Errc::OutOfRange, "lat outside [-90, 90]", raw.lat);
  if (!(obs.lon >= -180.0 && obs.lon <= 180.0))
    throw Error(Errc::OutOfRange, "lon outside [-180, 180]", raw.lon);

  obs.id = mint_observation_iri(obs.sensor_id, obs.timestamp, ns);
  return obs;
}

}  // namespace semdrought::ingest
