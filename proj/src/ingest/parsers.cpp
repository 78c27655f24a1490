#include <algorithm>
#include <json.hpp>

#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"
#include "semdrought/ingest/raw_observation.hpp"
#include "xml_reader.hpp"

namespace semdrought::ingest {

std::string_view format_name(SourceFormat f) noexcept {
  switch (f) {
    case SourceFormat::Csv: return "csv";
    case SourceFormat::Json: return "json";
    case SourceFormat::Xml: return "xml";
  }
  return "csv";
}

namespace {

std::string* field_for(RawObservation& raw, std::string_view column) {
  if (column == "sensor_id") return &raw.sensor_id;
  if (column == "property") return &raw.property;
  if (column == "value") return &raw.value;
  if (column == "unit") return &raw.unit;
  if (column == "timestamp") return &raw.timestamp;
  if (column == "lat") return &raw.lat;
  if (column == "lon") return &raw.lon;
  return nullptr;
}

bool optional_column(std::string_view column) { return column == "lat" || column == "lon"; }

void require_filled(const RawObservation& raw) {
  const std::pair<std::string_view, const std::string*> required[] = {
      {"sensor_id", &raw.sensor_id}, {"property", &raw.property},
      {"value", &raw.value},         {"unit", &raw.unit},
      {"timestamp", &raw.timestamp}};
  for (const auto& [name, field] : required)
    if (field->empty())
      throw Error(Errc::EmptyField, std::string(name) + " is empty", std::string(name));
}

}  // namespace

RawObservation parse_csv_line(std::string_view line, std::span<const std::string_view> schema) {
  if (schema.size() != kDefaultCsvColumns.size())
    throw Error(Errc::PreconditionViolation, "CSV schema must name exactly 7 columns");
  for (auto col : kDefaultCsvColumns)
    if (std::count(schema.begin(), schema.end(), col) != 1)
      throw Error(Errc::PreconditionViolation, "CSV schema must name each column once",
                  std::string(col));
  if (line.find('"') != std::string_view::npos)
    throw Error(Errc::Malformed, "quoted CSV fields are not supported");

  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != schema.size())
    throw Error(Errc::ColumnCount, "expected " + std::to_string(schema.size()) + " fields, got " +
                                       std::to_string(fields.size()));

  RawObservation raw;
  raw.source_format = SourceFormat::Csv;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (fields[i].empty() && !optional_column(schema[i]))
      throw Error(Errc::EmptyField, std::string(schema[i]) + " is empty", std::string(schema[i]));
    *field_for(raw, schema[i]) = std::string(fields[i]);
  }
  return raw;
}

namespace {

std::string json_scalar(const nlohmann::json& doc, const char* key, bool numeric_allowed) {
  const auto& v = doc.at(key);
  if (v.is_string()) return std::string(trim(v.get<std::string>()));
  if (numeric_allowed && v.is_number()) {
    if (v.is_number_integer() && !v.is_number_unsigned()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    return canonical_double(v.get<double>());
  }
  throw Error(Errc::WrongType, std::string(key) + " has type " + v.type_name(), key);
}

}  // namespace

RawObservation parse_json_observation(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::Malformed, std::string("JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::Malformed, "JSON observation must be an object");

  for (const char* key : {"sensor_id", "property", "value", "unit", "timestamp"})
    if (!doc.contains(key)) throw Error(Errc::MissingKey, std::string(key) + " missing", key);

  RawObservation raw;
  raw.source_format = SourceFormat::Json;
  raw.sensor_id = json_scalar(doc, "sensor_id", false);
  raw.property = json_scalar(doc, "property", false);
  raw.value = json_scalar(doc, "value", true);
  raw.unit = json_scalar(doc, "unit", false);
  raw.timestamp = json_scalar(doc, "timestamp", false);
  for (const char* key : {"lat", "lon"}) {
    if (doc.contains(key) && !doc.at(key).is_null())
      *field_for(raw, key) = json_scalar(doc, key, true);
  }
  require_filled(raw);
  return raw;
}

RawObservation parse_xml_observation(std::string_view document) {
  const auto root = xml::parse_document(document);
  if (root.name != "Observation")
    throw Error(Errc::Malformed, "root element must be <Observation>, got <" + root.name + ">");

  const auto text_of = [&](const char* name, bool required) -> std::string {
    const auto* el = root.child(name);
    if (!el) {
      if (required) throw Error(Errc::MissingElement, std::string("<") + name + "> missing", name);
      return {};
    }
    return std::string(trim(el->text));
  };

  RawObservation raw;
  raw.source_format = SourceFormat::Xml;
  raw.sensor_id = text_of("procedure", true);
  raw.property = text_of("observedProperty", true);
  raw.value = text_of("result", true);
  raw.timestamp = text_of("time", true);
  raw.lat = text_of("lat", false);
  raw.lon = text_of("lon", false);

  const auto* result = root.child("result");
  const auto uom = result->attributes.find("uom");
  if (uom == result->attributes.end())
    throw Error(Errc::MissingElement, "result@uom missing", "uom");
  raw.unit = std::string(trim(uom->second));
  require_filled(raw);
  return raw;
}

}  // namespace semdrought::ingest
