#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semdrought::ingest {

enum class SourceFormat { Csv, Json, Xml };

std::string_view format_name(SourceFormat f) noexcept;

/// A measurement as it arrived: every field still text, vocabulary and units
/// not yet aligned. Only lat/lon may be empty.
struct RawObservation {
  SourceFormat source_format = SourceFormat::Csv;
  std::string sensor_id;
  std::string property;
  std::string value;
  std::string unit;
  std::string timestamp;
  std::string lat;
  std::string lon;

  friend bool operator==(const RawObservation&, const RawObservation&) = default;
};

inline constexpr std::array<std::string_view, 7> kDefaultCsvColumns = {
    "sensor_id", "property", "value", "unit", "timestamp", "lat", "lon"};

/// Splits one CSV line on commas and trims each field. Quoting is not
/// supported. `schema` lists the seven column names in file order.
/// Errors: ColumnCount, EmptyField, Malformed (quote characters),
/// PreconditionViolation (bad schema).
RawObservation parse_csv_line(std::string_view line,
                              std::span<const std::string_view> schema = kDefaultCsvColumns);

/// One JSON object with sensor_id, property, value, unit, timestamp and
/// optional lat/lon. Numbers become canonical lexical strings; numeric
/// strings are accepted as-is; unknown keys are ignored.
/// Errors: Malformed, MissingKey, WrongType, EmptyField.
RawObservation parse_json_observation(std::string_view document);

/// `<Observation>` with procedure, observedProperty, result[@uom], time and
/// optional lat/lon children. Unknown elements are skipped.
/// Errors: Malformed, MissingElement.
RawObservation parse_xml_observation(std::string_view document);

}  // namespace semdrought::ingest
