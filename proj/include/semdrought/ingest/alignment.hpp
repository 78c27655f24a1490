#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "semdrought/core/observation.hpp"
#include "semdrought/core/vocabulary.hpp"
#include "semdrought/ingest/raw_observation.hpp"

namespace semdrought::ingest {

/// canonical = raw * scale + offset
struct UnitEntry {
  std::string iri;
  double scale = 1.0;
  double offset = 0.0;

  /// The entry mapping canonical values back to the raw unit.
  UnitEntry inverse(std::string raw_unit_iri) const;
};

struct SensorEntry {
  std::string iri;
  std::optional<double> lat;
  std::optional<double> lon;
};

/// Maps the vocabulary each source uses onto the canonical ontology.
/// Keys are matched case-insensitively after trimming. The canonical local
/// names and IRIs of the vocabulary's own properties and units are always
/// recognised, so payloads already in canonical terms need no entries.
class AlignmentTable {
 public:
  explicit AlignmentTable(Vocabulary vocabulary);

  /// Errors: InvalidAlignment (duplicate key, unknown target, bad scale).
  void add_term(std::string_view raw, std::string_view property_iri);
  void add_unit(std::string_view raw, UnitEntry entry);
  void add_sensor(std::string_view raw, SensorEntry entry);

  /// Parses the alignment JSON document; "ex:" prefixes are expanded
  /// against the vocabulary's base IRI.
  static AlignmentTable from_json(std::string_view document, Vocabulary vocabulary);
  static AlignmentTable load(const std::filesystem::path& path, Vocabulary vocabulary);

  const std::string* term(std::string_view raw) const;
  const UnitEntry* unit(std::string_view raw) const;
  /// Registered entry or the default `ex:sensor/<raw>` with no location.
  SensorEntry sensor(std::string_view raw) const;

  const Vocabulary& vocabulary() const noexcept { return vocabulary_; }

 private:
  static std::string key(std::string_view raw);

  Vocabulary vocabulary_;
  std::map<std::string, std::string> terms_;
  std::map<std::string, UnitEntry> units_;
  std::map<std::string, SensorEntry> sensors_;
  std::set<std::string> seeded_terms_;
  std::set<std::string> seeded_units_;
};

/// value * scale + offset. Errors: NonFinite.
double convert_unit(double value, const UnitEntry& entry);

/// Resolves vocabulary, units, time, identity and location of a raw
/// observation. Errors: UnknownTerm, UnknownUnit, UnitMismatch,
/// BadTimestamp, BadNumber, OutOfRange, MissingLocation, NonFinite,
/// Malformed (sensor id not usable in an IRI).
CanonicalObservation canonicalize(const RawObservation& raw, const AlignmentTable& table);

}  // namespace semdrought::ingest
