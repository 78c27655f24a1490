#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semdrought/core/term.hpp"
#include "semdrought/core/vocabulary.hpp"

namespace semdrought {

/// One sensor measurement in canonical form. IRIs are expanded.
struct CanonicalObservation {
  std::string id;
  std::string sensor_id;
  std::string property;
  double value = 0.0;  // in the property's canonical unit
  std::string unit;
  std::int64_t timestamp = 0;  // UTC epoch seconds
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const CanonicalObservation&, const CanonicalObservation&) = default;
};

/// Throws on any broken invariant (unit/property mismatch, ranges, finiteness).
void validate(const CanonicalObservation& obs, const Vocabulary& vocabulary);

/// Local name of a sensor IRI: the part after the base's "sensor/" segment,
/// or after the last '/' or '#'.
std::string sensor_local_name(std::string_view sensor_iri, const Namespaces& ns);

/// `<base>obs/<sensor-local-name>/<timestamp>`. Deterministic.
std::string mint_observation_iri(std::string_view sensor_iri, std::int64_t timestamp,
                                 const Namespaces& ns);

/// The fixed eight-triple encoding, in the order type, bySensor,
/// observedProperty, hasValue, hasUnit, atTime, lat, lon.
std::vector<Triple> observation_to_triples(const CanonicalObservation& obs,
                                           const Namespaces& ns);

/// Inverse of observation_to_triples. Extra triples about the same subject
/// (inferred types, participation links) are ignored.
/// Errors: MissingField, Ambiguous, BadLiteral.
CanonicalObservation triples_to_observation(std::span<const Triple> triples,
                                            const Namespaces& ns);

}  // namespace semdrought
