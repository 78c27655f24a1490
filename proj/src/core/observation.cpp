#include "semdrought/core/observation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"

namespace semdrought {

void validate(const CanonicalObservation& obs, const Vocabulary& vocabulary) {
  for (const auto* iri : {&obs.id, &obs.sensor_id, &obs.property, &obs.unit})
    if (!is_valid_iri(*iri)) throw Error(Errc::InvalidIri, "observation field", *iri);
  const auto unit = vocabulary.canonical_unit(obs.property);
  if (!unit) throw Error(Errc::UnknownTerm, "not a canonical property", obs.property);
  if (*unit != obs.unit) throw Error(Errc::UnitMismatch, "unit is not canonical", obs.unit);
  if (!std::isfinite(obs.value)) throw Error(Errc::NonFinite, "observation value");
  if (obs.timestamp < 0) throw Error(Errc::BadTimestamp, "timestamp before epoch");
  if (!(obs.lat >= -90.0 && obs.lat <= 90.0)) throw Error(Errc::OutOfRange, "lat", "lat");
  if (!(obs.lon >= -180.0 && obs.lon <= 180.0)) throw Error(Errc::OutOfRange, "lon", "lon");
}

std::string sensor_local_name(std::string_view sensor_iri, const Namespaces& ns) {
  const std::string sensor_base = ns.ex("sensor/");
  if (sensor_iri.substr(0, sensor_base.size()) == sensor_base &&
      sensor_iri.size() > sensor_base.size())
    return std::string(sensor_iri.substr(sensor_base.size()));
  const auto cut = sensor_iri.find_last_of("/#:");
  if (cut == std::string_view::npos || cut + 1 == sensor_iri.size()) return std::string(sensor_iri);
  return std::string(sensor_iri.substr(cut + 1));
}

std::string mint_observation_iri(std::string_view sensor_iri, std::int64_t timestamp,
                                 const Namespaces& ns) {
  return ns.ex("obs/") + sensor_local_name(sensor_iri, ns) + "/" + std::to_string(timestamp);
}

std::vector<Triple> observation_to_triples(const CanonicalObservation& obs,
                                           const Namespaces& ns) {
  using namespace vocab;
  const Term subject = Term::iri(obs.id);
  const auto pred = [&](std::string_view local) { return Term::iri(ns.ex(local)); };
  return {
      {subject, Term::iri(ns.rdf("type")), Term::iri(ns.ex(kObservationEvent))},
      {subject, pred(kBySensor), Term::iri(obs.sensor_id)},
      {subject, pred(kObservedProperty), Term::iri(obs.property)},
      {subject, pred(kHasValue), Term::of_double(obs.value)},
      {subject, pred(kHasUnit), Term::iri(obs.unit)},
      {subject, pred(kAtTime), Term::of_datetime(obs.timestamp)},
      {subject, pred(kLat), Term::of_double(obs.lat)},
      {subject, pred(kLon), Term::of_double(obs.lon)},
  };
}

namespace {

const Term& single_object(std::span<const Triple> triples, const Term& subject,
                          const std::string& predicate, std::string_view field) {
  const Term* found = nullptr;
  for (const auto& t : triples) {
    if (t.subject != subject || t.predicate.value() != predicate || !t.predicate.is_iri()) continue;
    if (found && *found != t.object)
      throw Error(Errc::Ambiguous, "two values for " + std::string(field), std::string(field));
    found = &t.object;
  }
  if (!found) throw Error(Errc::MissingField, std::string(field) + " absent", std::string(field));
  return *found;
}

std::string iri_of(const Term& t, std::string_view field) {
  if (!t.is_iri()) throw Error(Errc::BadLiteral, std::string(field) + " must be an IRI", t.value());
  return t.value();
}

double double_of(const Term& t, std::string_view field) {
  std::optional<double> v;
  if (t.is_literal() && t.datatype() == Datatype::Double) v = parse_double(t.value());
  if (!v) throw Error(Errc::BadLiteral, std::string(field) + " must be a double", t.value());
  return *v;
}

}  // namespace

CanonicalObservation triples_to_observation(std::span<const Triple> triples,
                                            const Namespaces& ns) {
  using namespace vocab;
  const std::string rdf_type = ns.rdf("type");
  const std::string obs_class = ns.ex(kObservationEvent);

  std::optional<Term> subject;
  for (const auto& t : triples) {
    if (t.predicate.value() != rdf_type || !t.object.is_iri() || t.object.value() != obs_class)
      continue;
    if (subject && *subject != t.subject)
      throw Error(Errc::Ambiguous, "more than one observation subject");
    subject = t.subject;
  }
  if (!subject) throw Error(Errc::MissingField, "no subject typed ObservationEvent", "type");

  CanonicalObservation obs;
  obs.id = subject->value();
  obs.sensor_id = iri_of(single_object(triples, *subject, ns.ex(kBySensor), kBySensor), kBySensor);
  obs.property = iri_of(
      single_object(triples, *subject, ns.ex(kObservedProperty), kObservedProperty),
      kObservedProperty);
  obs.value = double_of(single_object(triples, *subject, ns.ex(kHasValue), kHasValue), kHasValue);
  obs.unit = iri_of(single_object(triples, *subject, ns.ex(kHasUnit), kHasUnit), kHasUnit);

  const Term& at = single_object(triples, *subject, ns.ex(kAtTime), kAtTime);
  std::optional<std::int64_t> ts;
  if (at.is_literal() && at.datatype() == Datatype::DateTime) ts = parse_iso8601(at.value());
  if (!ts) throw Error(Errc::BadLiteral, "atTime must be a dateTime", at.value());
  obs.timestamp = *ts;

  obs.lat = double_of(single_object(triples, *subject, ns.ex(kLat), kLat), kLat);
  obs.lon = double_of(single_object(triples, *subject, ns.ex(kLon), kLon), kLon);
  return obs;
}

}  // namespace semdrought
