#include "semdrought/core/vocabulary.hpp"

#include <algorithm>

#include "semdrought/core/error.hpp"

namespace semdrought {

std::string_view category_name(OntologyCategory c) noexcept {
  switch (c) {
    case OntologyCategory::Object: return "Object";
    case OntologyCategory::State: return "State";
    case OntologyCategory::Process: return "Process";
    case OntologyCategory::Event: return "Event";
  }
  return "Object";
}

Vocabulary::Vocabulary(Namespaces ns) : ns_(std::move(ns)) {}

Vocabulary Vocabulary::standard(const Namespaces& ns) {
  using namespace vocab;
  Vocabulary v(ns);
  const auto ex = [&](std::string_view local) { return ns.ex(local); };

  for (auto u : {kPercentVolumetric, kMillimetre, kDegreeCelsius, kPercent, kMetrePerSecond})
    v.add_unit(ex(u));
  v.add_property(ex(kSoilMoisture), ex(kPercentVolumetric));
  v.add_property(ex(kPrecipitation), ex(kMillimetre));
  v.add_property(ex(kAirTemperature), ex(kDegreeCelsius));
  v.add_property(ex(kRelativeHumidity), ex(kPercent));
  v.add_property(ex(kWindSpeed), ex(kMetrePerSecond));

  for (auto c : {OntologyCategory::Object, OntologyCategory::State, OntologyCategory::Process,
                 OntologyCategory::Event})
    v.annotate_class(ex(category_name(c)), c);

  const std::pair<std::string_view, OntologyCategory> classes[] = {
      {kSensor, OntologyCategory::Object},
      {kObservationEvent, OntologyCategory::Event},
      {kDroughtProcess, OntologyCategory::Process},
      {kDryCondition, OntologyCategory::State},
      {"WetCondition", OntologyCategory::State},
      {"IkObservationEvent", OntologyCategory::Event},
  };
  for (const auto& [local, cat] : classes) {
    v.annotate_class(ex(local), cat);
    v.add_subclass(ex(local), ex(category_name(cat)));
  }

  v.add_subproperty(ex(kBySensor), ex(kHasParticipant));
  v.add_influence(ex(kSoilMoisture), ex(kAirTemperature));
  v.add_influence(ex(kSoilMoisture), ex(kPrecipitation));
  return v;
}

void Vocabulary::add_unit(const std::string& unit_iri) {
  if (!is_valid_iri(unit_iri)) throw Error(Errc::InvalidIri, "unit IRI", unit_iri);
  if (is_unit(unit_iri)) throw Error(Errc::DuplicateId, "unit already registered", unit_iri);
  units_.push_back(unit_iri);
}

void Vocabulary::add_property(const std::string& property_iri, const std::string& unit_iri) {
  if (!is_valid_iri(property_iri)) throw Error(Errc::InvalidIri, "property IRI", property_iri);
  if (!is_unit(unit_iri)) throw Error(Errc::UnknownUnit, "unit not registered", unit_iri);
  if (!property_units_.emplace(property_iri, unit_iri).second)
    throw Error(Errc::DuplicateId, "property already registered", property_iri);
}

void Vocabulary::annotate_class(const std::string& class_iri, OntologyCategory category) {
  if (!is_valid_iri(class_iri)) throw Error(Errc::InvalidIri, "class IRI", class_iri);
  if (!categories_.emplace(class_iri, category).second)
    throw Error(Errc::DuplicateCategory, "class already carries a category", class_iri);
}

void Vocabulary::add_subclass(const std::string& sub_iri, const std::string& super_iri) {
  subclasses_.emplace_back(sub_iri, super_iri);
}

void Vocabulary::add_subproperty(const std::string& sub_iri, const std::string& super_iri) {
  subproperties_.emplace_back(sub_iri, super_iri);
}

void Vocabulary::add_influence(const std::string& property_iri,
                               const std::string& influenced_by_iri) {
  if (!is_property(property_iri)) throw Error(Errc::UnknownTerm, "not a property", property_iri);
  if (!is_property(influenced_by_iri))
    throw Error(Errc::UnknownTerm, "not a property", influenced_by_iri);
  influences_.push_back({property_iri, influenced_by_iri});
}

bool Vocabulary::is_property(std::string_view iri) const {
  return property_units_.find(iri) != property_units_.end();
}

bool Vocabulary::is_unit(std::string_view iri) const {
  return std::find(units_.begin(), units_.end(), iri) != units_.end();
}

std::optional<std::string> Vocabulary::canonical_unit(std::string_view property_iri) const {
  auto it = property_units_.find(property_iri);
  if (it == property_units_.end()) return std::nullopt;
  return it->second;
}

std::optional<OntologyCategory> Vocabulary::category(std::string_view class_iri) const {
  auto it = categories_.find(class_iri);
  if (it == categories_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Vocabulary::properties() const {
  std::vector<std::string> out;
  for (const auto& [p, u] : property_units_) out.push_back(p);
  return out;
}

std::vector<std::string> Vocabulary::units() const { return units_; }

std::vector<Triple> Vocabulary::to_triples() const {
  const auto iri = [](const std::string& s) { return Term::iri(s); };
  const Term rdf_type = iri(ns_.rdf("type"));
  const Term sub_class = iri(ns_.rdfs("subClassOf"));
  const Term sub_prop = iri(ns_.rdfs("subPropertyOf"));
  const Term has_category = iri(ns_.ex(vocab::kHasCategory));
  const Term canonical_unit = iri(ns_.ex(vocab::kCanonicalUnit));
  const Term influenced_by = iri(ns_.ex(vocab::kInfluencedBy));

  std::vector<Triple> out;
  for (const auto& u : units_) out.push_back({iri(u), rdf_type, iri(ns_.ex("Unit"))});
  for (const auto& [p, u] : property_units_) {
    out.push_back({iri(p), rdf_type, iri(ns_.ex("ObservableProperty"))});
    out.push_back({iri(p), canonical_unit, iri(u)});
  }
  for (const auto& [c, cat] : categories_)
    out.push_back({iri(c), has_category, iri(ns_.ex(category_name(cat)))});
  for (const auto& [sub, sup] : subclasses_) out.push_back({iri(sub), sub_class, iri(sup)});
  for (const auto& [sub, sup] : subproperties_) out.push_back({iri(sub), sub_prop, iri(sup)});
  for (const auto& inf : influences_)
    out.push_back({iri(inf.property), influenced_by, iri(inf.influenced_by)});
  return out;
}

}  // namespace semdrought
