#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semdrought/core/term.hpp"

namespace semdrought {

/// Foundational categories every vocabulary class is annotated with.
enum class OntologyCategory { Object, State, Process, Event };

std::string_view category_name(OntologyCategory c) noexcept;

/// Local names of the shipped vocabulary (expand with Namespaces::ex).
namespace vocab {
inline constexpr std::string_view kSoilMoisture = "soilMoisture";
inline constexpr std::string_view kPrecipitation = "precipitation";
inline constexpr std::string_view kAirTemperature = "airTemperature";
inline constexpr std::string_view kRelativeHumidity = "relativeHumidity";
inline constexpr std::string_view kWindSpeed = "windSpeed";

inline constexpr std::string_view kPercentVolumetric = "percentVolumetric";
inline constexpr std::string_view kMillimetre = "millimetre";
inline constexpr std::string_view kDegreeCelsius = "degreeCelsius";
inline constexpr std::string_view kPercent = "percent";
inline constexpr std::string_view kMetrePerSecond = "metrePerSecond";

inline constexpr std::string_view kSensor = "Sensor";
inline constexpr std::string_view kObservationEvent = "ObservationEvent";
inline constexpr std::string_view kDroughtProcess = "DroughtProcess";
inline constexpr std::string_view kDryCondition = "DryCondition";

inline constexpr std::string_view kBySensor = "bySensor";
inline constexpr std::string_view kObservedProperty = "observedProperty";
inline constexpr std::string_view kHasValue = "hasValue";
inline constexpr std::string_view kHasUnit = "hasUnit";
inline constexpr std::string_view kAtTime = "atTime";
inline constexpr std::string_view kLat = "lat";
inline constexpr std::string_view kLon = "lon";
inline constexpr std::string_view kInfluencedBy = "influencedBy";
inline constexpr std::string_view kHasCategory = "hasCategory";
inline constexpr std::string_view kCanonicalUnit = "canonicalUnit";
inline constexpr std::string_view kHasParticipant = "hasParticipant";
}  // namespace vocab

struct InfluenceRelation {
  std::string property;
  std::string influenced_by;
};

/// Unified ontology vocabulary: canonical properties and their units,
/// category-annotated classes, class hierarchy and influence facts.
/// All IRIs are held in expanded form.
class Vocabulary {
 public:
  explicit Vocabulary(Namespaces ns = Namespaces{});

  /// The shipped vocabulary. Its content is configuration, not a complete
  /// environmental ontology.
  static Vocabulary standard(const Namespaces& ns = Namespaces{});

  void add_unit(const std::string& unit_iri);
  void add_property(const std::string& property_iri, const std::string& unit_iri);
  /// Throws DuplicateCategory when the class already carries a category.
  void annotate_class(const std::string& class_iri, OntologyCategory category);
  void add_subclass(const std::string& sub_iri, const std::string& super_iri);
  void add_subproperty(const std::string& sub_iri, const std::string& super_iri);
  void add_influence(const std::string& property_iri, const std::string& influenced_by_iri);

  const Namespaces& ns() const noexcept { return ns_; }
  bool is_property(std::string_view iri) const;
  bool is_unit(std::string_view iri) const;
  std::optional<std::string> canonical_unit(std::string_view property_iri) const;
  std::optional<OntologyCategory> category(std::string_view class_iri) const;

  std::vector<std::string> properties() const;
  std::vector<std::string> units() const;
  const std::vector<InfluenceRelation>& influences() const noexcept { return influences_; }

  /// Vocabulary facts as triples (categories, hierarchy, units, influence).
  std::vector<Triple> to_triples() const;

 private:
  Namespaces ns_;
  std::map<std::string, std::string, std::less<>> property_units_;
  std::vector<std::string> units_;
  std::map<std::string, OntologyCategory, std::less<>> categories_;
  std::vector<std::pair<std::string, std::string>> subclasses_;
  std::vector<std::pair<std::string, std::string>> subproperties_;
  std::vector<InfluenceRelation> influences_;
};

}  // namespace semdrought
