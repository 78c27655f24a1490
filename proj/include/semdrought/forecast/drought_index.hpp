#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semdrought/cep/engine.hpp"
#include "semdrought/core/lexical.hpp"
#include "semdrought/core/observation.hpp"
#include "semdrought/ik/indicators.hpp"

namespace semdrought::forecast {

inline constexpr std::size_t kDefaultMinBaseline = 5;

struct ClimatologyEntry {
  double mean = 0.0;
  double sd = 0.0;  // n - 1 divisor; 0 when n < 2
  std::size_t n = 0;
  std::vector<double> sorted;
  bool usable = false;  // n >= minimum and sd > 0
};

class BaselineClimatology {
 public:
  explicit BaselineClimatology(std::size_t min_count = kDefaultMinBaseline) : min_count_(min_count) {}

  void add_entry(std::string property, unsigned month, ClimatologyEntry entry);
  const ClimatologyEntry* find(std::string_view property, unsigned month) const;
  /// Throws InsufficientBaseline when the entry is missing or unusable.
  const ClimatologyEntry& usable(std::string_view property, unsigned month) const;
  std::size_t min_count() const noexcept { return min_count_; }
  const std::map<std::pair<std::string, unsigned>, ClimatologyEntry, std::less<>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::size_t min_count_;
  std::map<std::pair<std::string, unsigned>, ClimatologyEntry, std::less<>> entries_;
};

/// Groups by (property, calendar month of the timestamp).
BaselineClimatology build_climatology(std::span<const CanonicalObservation> history,
                                      std::size_t min_count = kDefaultMinBaseline);

/// One value per (sensor, property, month): precipitation summed, every
/// other property averaged. The result's timestamp is the month start.
std::vector<CanonicalObservation> monthly_aggregates(std::span<const CanonicalObservation> observations,
                                                     const Namespaces& ns);

/// (x - mu) / sigma; InsufficientBaseline unless sigma > 0.
double standardized_anomaly(double x, double mu, double sigma);
/// Weibull position r / (n + 1), r = samples <= x. InsufficientBaseline if empty.
double empirical_percentile(double x, std::span<const double> sorted_samples);

struct DviWeights {
  double precipitation = 0.4;
  double soil_moisture = 0.3;
  double temperature = 0.1;
  double ik = 0.2;
};

/// BadWeights unless non-negative and summing to 1 within 1e-9.
void validate(const DviWeights& w);

double compute_dvi(double z_precip, double sm_percentile, double z_temp, double ik_value,
                   const DviWeights& w = {});

enum class Severity { None, Watch, Warning, Severe };
std::string_view severity_name(Severity s) noexcept;

struct SeverityThresholds {
  double watch = 0.25;
  double warning = 0.5;
  double severe = 0.75;
};

/// PreconditionViolation unless 0 < watch < warning < severe <= 1.
void validate(const SeverityThresholds& t);
Severity classify_severity(double dvi, const SeverityThresholds& t = {});

struct DroughtIndexReport {
  std::string region;
  CalendarMonth period;
  double precipitation_total = 0.0;
  double soil_moisture_mean = 0.0;
  double temperature_mean = 0.0;
  double z_precip = 0.0;
  double sm_percentile = 0.0;
  double z_temp = 0.0;
  ik::IkSignal ik;
  double dvi = 0.0;
  Severity severity = Severity::None;
};

struct EvidenceItem {
  std::string rule;  // CEP rule name, or "dvi.<component>"
  std::int64_t at = 0;
  std::optional<double> contribution;  // DVI components only
};

struct ForecastBulletin {
  std::string region;
  std::int64_t issued_at = 0;
  CalendarMonth period;
  DroughtIndexReport report;
  std::vector<EvidenceItem> evidence;
  std::string summary;
};

struct BulletinRequest {
  std::string region;
  CalendarMonth period;
  std::int64_t issued_at = 0;
  /// Every observation from the region's sensors (other months are ignored).
  std::span<const CanonicalObservation> observations;
  /// Firings of the region's engine; those ending inside the period are cited.
  std::span<const cep::Firing> firings;
  /// Rules that read IK events directly or through emitted kinds; dropped
  /// from the evidence when the IK weight is zero.
  std::set<std::string> ik_rules;
  ik::IkSignal ik;
  DviWeights weights;
  SeverityThresholds thresholds;
};

/// Errors: NoData when a required property has no observation in the
/// period, InsufficientBaseline when its climatology entry is unusable.
ForecastBulletin make_bulletin(const BulletinRequest& request, const BaselineClimatology& climatology,
                               const Namespaces& ns);

/// Trailing IK window used by bulletins: (period end - days, period end].
inline constexpr std::int64_t kDefaultIkWindowDays = 90;

nlohmann::json bulletin_to_json(const ForecastBulletin& b);

}  // namespace semdrought::forecast
