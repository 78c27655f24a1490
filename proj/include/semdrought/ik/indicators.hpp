#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semdrought/cep/engine.hpp"
#include "semdrought/cep/rule.hpp"

namespace semdrought::ik {

enum class IndicatorKind { Presence, Absence, Behavior, Flowering };
enum class Valence { Drier = 1, Wetter = -1 };

std::string_view kind_name(IndicatorKind k) noexcept;
std::string_view valence_name(Valence v) noexcept;

inline constexpr std::string_view kDrierObservation = "IkDrierObservation";
inline constexpr std::string_view kWetterObservation = "IkWetterObservation";
inline constexpr std::string_view kDrierSignal = "IkDrierSignal";
inline constexpr std::string_view kWetterSignal = "IkWetterSignal";

struct IkIndicator {
  std::string id;
  std::string phenomenon;
  IndicatorKind kind = IndicatorKind::Presence;
  Valence valence = Valence::Drier;
  double weight = 1.0;
  std::set<unsigned> season;  // calendar months 1..12
  std::string region;

  friend bool operator==(const IkIndicator&, const IkIndicator&) = default;
};

struct IkObservation {
  std::string indicator_id;
  std::int64_t timestamp = 0;
  std::string region;  // empty: the indicator's region
  double confidence = 1.0;

  friend bool operator==(const IkObservation&, const IkObservation&) = default;
};

struct IkSignal {
  double value = 0.0;
  std::size_t support = 0;
};

/// Throws Error(InvalidIndicator) on missing or malformed fields and
/// Error(InvalidWeight) on a weight outside (0, 1].
IkIndicator indicator_from_json(const nlohmann::json& j);
nlohmann::json indicator_to_json(const IkIndicator& ind);
/// A JSON object (one indicator) or an array of them.
std::vector<IkIndicator> load_indicators(const std::filesystem::path& path);

/// `timestamp` may be an ISO-8601 string or epoch seconds.
IkObservation observation_from_json(const nlohmann::json& j);
nlohmann::json observation_to_json(const IkObservation& obs);

/// Indicator registry plus the append-only observation log.
class IkKnowledge {
 public:
  void register_indicator(IkIndicator ind);
  const IkIndicator* find(std::string_view id) const;
  const std::map<std::string, IkIndicator, std::less<>>& indicators() const noexcept {
    return indicators_;
  }

  /// Validates without recording; same errors as record().
  void check(const IkObservation& obs) const;
  /// Stores the observation and returns the CEP event it contributes.
  cep::Event record(IkObservation obs);
  cep::Event to_event(const IkObservation& obs) const;

  const std::vector<IkObservation>& observations() const noexcept { return log_; }

  /// Weighted mean valence over observations in `region` with timestamps
  /// in (start, end].
  IkSignal signal(std::string_view region, std::int64_t start, std::int64_t end) const;

 private:
  std::map<std::string, IkIndicator, std::less<>> indicators_;
  std::vector<IkObservation> log_;
};

/// The drier and wetter counting rules. Throws PreconditionViolation for k < 1.
std::vector<cep::CepRule> compile_indicator_rules(const IkKnowledge& knowledge, int k,
                                                  std::int64_t window_seconds,
                                                  double severity = 0.4);

}  // namespace semdrought::ik
