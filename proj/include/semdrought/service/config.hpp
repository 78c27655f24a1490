#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "semdrought/cep/rule.hpp"
#include "semdrought/core/lexical.hpp"
#include "semdrought/core/vocabulary.hpp"
#include "semdrought/forecast/drought_index.hpp"
#include "semdrought/ik/indicators.hpp"

namespace semdrought::service {

struct HttpBind {
  std::string host = "127.0.0.1";
  int port = 8080;
};

struct BaselineRange {
  CalendarMonth from;
  CalendarMonth to;  // inclusive
};

struct IkSettings {
  int count = 3;
  int window_days = 90;  // compiled rule window and bulletin signal window
  double severity = 0.4;
};

/// Service configuration with every referenced file already loaded and
/// cross-checked. Relative paths resolve against the config file's directory.
struct Config {
  std::string base_iri = std::string(kDefaultBaseIri);
  std::optional<std::filesystem::path> alignment;
  std::optional<std::filesystem::path> indicators;
  std::filesystem::path rules;
  std::optional<std::filesystem::path> inference_rules;
  forecast::DviWeights weights;
  forecast::SeverityThresholds thresholds;
  /// Region id → raw sensor ids as they appear in payloads.
  std::map<std::string, std::vector<std::string>> regions;
  HttpBind http;
  std::optional<std::filesystem::path> persistence_dir;
  /// Months used for the climatology; when absent, every month before the
  /// forecast period.
  std::optional<BaselineRange> baseline;
  IkSettings ik;
  std::size_t min_baseline = forecast::kDefaultMinBaseline;

  std::vector<cep::CepRule> rule_set;  // rules file followed by the compiled IK rules
  std::vector<ik::IkIndicator> indicator_set;
  std::string inference_text;
};

/// Kinds fed to the engines by ingestion; rules may not emit them.
std::set<std::string> reserved_event_kinds(const Vocabulary& vocabulary);

/// Errors: NotFound (config or a referenced file), InvalidConfig(field).
Config load_config(const std::filesystem::path& path);
Config config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

}  // namespace semdrought::service
