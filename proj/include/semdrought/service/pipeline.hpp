#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "semdrought/cep/engine.hpp"
#include "semdrought/core/observation.hpp"
#include "semdrought/forecast/drought_index.hpp"
#include "semdrought/ik/indicators.hpp"
#include "semdrought/ingest/alignment.hpp"
#include "semdrought/ingest/raw_observation.hpp"
#include "semdrought/service/config.hpp"
#include "semdrought/store/triple_store.hpp"

namespace semdrought::service {

struct ReplaySummary {
  std::size_t parsed = 0;
  std::map<std::string, std::size_t> rejected;  // error name → lines
  std::size_t firings = 0;

  std::size_t rejected_total() const;
  nlohmann::json to_json() const;
};

/// A decoded item that has not touched any state yet.
struct Prepared {
  std::variant<CanonicalObservation, ik::IkObservation> item;
};

struct IngestResult {
  std::string region;
  std::string subject;  // observation IRI or indicator id
  std::vector<cep::Firing> firings;
};

/// Everything between the inputs and the bulletins: triple store, one CEP
/// engine per region, the IK log and the firing log. Replayed lines, HTTP
/// posts and journal restores all go through commit().
///
/// Writers take the lock exclusively; forecasts and reads share it.
class Pipeline {
 public:
  /// Replays the journal in the persistence directory, if any.
  explicit Pipeline(Config config);

  /// `csv|…`, `json|…`, `xml|…` or `ik|{…}`.
  Prepared prepare_line(std::string_view line) const;
  Prepared prepare(const ingest::RawObservation& raw) const;

  /// Order of checks: region, stream order, duplicates; then the store, the
  /// engine and the journal are updated together.
  IngestResult commit(const Prepared& item);

  /// Per-line errors are counted, never thrown. Blank and '#' lines are
  /// skipped. speed > 0 sleeps (Δt / speed) between records.
  ReplaySummary replay(std::istream& in, double speed = 0.0);
  ReplaySummary replay_file(const std::filesystem::path& path, double speed = 0.0);

  /// Period defaults to the month of the region's latest sensor reading.
  /// Errors: UnknownRegion, NoData, InsufficientBaseline.
  forecast::ForecastBulletin forecast(std::string_view region,
                                      std::optional<CalendarMonth> period = std::nullopt) const;

  /// Saturates the store, then serializes it as sorted N-Triples.
  std::string export_ntriples();
  /// Writes store.nt and firings.jsonl to the persistence directory.
  void write_snapshot();

  std::vector<std::string> rule_texts() const;
  /// Rules that read IK events, directly or through kinds emitted by such rules.
  const std::set<std::string>& ik_rules() const noexcept { return ik_rules_; }
  std::size_t events() const;
  std::vector<std::string> firing_log() const;
  store::TripleStore store_copy() const;
  bool has_region(std::string_view region) const;
  /// Events seen by a region's engine, indexed by seq - 1.
  std::vector<cep::Event> region_events(std::string_view region) const;
  const Config& config() const noexcept { return config_; }
  const Namespaces& ns() const noexcept { return ns_; }

 private:
  struct Region {
    std::string id;
    cep::Engine engine;
    std::vector<CanonicalObservation> observations;
    std::vector<cep::Event> events;
    std::optional<std::int64_t> latest_sensor;
  };

  Region& region_for(const std::string& id);
  const Region& region_for(const std::string& id) const;
  IngestResult apply(const Prepared& item, bool journal);
  std::vector<cep::Firing> push(Region& region, cep::Event event);
  void restore();

  Config config_;
  Namespaces ns_;
  Vocabulary vocabulary_;
  ingest::AlignmentTable alignment_;
  std::vector<store::InferenceRule> inference_;
  std::map<std::string, std::string> sensor_region_;  // sensor IRI → region
  std::set<std::string> ik_rules_;

  mutable std::shared_mutex mutex_;
  store::TripleStore store_;
  ik::IkKnowledge knowledge_;
  std::map<std::string, Region, std::less<>> regions_;
  std::vector<std::string> firing_log_;
  std::size_t events_ = 0;
  std::ofstream journal_;
};

nlohmann::json firing_to_json(std::string_view region, const cep::Firing& firing);

}  // namespace semdrought::service
