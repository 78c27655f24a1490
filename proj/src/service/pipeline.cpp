#include "semdrought/service/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "semdrought/cep/rule.hpp"
#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"
#include "semdrought/store/ntriples.hpp"

namespace semdrought::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t ReplaySummary::rejected_total() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : rejected) n += count;
  return n;
}

json ReplaySummary::to_json() const {
  return json{{"parsed", parsed}, {"rejected", rejected}, {"firings", firings}};
}

json firing_to_json(std::string_view region, const cep::Firing& f) {
  json observed = json::array();
  for (double v : f.observed) observed.push_back(std::isnan(v) ? json(nullptr) : json(v));
  json emitted{{"kind", f.emitted.kind}, {"timestamp", format_iso8601(f.emitted.timestamp)}, {"seq", f.emitted.seq}};
  if (f.emitted.value) emitted["value"] = *f.emitted.value;
  return json{{"region", region},
              {"rule", f.rule},
              {"window_end", format_iso8601(f.window_end)},
              {"emitted", std::move(emitted)},
              {"evidence", f.evidence},
              {"observed", std::move(observed)}};
}

namespace {

ingest::AlignmentTable make_alignment(const Config& c, const Vocabulary& vocabulary) {
  if (c.alignment) return ingest::AlignmentTable::load(*c.alignment, vocabulary);
  return ingest::AlignmentTable(vocabulary);
}

void collect_kinds(const cep::PatternExpr& e, const cep::Engine& engine, std::set<std::string>& out) {
  using N = cep::PatternExpr::Node;
  switch (e.node) {
    case N::And:
    case N::Or:
    case N::Not:
      for (const auto& c : e.children) collect_kinds(c, engine, out);
      return;
    case N::Seq:
      out.insert(engine.resolve(e.kind_b));
      [[fallthrough]];
    default:
      out.insert(engine.resolve(e.kind));
  }
}

json observation_record(const CanonicalObservation& o) {
  return json{{"sensor", o.sensor_id}, {"property", o.property}, {"value", o.value}, {"unit", o.unit},
              {"timestamp", o.timestamp}, {"lat", o.lat}, {"lon", o.lon}};
}

CanonicalObservation observation_from_record(const json& j) {
  CanonicalObservation o;
  o.sensor_id = j.at("sensor").get<std::string>();
  o.property = j.at("property").get<std::string>();
  o.value = j.at("value").get<double>();
  o.unit = j.at("unit").get<std::string>();
  o.timestamp = j.at("timestamp").get<std::int64_t>();
  o.lat = j.at("lat").get<double>();
  o.lon = j.at("lon").get<double>();
  return o;
}

std::int64_t timestamp_of(const Prepared& p) {
  return std::visit([](const auto& item) { return item.timestamp; }, p.item);
}

}  // namespace

Pipeline::Pipeline(Config config)
    : config_(std::move(config)),
      ns_(config_.base_iri),
      vocabulary_(Vocabulary::standard(ns_)),
      alignment_(make_alignment(config_, vocabulary_)) {
  inference_ = store::builtin_rules(ns_);
  if (!config_.inference_text.empty())
    for (auto& r : store::parse_inference_rules(config_.inference_text, ns_)) inference_.push_back(std::move(r));
  for (const auto& t : vocabulary_.to_triples()) store_.insert(t);
  for (const auto& ind : config_.indicator_set) knowledge_.register_indicator(ind);

  const auto reserved = reserved_event_kinds(vocabulary_);
  for (const auto& [id, sensors] : config_.regions) {
    regions_.emplace(id, Region{id, cep::Engine(config_.rule_set, ns_, reserved), {}, {}, std::nullopt});
    for (const auto& raw : sensors) sensor_region_[alignment_.sensor(raw).iri] = id;
  }

  const auto& engine = regions_.begin()->second.engine;
  std::set<std::string> tainted{std::string(ik::kDrierObservation), std::string(ik::kWetterObservation)};
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& r : config_.rule_set) {
      if (ik_rules_.contains(r.name)) continue;
      std::set<std::string> kinds;
      collect_kinds(r.pattern, engine, kinds);
      if (std::none_of(kinds.begin(), kinds.end(), [&](const auto& k) { return tainted.contains(k); })) continue;
      ik_rules_.insert(r.name);
      tainted.insert(engine.resolve(cep::KindRef{r.emit, false}));
      grew = true;
    }
  }

  if (config_.persistence_dir) {
    fs::create_directories(*config_.persistence_dir);
    restore();
    journal_.open(*config_.persistence_dir / "journal.jsonl", std::ios::app);
    if (!journal_)
      throw Error(Errc::NotFound, "cannot open journal in " + config_.persistence_dir->string(),
                  config_.persistence_dir->string());
  }
}

void Pipeline::restore() {
  const auto path = *config_.persistence_dir / "journal.jsonl";
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::vector<std::pair<std::string, std::uintmax_t>> lines;  // text, offset after it
  std::uintmax_t offset = 0;
  for (std::string line; std::getline(in, line);) {
    offset += line.size() + (in.eof() ? 0 : 1);
    if (!line.empty()) lines.emplace_back(std::move(line), offset);
  }
  in.close();
  std::uintmax_t good = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    json record;
    try {
      record = json::parse(lines[i].first);
    } catch (const json::parse_error&) {
      if (i + 1 == lines.size()) {  // torn final append
        fs::resize_file(path, good);
        break;
      }
      throw Error(Errc::Malformed, "journal line " + std::to_string(i + 1) + " is not JSON", path.string());
    }
    Prepared p;
    if (record.contains("obs")) p.item = observation_from_record(record.at("obs"));
    else p.item = ik::observation_from_json(record.at("ik"));
    apply(p, false);
    good = lines[i].second;
  }
}

Prepared Pipeline::prepare(const ingest::RawObservation& raw) const {
  auto obs = ingest::canonicalize(raw, alignment_);
  return Prepared{std::move(obs)};
}

Prepared Pipeline::prepare_line(std::string_view line) const {
  const auto bar = line.find('|');
  if (bar == std::string_view::npos) throw Error(Errc::Malformed, "replay line has no format tag");
  const auto tag = trim(line.substr(0, bar));
  const auto payload = line.substr(bar + 1);
  if (tag == "csv") return prepare(ingest::parse_csv_line(payload));
  if (tag == "json") return prepare(ingest::parse_json_observation(payload));
  if (tag == "xml") return prepare(ingest::parse_xml_observation(payload));
  if (tag == "ik") {
    json doc;
    try {
      doc = json::parse(payload);
    } catch (const json::parse_error& e) {
      throw Error(Errc::Malformed, std::string("IK payload: ") + e.what());
    }
    return Prepared{ik::observation_from_json(doc)};
  }
  throw Error(Errc::Malformed, "unknown format tag '" + std::string(tag) + "'", std::string(tag));
}

Pipeline::Region& Pipeline::region_for(const std::string& id) {
  const auto it = regions_.find(id);
  if (it == regions_.end()) throw Error(Errc::UnknownRegion, "no region " + id, id);
  return it->second;
}

const Pipeline::Region& Pipeline::region_for(const std::string& id) const {
  const auto it = regions_.find(id);
  if (it == regions_.end()) throw Error(Errc::UnknownRegion, "no region " + id, id);
  return it->second;
}

std::vector<cep::Firing> Pipeline::push(Region& region, cep::Event event) {
  auto firings = region.engine.push_event(event);
  for (const auto& f : firings) {
    region.events.push_back(f.emitted);
    firing_log_.push_back(firing_to_json(region.id, f).dump());
  }
  event.seq = region.engine.sequenced();
  region.events.push_back(std::move(event));
  ++events_;
  return firings;
}

IngestResult Pipeline::commit(const Prepared& item) {
  std::unique_lock lock(mutex_);
  return apply(item, true);
}

IngestResult Pipeline::apply(const Prepared& item, bool journal) {
  const auto out_of_order = [](const Region& r, std::int64_t ts) {
    if (!r.engine.accepts(ts))
      throw Error(Errc::OutOfOrder,
                  format_iso8601(std::max<std::int64_t>(ts, 0)) + " is behind region " + r.id, r.id);
  };

  IngestResult result;
  json record;
  if (const auto* ikobs = std::get_if<ik::IkObservation>(&item.item)) {
    knowledge_.check(*ikobs);
    const auto* ind = knowledge_.find(ikobs->indicator_id);
    result.region = ikobs->region.empty() ? ind->region : ikobs->region;
    auto& region = region_for(result.region);
    out_of_order(region, ikobs->timestamp);
    result.subject = ikobs->indicator_id;
    result.firings = push(region, knowledge_.record(*ikobs));
    record = json{{"ik", ik::observation_to_json(*ikobs)}};
  } else {
    auto obs = std::get<CanonicalObservation>(item.item);
    obs.id = mint_observation_iri(obs.sensor_id, obs.timestamp, ns_);
    const auto it = sensor_region_.find(obs.sensor_id);
    if (it == sensor_region_.end())
      throw Error(Errc::UnknownSensor, "sensor " + obs.sensor_id + " belongs to no region", obs.sensor_id);
    auto& region = region_for(it->second);
    out_of_order(region, obs.timestamp);
    const auto triples = observation_to_triples(obs, ns_);
    if (store_.contains(triples.front()))
      throw Error(Errc::DuplicateObservation, obs.id + " is already stored", obs.id);
    for (const auto& t : triples) store_.insert(t);

    cep::Event event;
    event.kind = obs.property;
    event.timestamp = obs.timestamp;
    event.value = obs.value;
    event.attributes["sensor"] = obs.sensor_id;
    event.attributes["observation"] = obs.id;
    result.region = region.id;
    result.subject = obs.id;
    region.latest_sensor = std::max(region.latest_sensor.value_or(obs.timestamp), obs.timestamp);
    record = json{{"obs", observation_record(obs)}};
    region.observations.push_back(std::move(obs));
    result.firings = push(region, std::move(event));
  }
  if (journal && journal_.is_open()) journal_ << record.dump() << '\n' << std::flush;
  return result;
}

ReplaySummary Pipeline::replay(std::istream& in, double speed) {
  ReplaySummary summary;
  std::optional<std::int64_t> previous;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      const auto prepared = prepare_line(line);
      if (speed > 0.0) {
        const auto ts = timestamp_of(prepared);
        if (previous && ts > *previous)
          std::this_thread::sleep_for(std::chrono::duration<double>(static_cast<double>(ts - *previous) / speed));
        previous = std::max(previous.value_or(ts), ts);
      }
      summary.firings += commit(prepared).firings.size();
      ++summary.parsed;
    } catch (const Error& e) {
      ++summary.rejected[std::string(e.name())];
    } catch (const json::exception&) {
      ++summary.rejected[std::string(errc_name(Errc::Malformed))];
    }
  }
  if (config_.persistence_dir) write_snapshot();
  return summary;
}

ReplaySummary Pipeline::replay_file(const fs::path& path, double speed) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, "cannot open dataset " + path.string(), path.string());
  return replay(in, speed);
}

forecast::ForecastBulletin Pipeline::forecast(std::string_view region_id, std::optional<CalendarMonth> period) const {
  forecast::BulletinRequest req;
  std::vector<CanonicalObservation> history, current;
  std::vector<cep::Firing> firings;
  {
    std::shared_lock lock(mutex_);
    const auto& region = region_for(std::string(region_id));
    if (!region.latest_sensor) throw Error(Errc::NoData, "no observations for region " + region.id, region.id);
    req.region = region.id;
    req.period = period.value_or(month_of(*region.latest_sensor));
    const auto start = month_start(req.period);
    const auto end = month_start(next_month(req.period));
    req.issued_at = std::min(end - 1, *region.latest_sensor);

    std::int64_t from = 0, to = start;
    if (config_.baseline) {
      from = month_start(config_.baseline->from);
      to = month_start(next_month(config_.baseline->to));
    }
    for (const auto& o : region.observations) {
      if (o.timestamp >= from && o.timestamp < to) history.push_back(o);
      if (o.timestamp >= start && o.timestamp < end) current.push_back(o);
    }
    for (const auto& e : region.events) {
      const auto rule = e.attributes.find("rule");
      if (rule == e.attributes.end() || e.timestamp < start || e.timestamp >= end) continue;
      cep::Firing f;
      f.rule = rule->second;
      f.window_end = e.timestamp;
      firings.push_back(std::move(f));
    }
    req.ik = knowledge_.signal(region.id, end - 1 - std::int64_t{config_.ik.window_days} * 86400, end - 1);
  }

  const auto climatology = forecast::build_climatology(forecast::monthly_aggregates(history, ns_), config_.min_baseline);
  req.observations = current;
  req.firings = firings;
  req.ik_rules = ik_rules_;
  req.weights = config_.weights;
  req.thresholds = config_.thresholds;
  return forecast::make_bulletin(req, climatology, ns_);
}

std::string Pipeline::export_ntriples() {
  std::unique_lock lock(mutex_);
  store_.saturate(inference_);
  return store::serialize(store_);
}

void Pipeline::write_snapshot() {
  if (!config_.persistence_dir) return;
  const auto text = export_ntriples();
  std::string firings;
  {
    std::shared_lock lock(mutex_);
    for (const auto& line : firing_log_) firings += line + '\n';
  }
  store::write_atomically(*config_.persistence_dir / "store.nt", text);
  store::write_atomically(*config_.persistence_dir / "firings.jsonl", firings);
}

std::vector<std::string> Pipeline::rule_texts() const {
  std::vector<std::string> out;
  for (const auto& r : config_.rule_set) out.push_back(cep::print_rule(r));
  return out;
}

std::size_t Pipeline::events() const {
  std::shared_lock lock(mutex_);
  return events_;
}

std::vector<std::string> Pipeline::firing_log() const {
  std::shared_lock lock(mutex_);
  return firing_log_;
}

store::TripleStore Pipeline::store_copy() const {
  std::shared_lock lock(mutex_);
  return store_;
}

bool Pipeline::has_region(std::string_view region) const { return regions_.find(region) != regions_.end(); }

std::vector<cep::Event> Pipeline::region_events(std::string_view region) const {
  std::shared_lock lock(mutex_);
  return region_for(std::string(region)).events;
}

}  // namespace semdrought::service
