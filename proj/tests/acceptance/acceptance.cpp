// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "semdrought/cep/kernels.hpp"
#include "semdrought/core/error.hpp"
#include "semdrought/forecast/drought_index.hpp"
#include "semdrought/ingest/alignment.hpp"
#include "semdrought/ingest/raw_observation.hpp"
#include "semdrought/service/http.hpp"
#include "semdrought/service/pipeline.hpp"
#include "semdrought/store/ntriples.hpp"
#include "support/alignment_fixture.hpp"
#include "support/cep_harness.hpp"
#include "support/formats.hpp"
#include "support/scenario.hpp"
#include "support/service_fixture.hpp"
#include "support/store_oracles.hpp"

using namespace semdrought;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  double limit_seconds = 0.0;  // 0: no runtime bound
};

/// Collects the first failure; later checks still run.
class Checker {
 public:
  void require(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && first_failure_.empty()) first_failure_ = what;
  }
  bool ok() const { return first_failure_.empty(); }
  std::size_t checks() const { return checks_; }
  const std::string& failure() const { return first_failure_; }

 private:
  std::size_t checks_ = 0;
  std::string first_failure_;
};

Outcome finish(const Checker& c, std::string detail, double limit_seconds = 0.0) {
  if (!c.ok()) return {false, c.failure(), limit_seconds};
  return {true, std::move(detail) + ", " + std::to_string(c.checks()) + " checks", limit_seconds};
}

std::string ntriples_block(const CanonicalObservation& o, const Namespaces& ns) {
  std::vector<std::string> lines;
  for (const auto& t : observation_to_triples(o, ns))
    lines.push_back(store::to_ntriples(t.subject) + " " + store::to_ntriples(t.predicate) + " " +
                    store::to_ntriples(t.object) + " .\n");
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

Outcome cross_format() {
  const auto table = ingest::AlignmentTable::from_json(testing::kAlignmentJson, Vocabulary::standard());
  const auto& ns = table.vocabulary().ns();
  const std::vector<std::string> sensors = {"s1", "s2", "S1", "st-9", "gw_12", "a&b"};
  const std::vector<std::pair<std::string, std::string>> term_units = {
      {"soil_hum", "%"}, {"SM", "pct"}, {"vwc", "%"},   {"rain", "in"},  {"precip_mm", "mm"},
      {"t_air", "degF"}, {"temp", "C"}, {"rh", "rh%"}, {"wind", "km/h"}};
  std::mt19937_64 rng(20230601);
  Checker c;
  for (int i = 0; i < 200; ++i) {
    testing::LogicalObservation lo;
    lo.sensor = sensors[rng() % sensors.size()];
    std::tie(lo.property, lo.unit) = term_units[rng() % term_units.size()];
    lo.value = testing::random_real(rng, -40, 300);
    if (rng() % 2) lo.value = std::round(lo.value * 10) / 10;
    lo.timestamp = testing::random_int(rng, 0, 4102444800);
    const bool registered = lo.sensor == "s1" || lo.sensor == "s2";
    if (!registered || rng() % 3 != 0) {
      lo.lat = testing::random_real(rng, -90, 90);
      lo.lon = testing::random_real(rng, -180, 180);
    }
    const auto tag = "observation " + std::to_string(i);
    const auto csv = ingest::canonicalize(ingest::parse_csv_line(testing::render_csv(lo)), table);
    const auto js = ingest::canonicalize(ingest::parse_json_observation(testing::render_json(lo)), table);
    const auto xml = ingest::canonicalize(ingest::parse_xml_observation(testing::render_xml(lo)), table);
    c.require(csv == js && js == xml, tag + ": canonical fields differ across formats");
    const auto a = ntriples_block(csv, ns);
    c.require(a == ntriples_block(js, ns) && a == ntriples_block(xml, ns),
              tag + ": serialized triples differ across formats");
  }
  return finish(c, "200 observations x 3 formats", 5.0);
}

Outcome inference_oracle() {
  std::mt19937_64 rng(4242);
  Checker c;
  std::size_t derived = 0;
  for (int round = 0; round < 100; ++round) {
    const auto triples = testing::random_triples(rng, 50);
    std::vector<store::InferenceRule> rules;
    const auto n = 1 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) rules.push_back(testing::random_rule(rng, int(i)));
    store::TripleStore s;
    for (const auto& t : triples) s.insert(t);
    derived += s.saturate(rules);
    const auto got = s.triples();
    const auto want = testing::oracle_fixpoint({triples.begin(), triples.end()}, rules);
    c.require(std::set<Triple>(got.begin(), got.end()) == want,
              "store " + std::to_string(round) + ": saturation differs from the fixpoint oracle");
  }
  return finish(c, "100 stores, " + std::to_string(derived) + " derived triples", 10.0);
}

Outcome cep_oracle() {
  std::mt19937_64 rng(777);
  Checker c;
  std::size_t events = 0, firings = 0;
  for (int round = 0; round < 50; ++round) {
    std::vector<cep::CepRule> rules;
    const auto n = 1 + rng() % 10;
    for (std::size_t i = 0; i < n; ++i) rules.push_back(testing::random_cep_rule(rng, int(i)));
    const auto stream = testing::random_stream(rng, 1000);
    const auto until = stream.back().ts + 86400;
    const auto got = testing::run_engine(rules, stream, until);
    const auto want = testing::oracle_cep(rules, stream, until);
    const auto diff = testing::compare_firings(got, want, 1e-9);
    c.require(diff.empty(), "stream " + std::to_string(round) + ": " + diff);
    events += stream.size();
    firings += want.size();
  }
  return finish(c, "50 streams, " + std::to_string(events) + " events, " + std::to_string(firings) + " firings",
                30.0);
}

Outcome numeric_kernels() {
  Checker c;
  std::mt19937_64 rng(31337);
  double worst_slope = 0.0, worst_clim = 0.0;
  for (int round = 0; round < 1000; ++round) {
    std::vector<cep::TimedValue> pts;
    std::int64_t t = 1600000000 + testing::random_int(rng, 0, 100000);
    const auto n = 2 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      t += testing::random_int(rng, 1, 7200);
      pts.emplace_back(t, testing::random_real(rng, -50, 50));
    }
    long double mx = 0, my = 0;
    for (const auto& [ts, v] : pts) mx += static_cast<long double>(ts - pts.front().first) / 86400, my += v;
    mx /= n, my /= n;
    long double num = 0, den = 0;
    for (const auto& [ts, v] : pts) {
      const long double dx = static_cast<long double>(ts - pts.front().first) / 86400 - mx;
      num += dx * (v - my), den += dx * dx;
    }
    const double delta = std::fabs(cep::slope(pts) - static_cast<double>(num / den));
    worst_slope = std::max(worst_slope, delta);
    c.require(delta <= 1e-9, "slope case " + std::to_string(round) + ": |delta| " + std::to_string(delta));
  }

  const Namespaces ns;
  for (int round = 0; round < 1000; ++round) {
    std::vector<CanonicalObservation> history;
    std::vector<double> values;
    const double scale = std::pow(10.0, static_cast<int>(rng() % 4) - 1);
    const unsigned month = 1 + rng() % 12;
    const auto n = 2 + rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      CanonicalObservation o;
      o.property = ns.ex("precipitation");
      o.value = scale * testing::random_real(rng, 0, 100);
      o.timestamp = month_start({2000 + static_cast<int>(i), month}) + testing::random_int(rng, 0, 86400 * 27);
      history.push_back(o);
      values.push_back(o.value);
    }
    long double m = 0;
    for (double v : values) m += v;
    m /= values.size();
    long double ss = 0;
    for (double v : values) ss += (v - m) * (v - m);
    const double sd = static_cast<double>(std::sqrt(ss / (values.size() - 1)));
    const auto clim = forecast::build_climatology(history);
    const auto* e = clim.find(ns.ex("precipitation"), month);
    c.require(e != nullptr, "climatology case " + std::to_string(round) + ": entry missing");
    if (!e) continue;
    const double delta = std::max(std::fabs(e->mean - static_cast<double>(m)), std::fabs(e->sd - sd));
    worst_clim = std::max(worst_clim, delta);
    c.require(delta <= 1e-9, "climatology case " + std::to_string(round) + ": |delta| " + std::to_string(delta));
  }
  std::ostringstream detail;
  detail << "1000 slopes (max |delta| " << worst_slope << "), 1000 climatologies (max |delta| " << worst_clim
         << ")";
  return finish(c, detail.str());
}

Outcome dvi_properties() {
  using namespace forecast;
  Checker c;
  std::mt19937_64 rng(9001);
  std::uniform_real_distribution<double> z(-4, 4), p(0, 1), k(-1, 1), w(0, 1);

  for (const auto& [below, at, expect_below, expect_at] :
       {std::tuple{std::nextafter(0.25, 0.0), 0.25, Severity::None, Severity::Watch},
        std::tuple{std::nextafter(0.5, 0.0), 0.5, Severity::Watch, Severity::Warning},
        std::tuple{std::nextafter(0.75, 0.0), 0.75, Severity::Warning, Severity::Severe}}) {
    c.require(classify_severity(below) == expect_below, "classify just below " + std::to_string(at));
    c.require(classify_severity(at) == expect_at, "classify at " + std::to_string(at));
  }

  const Namespaces ns;
  const auto t0 = month_start({2023, 6}) + 3600;
  BaselineClimatology clim;
  clim.add_entry(ns.ex("precipitation"), 6, {50, 10, 9, {}, true});
  clim.add_entry(ns.ex("airTemperature"), 6, {20, 2, 9, {}, true});
  clim.add_entry(ns.ex("soilMoisture"), 6, {14, 2.7, 9, {10, 11, 12, 13, 14, 15, 16, 17, 18}, true});
  const auto observation = [&](const char* property, std::int64_t ts, double v) {
    CanonicalObservation o;
    o.sensor_id = ns.ex("sensor/a");
    o.property = ns.ex(property);
    o.value = v;
    o.timestamp = ts;
    return o;
  };
  const auto firing = [](std::string rule, std::int64_t end) {
    return cep::Firing{std::move(rule), end, cep::Event{}, {}, {}};
  };

  for (int i = 0; i < 10000; ++i) {
    double a = w(rng), b = w(rng), cc = w(rng), d = w(rng);
    const double s = a + b + cc + d;
    DviWeights weights{a / s, b / s, cc / s, 0.0};
    weights.ik = std::max(0.0, 1.0 - (weights.precipitation + weights.soil_moisture + weights.temperature));
    const double zp = z(rng), sp = p(rng), zt = z(rng), ik = k(rng);
    const double base = compute_dvi(zp, sp, zt, ik, weights);
    const auto tag = "tuple " + std::to_string(i);
    c.require(base >= 0.0 && base <= 1.0, tag + ": dvi outside [0, 1]");
    c.require(compute_dvi(zp - std::fabs(z(rng)), sp, zt, ik, weights) >= base, tag + ": not monotone in z_precip");
    c.require(compute_dvi(zp, sp * p(rng), zt, ik, weights) >= base, tag + ": not monotone in sm_percentile");
    c.require(compute_dvi(zp, sp, zt + std::fabs(z(rng)), ik, weights) >= base, tag + ": not monotone in z_temp");
    c.require(compute_dvi(zp, sp, zt, ik + (1 - ik) * p(rng), weights) >= base, tag + ": not monotone in IK");

    // w_ik = 0: the bulletin ignores the IK signal and IK-derived firings.
    const std::vector<CanonicalObservation> obs = {observation("precipitation", t0, 50 + 10 * z(rng)),
                                                   observation("soilMoisture", t0 + 60, 9 + 10 * p(rng)),
                                                   observation("airTemperature", t0 + 120, 20 + 2 * z(rng))};
    BulletinRequest req;
    req.region = "r";
    req.period = {2023, 6};
    req.issued_at = month_start({2023, 7}) - 1;
    req.observations = obs;
    req.ik_rules = {"ik_drier", "drought_watch"};
    req.weights = {weights.precipitation + weights.ik, weights.soil_moisture, weights.temperature, 0.0};
    std::vector<cep::Firing> firings = {firing("dry_spell", t0 + 86400)};
    req.firings = firings;
    req.ik = {k(rng), static_cast<std::size_t>(rng() % 10)};
    const auto reference = bulletin_to_json(make_bulletin(req, clim, ns)).dump();
    std::vector<cep::Firing> perturbed_firings = firings;
    for (int f = 0, nf = static_cast<int>(rng() % 4); f < nf; ++f)
      perturbed_firings.push_back(firing(rng() % 2 ? "ik_drier" : "drought_watch", t0 + (f + 2) * 86400));
    req.firings = perturbed_firings;
    req.ik = {k(rng), static_cast<std::size_t>(rng() % 10)};
    c.require(bulletin_to_json(make_bulletin(req, clim, ns)).dump() == reference,
              tag + ": bulletin changed with the IK weight at zero");
  }

  // The same switch through the whole service: perturbed or missing IK
  // reports leave every bulletin unchanged.
  const json ablation{{"weights", {{"precipitation", 0.5}, {"soil_moisture", 0.3}, {"temperature", 0.2}, {"ik", 0.0}}}};
  const auto months = testing::make_drought_scenario().months;
  std::vector<std::string> reference;
  for (const auto& opt : {testing::ScenarioOptions{.ik_confidence_scale = 1.0},
                          testing::ScenarioOptions{.ik_confidence_scale = 0.3},
                          testing::ScenarioOptions{.ik = false}}) {
    service::Pipeline p(testing::shipped_config(ablation));
    std::istringstream in(testing::make_drought_scenario(opt).dataset);
    p.replay(in);
    std::vector<std::string> bulletins;
    for (int m = testing::kBaselineMonths + 1; m <= 36; ++m)
      bulletins.push_back(forecast::bulletin_to_json(p.forecast("free_state", months[m - 1].month)).dump());
    if (reference.empty()) reference = bulletins;
    c.require(bulletins == reference, "service bulletins changed with the IK weight at zero");
  }
  return finish(c, "10000 tuples, boundaries exact, 3 scenario variants");
}

std::string month_name(CalendarMonth m) { return format_year_month(m); }

Outcome drought_scenario() {
  Checker c;
  const auto sc = testing::make_drought_scenario();
  testing::TempDir dir;
  testing::write_text(dir / "dataset.txt", sc.dataset);
  testing::write_text(dir / "manifest.json", sc.manifest.to_json().dump(2));
  const auto manifest = json::parse(testing::read_text(dir / "manifest.json"));

  const auto start = std::chrono::steady_clock::now();
  service::Pipeline p(testing::shipped_config());
  const auto summary = p.replay_file(dir / "dataset.txt");
  std::vector<forecast::ForecastBulletin> bulletins;
  for (const auto& e : sc.months) bulletins.push_back(p.forecast("free_state", e.month));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  c.require(summary.parsed == manifest.at("parsed").get<std::size_t>(),
            "parsed " + std::to_string(summary.parsed) + " vs manifest " + manifest.at("parsed").dump());
  c.require(json(summary.rejected) == manifest.at("rejected"),
            "rejected " + json(summary.rejected).dump() + " vs manifest " + manifest.at("rejected").dump());

  std::string severities;
  for (std::size_t i = 0; i < sc.months.size(); ++i) {
    const auto& e = sc.months[i];
    const auto& r = bulletins[i].report;
    const auto tag = month_name(e.month) + " (" + std::string(forecast::severity_name(r.severity)) + ", DVI " +
                     std::to_string(r.dvi) + ")";
    if (e.engineered) {
      c.require(r.severity >= forecast::Severity::Warning, tag + ": engineered month below Warning");
      severities += std::string(severities.empty() ? "" : " ") + std::string(forecast::severity_name(r.severity));
    }
    if (e.baseline) c.require(r.severity <= forecast::Severity::Watch, tag + ": baseline month above Watch");
    c.require(std::fabs(r.precipitation_total - e.precipitation_total) <= 1e-9, tag + ": precipitation total");
    c.require(std::fabs(r.z_precip - e.z_precip) <= 1e-9, tag + ": z_precip");
    c.require(std::fabs(r.sm_percentile - e.sm_percentile) <= 1e-9, tag + ": soil moisture percentile");
    c.require(std::fabs(r.z_temp - e.z_temp) <= 1e-9, tag + ": z_temp");
  }

  const auto first = month_start(sc.months[testing::kEngineeredFirst - 1].month);
  const auto last = month_start(next_month(sc.months[testing::kEngineeredLast - 1].month));
  std::size_t ik_drier = 0;
  for (const auto& line : p.firing_log()) {
    const auto f = json::parse(line);
    if (f.at("rule") != "ik_drier") continue;
    const auto end = parse_iso8601(f.at("window_end").get<std::string>());
    c.require(end && *end >= first && *end < last, "ik_drier fired outside the engineered months");
    ++ik_drier;
  }
  c.require(ik_drier > 0, "ik_drier never fired in the engineered months");
  c.require(seconds < 10.0, "replay and forecasts took " + std::to_string(seconds) + " s");

  std::ostringstream detail;
  detail << summary.parsed << " lines parsed, " << summary.rejected_total() << " rejected, engineered months "
         << severities << ", ik_drier fired " << ik_drier << "x, " << std::fixed << std::setprecision(2) << seconds
         << " s";
  return finish(c, detail.str());
}

Outcome determinism() {
  Checker c;
  const auto sc = testing::make_drought_scenario({.seed = 77});
  const auto run = [&](service::Pipeline& p) {
    std::istringstream in(sc.dataset);
    p.replay(in);
  };
  service::Pipeline a(testing::shipped_config()), b(testing::shipped_config());
  run(a);
  run(b);
  c.require(a.firing_log() == b.firing_log(), "firing logs differ between replays");
  const auto export_a = a.export_ntriples();
  c.require(export_a == b.export_ntriples(), "exported stores differ between replays");

  const auto loaded = store::load(export_a).triples();
  const auto original = a.store_copy().triples();
  c.require(std::set<Triple>(loaded.begin(), loaded.end()) == std::set<Triple>(original.begin(), original.end()),
            "export/load round trip is not set-equal");

  testing::TempDir dir;
  {
    service::Pipeline persisted(testing::shipped_config({{"persistence_dir", dir.path().string()}}));
    run(persisted);
    persisted.write_snapshot();
    c.require(testing::read_text(dir / "store.nt") == export_a, "snapshot differs from the export");
  }
  service::Pipeline restored(testing::shipped_config({{"persistence_dir", dir.path().string()}}));
  c.require(restored.firing_log() == a.firing_log(), "restored firing log differs");
  c.require(restored.export_ntriples() == export_a, "restored store differs");

  return finish(c, std::to_string(a.firing_log().size()) + " firings, " + std::to_string(original.size()) +
                       " triples, restore equal");
}

Outcome dissemination() {
  Checker c;
  service::Pipeline p(testing::shipped_config());
  std::istringstream in(testing::make_drought_scenario().dataset);
  p.replay(in);

  service::HttpServer server(p);
  const int port = server.bind("127.0.0.1", 0);
  std::thread thread([&] { server.listen(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  const auto get_json = [&](const std::string& path, int expect) -> json {
    const auto res = client.Get(path);
    c.require(res && res->status == expect, "GET " + path + " status " + (res ? std::to_string(res->status) : "none"));
    return res ? json::parse(res->body, nullptr, false) : json();
  };
  const auto post_json = [&](const std::string& path, const json& body) -> json {
    const auto res = client.Post(path, body.dump(), "application/json");
    c.require(res && res->status == 200,
              "POST " + path + " status " + (res ? std::to_string(res->status) + " " + res->body : "none"));
    return res ? json::parse(res->body, nullptr, false) : json();
  };

  const auto before = get_json("/forecast?region=free_state&period=2023-12", 200);
  const auto obs = post_json("/observations", {{"sensor_id", "fs01"},
                                               {"property", "rain"},
                                               {"value", 12.5},
                                               {"unit", "mm"},
                                               {"timestamp", "2023-12-31T23:00:00Z"}});
  c.require(obs.value("status", "") == "accepted" && obs.value("region", "") == "free_state",
            "observation not accepted: " + obs.dump());
  const auto ik = post_json("/ik", {{"indicatorId", "sifennefene_worms_abundant"},
                                    {"timestamp", "2023-12-31T23:30:00Z"},
                                    {"region", "free_state"},
                                    {"confidence", 0.9}});
  c.require(ik.value("status", "") == "accepted", "IK observation not accepted: " + ik.dump());
  const auto after = get_json("/forecast?region=free_state&period=2023-12", 200);

  if (before.is_object() && after.is_object()) {
    const double added = 12.5 / 3.0;
    c.require(std::fabs(after["precipitation_total"].get<double>() - before["precipitation_total"].get<double>() -
                        added) <= 1e-9,
              "bulletin precipitation does not include the posted observation");
    c.require(after["ik"]["support"].get<std::size_t>() == before["ik"]["support"].get<std::size_t>() + 1,
              "bulletin IK support does not include the posted IK observation");
    c.require(after["ik"]["value"].get<double>() < before["ik"]["value"].get<double>() + 1e-12,
              "a wetter report did not lower the IK signal");
    c.require(after["evidence"].is_array() && !after["evidence"].empty(), "bulletin evidence is empty");
    c.require(after["issued_at"] == "2023-12-31T23:00:00Z", "issued_at ignores the posted observation");
  }

  const auto health = get_json("/health", 200);
  c.require(health.is_object() && health.size() == 2 && health.value("status", "") == "ok" &&
                health.contains("events") && health["events"].is_number_unsigned() &&
                health["events"].get<std::size_t>() == p.events(),
            "/health schema: " + health.dump());
  const auto rules = get_json("/rules", 200);
  bool rules_ok = rules.is_object() && rules.contains("rules") && rules["rules"].is_array() &&
                  rules["rules"].size() == p.config().rule_set.size();
  if (rules_ok)
    for (const auto& r : rules["rules"])
      rules_ok = rules_ok && r.is_object() && r.size() == 3 && r.contains("name") && r["name"].is_string() &&
                 r.contains("text") && r["text"].is_string() && r.contains("ik") && r["ik"].is_boolean();
  c.require(rules_ok, "/rules schema: " + rules.dump());
  const auto missing = get_json("/forecast?region=atlantis", 404);
  c.require(missing.value("error", "") == "UnknownRegion", "unknown region body: " + missing.dump());

  server.stop();
  thread.join();
  return finish(c, "port " + std::to_string(port) + ", bulletin reflects both posts");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"A1 cross-format equivalence", cross_format},
      {"A2 inference oracle", inference_oracle},
      {"A3 CEP oracle", cep_oracle},
      {"A4 numeric kernels", numeric_kernels},
      {"A5 DVI properties", dvi_properties},
      {"A6 end-to-end drought scenario", drought_scenario},
      {"A7 determinism and persistence", determinism},
      {"A8 dissemination contract", dissemination},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && o.limit_seconds > 0 && seconds >= o.limit_seconds) {
      o.pass = false;
      o.detail = "took " + std::to_string(seconds) + " s, limit " + std::to_string(o.limit_seconds) + " s";
    }
    std::ostringstream line;
    line << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << std::fixed << std::setprecision(2)
         << seconds << " s]";
    std::cout << line.str() << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
