#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "semdrought/cep/rule.hpp"
#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"
#include "semdrought/ik/indicators.hpp"

using namespace semdrought;
using namespace semdrought::ik;

namespace {

IkIndicator indicator(std::string id, Valence v, double w, std::set<unsigned> season = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12},
                      std::string region = "free_state") {
  return IkIndicator{std::move(id), "", IndicatorKind::Behavior, v, w, std::move(season), std::move(region)};
}

std::int64_t at(int year, unsigned month, int day = 10) {
  return month_start({year, month}) + (day - 1) * 86400;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::PreconditionViolation;
}

}  // namespace

TEST_CASE("register_indicator") {
  IkKnowledge k;
  k.register_indicator(indicator("lehota_frogs_silent", Valence::Drier, 0.8));
  REQUIRE(k.find("lehota_frogs_silent"));
  CHECK(k.find("lehota_frogs_silent")->weight == 0.8);
  CHECK(code_of([&] { k.register_indicator(indicator("lehota_frogs_silent", Valence::Wetter, 0.5)); }) ==
        Errc::DuplicateId);
  CHECK(code_of([&] { k.register_indicator(indicator("w0", Valence::Drier, 0.0)); }) == Errc::InvalidWeight);
  CHECK(code_of([&] { k.register_indicator(indicator("w1", Valence::Drier, 1.01)); }) == Errc::InvalidWeight);
  CHECK(code_of([&] { k.register_indicator(indicator("w2", Valence::Drier, 0.3, {})); }) == Errc::InvalidIndicator);
  k.register_indicator(indicator("w3", Valence::Drier, 1.0));
  CHECK(k.indicators().size() == 2);
}

TEST_CASE("indicator JSON") {
  const auto j = nlohmann::json::parse(
      R"({"id": "lehota_frogs_silent", "phenomenon": "lehota frogs not calling", "kind": "absence",
          "valence": "drier", "weight": 0.8, "season": [9,10,11], "region": "free_state"})");
  const auto ind = indicator_from_json(j);
  CHECK(ind.kind == IndicatorKind::Absence);
  CHECK(ind.valence == Valence::Drier);
  CHECK(ind.season == std::set<unsigned>{9, 10, 11});
  CHECK(indicator_from_json(indicator_to_json(ind)) == ind);

  auto bad = j;
  bad["kind"] = "rumour";
  CHECK(code_of([&] { indicator_from_json(bad); }) == Errc::InvalidIndicator);
  bad = j;
  bad["weight"] = 0;
  CHECK(code_of([&] { indicator_from_json(bad); }) == Errc::InvalidWeight);
  bad = j;
  bad["season"] = nlohmann::json::array({13});
  CHECK(code_of([&] { indicator_from_json(bad); }) == Errc::InvalidIndicator);
  bad = j;
  bad.erase("valence");
  CHECK(code_of([&] { indicator_from_json(bad); }) == Errc::InvalidIndicator);

  const auto path = std::filesystem::temp_directory_path() / "semdrought_ik_test.json";
  std::ofstream(path) << nlohmann::json::array({j, indicator_to_json(indicator("x", Valence::Wetter, 0.5))}).dump();
  CHECK(load_indicators(path).size() == 2);
  std::filesystem::remove(path);
  CHECK(code_of([&] { load_indicators(path); }) == Errc::NotFound);
}

TEST_CASE("record_ik_observation") {
  IkKnowledge k;
  k.register_indicator(indicator("frogs", Valence::Drier, 0.8, {9, 10, 11}));
  k.register_indicator(indicator("birds", Valence::Wetter, 0.5));

  const auto e = k.record({"frogs", at(2023, 10), "", 1.0});
  CHECK(e.kind == "IkDrierObservation");
  CHECK(e.value == 0.8);
  CHECK(e.timestamp == at(2023, 10));
  CHECK(e.attributes.at("region") == "free_state");

  const auto w = k.record({"birds", at(2023, 1), "free_state", 0.5});
  CHECK(w.kind == "IkWetterObservation");
  CHECK(w.value == 0.25);

  CHECK(code_of([&] { k.record({"frogs", at(2023, 3), "", 1.0}); }) == Errc::OutOfSeason);
  CHECK(code_of([&] { k.record({"nobody", at(2023, 3), "", 1.0}); }) == Errc::UnknownIndicator);
  CHECK(code_of([&] { k.record({"birds", at(2023, 3), "", 1.5}); }) == Errc::BadConfidence);
  CHECK(code_of([&] { k.record({"birds", at(2023, 3), "", NAN}); }) == Errc::BadConfidence);
  CHECK(k.observations().size() == 2);

  // season boundaries use the UTC calendar month
  CHECK_NOTHROW(k.check({"frogs", month_start({2023, 9}), "", 1.0}));
  CHECK(code_of([&] { k.check({"frogs", month_start({2023, 9}) - 1, "", 1.0}); }) == Errc::OutOfSeason);
  CHECK(code_of([&] { k.check({"frogs", month_start({2023, 12}), "", 1.0}); }) == Errc::OutOfSeason);
}

TEST_CASE("IK observation JSON") {
  const auto obs = observation_from_json(nlohmann::json::parse(
      R"({"indicatorId": "frogs", "timestamp": "2023-10-01T06:00:00Z", "region": "free_state", "confidence": 0.9})"));
  CHECK(obs.indicator_id == "frogs");
  CHECK(obs.timestamp == *parse_iso8601("2023-10-01T06:00:00Z"));
  CHECK(obs.confidence == 0.9);
  CHECK(observation_from_json(observation_to_json(obs)) == obs);
  CHECK(observation_from_json(nlohmann::json::parse(R"({"indicatorId": "f", "timestamp": 5})")).confidence == 1.0);
  CHECK(code_of([] { observation_from_json(nlohmann::json::parse(R"({"timestamp": 5})")); }) == Errc::MissingKey);
  CHECK(code_of([] { observation_from_json(nlohmann::json::parse(R"({"indicatorId": "f", "timestamp": "yesterday"})")); }) ==
        Errc::BadTimestamp);
  CHECK(code_of([] { observation_from_json(nlohmann::json::parse(R"({"indicatorId": 3, "timestamp": 5})")); }) ==
        Errc::WrongType);
}

TEST_CASE("ik_signal examples") {
  IkKnowledge k;
  k.register_indicator(indicator("d1", Valence::Drier, 1.0));
  k.register_indicator(indicator("d08", Valence::Drier, 0.8));
  k.register_indicator(indicator("d05", Valence::Drier, 0.5));
  k.register_indicator(indicator("w05", Valence::Wetter, 0.5));
  k.register_indicator(indicator("w06", Valence::Wetter, 0.6));
  const auto t = at(2023, 5);

  CHECK(k.signal("free_state", 0, t).support == 0);
  CHECK(k.signal("free_state", 0, t).value == 0);

  IkKnowledge one = k;
  one.record({"d1", t, "", 1.0});
  CHECK(one.signal("free_state", t - 1, t).value == 1.0);
  CHECK(one.signal("free_state", t - 1, t).support == 1);
  CHECK(one.signal("free_state", t, t + 10).support == 0);  // start is exclusive
  CHECK(one.signal("elsewhere", t - 1, t).support == 0);

  IkKnowledge two = k;
  two.record({"d05", t, "", 1.0});
  two.record({"w05", t, "", 1.0});
  CHECK(two.signal("free_state", 0, t).value == 0.0);
  CHECK(two.signal("free_state", 0, t).support == 2);

  IkKnowledge three = k;
  three.record({"d08", t, "", 1.0});
  three.record({"d05", t + 1, "", 0.5});
  three.record({"w06", t + 2, "", 1.0});
  const auto s = three.signal("free_state", 0, t + 2);
  const double oracle = (0.8 * 1.0 + 0.5 * 0.5 - 0.6 * 1.0) / (0.8 * 1.0 + 0.5 * 0.5 + 0.6 * 1.0);
  CHECK(std::fabs(s.value - oracle) <= 1e-12);
  CHECK(std::fabs(s.value - 0.272727272727) <= 1e-9);
  CHECK(s.support == 3);
}

TEST_CASE("property: ik_signal bounds, antisymmetry, scale invariance, support") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int round = 0; round < 300; ++round) {
    const int n_ind = 1 + static_cast<int>(rng() % 6);
    std::vector<IkIndicator> inds;
    for (int i = 0; i < n_ind; ++i)
      inds.push_back(indicator("i" + std::to_string(i), rng() % 2 ? Valence::Drier : Valence::Wetter,
                               0.05 + 0.95 * unit(rng), {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12},
                               rng() % 4 ? "r1" : "r2"));
    const double c = 0.5 + unit(rng) * 0.5;
    IkKnowledge base, flipped, scaled;
    for (auto ind : inds) {
      base.register_indicator(ind);
      auto f = ind;
      f.valence = ind.valence == Valence::Drier ? Valence::Wetter : Valence::Drier;
      flipped.register_indicator(f);
      auto s = ind;
      s.weight = ind.weight * c;
      scaled.register_indicator(s);
    }
    const auto start = at(2022, 1, 1);
    const auto end = at(2022, 4, 1);
    std::size_t expected_support = 0;
    for (int i = 0, n = static_cast<int>(rng() % 20); i < n; ++i) {
      const auto& ind = inds[rng() % inds.size()];
      const auto ts = start - 86400 * 5 + static_cast<std::int64_t>(rng() % (110 * 86400));
      const IkObservation obs{ind.id, ts, rng() % 3 ? "" : "r1", unit(rng)};
      const auto region = obs.region.empty() ? ind.region : obs.region;
      if (region == "r1" && ts > start && ts <= end) ++expected_support;
      base.record(obs);
      flipped.record(obs);
      scaled.record(obs);
    }
    const auto a = base.signal("r1", start, end);
    const auto b = flipped.signal("r1", start, end);
    const auto s = scaled.signal("r1", start, end);
    CHECK(a.value >= -1.0);
    CHECK(a.value <= 1.0);
    CHECK(a.support == expected_support);
    CHECK(std::fabs(a.value + b.value) <= 1e-12);
    CHECK(std::fabs(a.value - s.value) <= 1e-12);
    if (a.support == 0) CHECK(a.value == 0.0);
  }
}

TEST_CASE("compile_indicator_rules") {
  IkKnowledge k;
  const auto rules = compile_indicator_rules(k, 3, 90 * 86400);
  REQUIRE(rules.size() == 2);
  CHECK(cep::print_rule(rules[0]) ==
        "RULE ik_drier WHEN COUNT(IkDrierObservation) >= 3 WITHIN 90d EMIT IkDrierSignal SEVERITY 0.4");
  CHECK(cep::print_rule(rules[1]) ==
        "RULE ik_wetter WHEN COUNT(IkWetterObservation) >= 3 WITHIN 90d EMIT IkWetterSignal SEVERITY 0.4");
  CHECK(code_of([&] { compile_indicator_rules(k, 0, 90 * 86400); }) == Errc::PreconditionViolation);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const int kk = 1 + static_cast<int>(rng() % 50);
    const std::int64_t window = 60 * (1 + static_cast<std::int64_t>(rng() % 200000));
    const double sev = static_cast<double>(rng() % 101) / 100.0;
    for (const auto& r : compile_indicator_rules(k, kk, window, sev))
      CHECK(cep::parse_rule(cep::print_rule(r)) == r);
  }
}
