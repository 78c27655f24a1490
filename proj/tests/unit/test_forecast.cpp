#include <doctest.h>

#include <cmath>
#include <random>

#include "semdrought/core/error.hpp"
#include "semdrought/forecast/drought_index.hpp"

using namespace semdrought;
using namespace semdrought::forecast;

namespace {

const Namespaces kNs;

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::PreconditionViolation;
}

CanonicalObservation obs(std::string_view property, std::int64_t ts, double value, std::string sensor = "s1") {
  CanonicalObservation o;
  o.sensor_id = kNs.ex("sensor/" + sensor);
  o.property = kNs.ex(property);
  o.value = value;
  o.timestamp = ts;
  return o;
}

struct TwoPass {
  double mean, sd;
};

TwoPass two_pass(const std::vector<double>& v) {
  long double m = 0;
  for (double x : v) m += x;
  m /= v.size();
  long double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return {static_cast<double>(m), static_cast<double>(std::sqrt(ss / (v.size() - 1)))};
}

/// Baseline where the neutral period (precip 50, soil 14, temp 20) maps to
/// z = 0, percentile 0.5, z = 0.
BaselineClimatology neutral_baseline() {
  BaselineClimatology c;
  c.add_entry(kNs.ex("precipitation"), 6, {50, 10, 9, {}, true});
  c.add_entry(kNs.ex("airTemperature"), 6, {20, 2, 9, {}, true});
  c.add_entry(kNs.ex("soilMoisture"), 6, {14, 2.7, 9, {10, 11, 12, 13, 14, 15, 16, 17, 18}, true});
  return c;
}

std::vector<CanonicalObservation> june(double precip, double soil, double temp) {
  const auto t = month_start({2023, 6}) + 3600;
  return {obs("precipitation", t, precip), obs("soilMoisture", t + 60, soil), obs("airTemperature", t + 120, temp)};
}

}  // namespace

TEST_CASE("build_climatology") {
  const auto jan = month_start({2022, 1});
  const std::vector<CanonicalObservation> two = {obs("precipitation", jan, 10), obs("precipitation", jan + 86400, 20)};
  const auto c = build_climatology(two);
  const auto* e = c.find(kNs.ex("precipitation"), 1);
  REQUIRE(e);
  CHECK(e->mean == 15);
  CHECK(e->sd == doctest::Approx(7.0710678118654755).epsilon(1e-15));
  CHECK(e->n == 2);
  CHECK_FALSE(e->usable);
  CHECK(code_of([&] { c.usable(kNs.ex("precipitation"), 1); }) == Errc::InsufficientBaseline);
  CHECK(code_of([&] { c.usable(kNs.ex("precipitation"), 2); }) == Errc::InsufficientBaseline);

  std::vector<CanonicalObservation> same;
  for (int i = 0; i < 8; ++i) same.push_back(obs("airTemperature", jan + i * 86400, 21.5));
  const auto flat = build_climatology(same);
  CHECK(flat.find(kNs.ex("airTemperature"), 1)->sd == 0);
  CHECK_FALSE(flat.find(kNs.ex("airTemperature"), 1)->usable);
}

TEST_CASE("property: climatology matches a two-pass oracle") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0, 1);
  for (int round = 0; round < 1000; ++round) {
    // 24 months of history, a few values per month and property
    std::vector<CanonicalObservation> history;
    std::map<std::pair<std::string, unsigned>, std::vector<double>> expected;
    const double scale = std::pow(10.0, static_cast<int>(rng() % 5) - 1);
    for (int m = 0; m < 24; ++m) {
      CalendarMonth month{2020 + m / 12, static_cast<unsigned>(m % 12 + 1)};
      for (const char* p : {"precipitation", "soilMoisture"}) {
        for (int k = 0, n = 1 + static_cast<int>(rng() % 4); k < n; ++k) {
          const double v = scale * (30 + 10 * noise(rng));
          history.push_back(obs(p, month_start(month) + k * 86400, v));
          expected[{kNs.ex(p), month.month}].push_back(v);
        }
      }
    }
    std::shuffle(history.begin(), history.end(), rng);
    const auto c = build_climatology(history);
    for (const auto& [key, values] : expected) {
      const auto* e = c.find(key.first, key.second);
      REQUIRE(e);
      const auto o = two_pass(values);
      CHECK(e->n == values.size());
      CHECK(std::fabs(e->mean - o.mean) <= 1e-9 * std::max(1.0, std::fabs(o.mean)));
      if (values.size() > 1) CHECK(std::fabs(e->sd - o.sd) <= 1e-9 * std::max(1.0, o.sd));
      CHECK(e->usable == (values.size() >= 5 && e->sd > 0));
      CHECK(std::is_sorted(e->sorted.begin(), e->sorted.end()));
    }
  }
}

TEST_CASE("monthly aggregates sum precipitation and average the rest") {
  const auto t = month_start({2022, 3});
  const std::vector<CanonicalObservation> in = {
      obs("precipitation", t, 2), obs("precipitation", t + 86400, 3), obs("precipitation", t, 7, "s2"),
      obs("soilMoisture", t, 20), obs("soilMoisture", t + 86400, 30),
      obs("precipitation", month_start({2022, 4}), 100)};
  const auto m = monthly_aggregates(in, kNs);
  REQUIRE(m.size() == 4);
  std::map<std::pair<std::string, std::int64_t>, double> got;
  for (const auto& o : m) got[{o.sensor_id + o.property, o.timestamp}] = o.value;
  CHECK(got.at({kNs.ex("sensor/s1") + kNs.ex("precipitation"), t}) == 5);
  CHECK(got.at({kNs.ex("sensor/s2") + kNs.ex("precipitation"), t}) == 7);
  CHECK(got.at({kNs.ex("sensor/s1") + kNs.ex("soilMoisture"), t}) == 25);
  CHECK(got.at({kNs.ex("sensor/s1") + kNs.ex("precipitation"), month_start({2022, 4})}) == 100);
}

TEST_CASE("standardized_anomaly") {
  CHECK(standardized_anomaly(40, 40, 11) == 0);
  CHECK(standardized_anomaly(51, 40, 11) == 1);
  CHECK(std::fabs(standardized_anomaly(12.3, 40, 11) - (-2.5181818181818183)) <= 1e-12);
  CHECK(code_of([] { standardized_anomaly(1, 1, 0); }) == Errc::InsufficientBaseline);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng), mu = u(rng), sigma = 0.1 + std::fabs(u(rng)), shift = u(rng), c = 0.01 + std::fabs(u(rng));
    const double z = standardized_anomaly(x, mu, sigma);
    CHECK(std::fabs(standardized_anomaly(x + shift, mu + shift, sigma) - z) <= 1e-9 * std::max(1.0, std::fabs(z)));
    CHECK(std::fabs(standardized_anomaly(c * x, c * mu, c * sigma) - z) <= 1e-9 * std::max(1.0, std::fabs(z)));
  }
}

TEST_CASE("empirical_percentile") {
  const std::vector<double> nine = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(empirical_percentile(0.5, nine) == 0);
  CHECK(empirical_percentile(5, nine) == 0.5);
  CHECK(empirical_percentile(100, nine) == 0.9);
  CHECK(code_of([] { empirical_percentile(1, std::vector<double>{}); }) == Errc::InsufficientBaseline);

  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> d(0, 30);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> s(20);
    for (auto& v : s) v = d(rng);
    std::sort(s.begin(), s.end());
    const double x = d(rng);
    int r = 0;
    for (double v : s) r += v <= x ? 1 : 0;
    CHECK(empirical_percentile(x, s) == r / 21.0);
  }
}

TEST_CASE("compute_dvi examples") {
  CHECK(compute_dvi(0, 0.5, 0, 0) == 0.25);
  CHECK(compute_dvi(-2, 0, 2, 1) == 1.0);
  const double ik = 0.2727272727272727;
  const double oracle = 0.4 * 0.5 + 0.3 * 0.8 + 0.1 * 0.25 + 0.2 * (ik + 1) / 2;
  CHECK(std::fabs(compute_dvi(-1, 0.2, 0.5, ik) - oracle) <= 1e-12);
  CHECK(std::fabs(compute_dvi(-1, 0.2, 0.5, ik) - 0.592272727) <= 1e-9);
  CHECK(classify_severity(compute_dvi(-1, 0.2, 0.5, ik)) == Severity::Warning);

  CHECK(code_of([] { compute_dvi(0, 0.5, 0, 0, {0.4, 0.3, 0.1, 0.1}); }) == Errc::BadWeights);
  CHECK(code_of([] { compute_dvi(0, 0.5, 0, 0, {0.6, 0.3, 0.3, -0.2}); }) == Errc::BadWeights);
  CHECK(code_of([] { validate(DviWeights{0.25, 0.25, 0.25, 0.25 + 2e-9}); }) == Errc::BadWeights);
  CHECK_NOTHROW(validate(DviWeights{0.25, 0.25, 0.25, 0.25 + 5e-10}));
}

TEST_CASE("classify_severity boundaries") {
  CHECK(classify_severity(0.0) == Severity::None);
  CHECK(classify_severity(std::nextafter(0.25, 0.0)) == Severity::None);
  CHECK(classify_severity(0.25) == Severity::Watch);
  CHECK(classify_severity(std::nextafter(0.5, 0.0)) == Severity::Watch);
  CHECK(classify_severity(0.5) == Severity::Warning);
  CHECK(classify_severity(std::nextafter(0.75, 0.0)) == Severity::Warning);
  CHECK(classify_severity(0.75) == Severity::Severe);
  CHECK(classify_severity(1.0) == Severity::Severe);
  CHECK(classify_severity(0.3, {0.1, 0.2, 0.3}) == Severity::Severe);
  CHECK(code_of([] { validate(SeverityThresholds{0.5, 0.4, 0.9}); }) == Errc::PreconditionViolation);
}

TEST_CASE("property: dvi range and monotonicity") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> z(-4, 4), p(0, 1), k(-1, 1), w(0, 1);
  for (int i = 0; i < 10000; ++i) {
    double a = w(rng), b = w(rng), c = w(rng), d = w(rng);
    const double s = a + b + c + d;
    const DviWeights weights{a / s, b / s, c / s, 1.0 - (a / s + b / s + c / s)};
    if (weights.ik < 0) continue;
    const double zp = z(rng), sp = p(rng), zt = z(rng), ik = k(rng);
    const double base = compute_dvi(zp, sp, zt, ik, weights);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
    CHECK(compute_dvi(zp - std::fabs(z(rng)), sp, zt, ik, weights) >= base);
    CHECK(compute_dvi(zp, sp * p(rng), zt, ik, weights) >= base);
    CHECK(compute_dvi(zp, sp, zt + std::fabs(z(rng)), ik, weights) >= base);
    CHECK(compute_dvi(zp, sp, zt, ik + (1 - ik) * p(rng), weights) >= base);
    const double d1 = p(rng), d2 = p(rng);
    if (d1 <= d2) CHECK(classify_severity(d1) <= classify_severity(d2));
  }
}

TEST_CASE("make_bulletin: neutral period") {
  const auto period = CalendarMonth{2023, 6};
  const auto data = june(50, 14, 20);
  BulletinRequest req;
  req.region = "free_state";
  req.period = period;
  req.observations = data;
  const auto b = make_bulletin(req, neutral_baseline(), kNs);
  CHECK(b.report.z_precip == 0);
  CHECK(b.report.sm_percentile == 0.5);
  CHECK(b.report.z_temp == 0);
  CHECK(b.report.dvi == 0.25);
  CHECK(b.report.severity == Severity::Watch);
  REQUIRE_FALSE(b.evidence.empty());
  CHECK(b.evidence.front().rule == "dvi.soil_moisture");

  const auto j = bulletin_to_json(b);
  CHECK(j.at("region") == "free_state");
  CHECK(j.at("period") == "2023-06");
  CHECK(j.at("severity") == "Watch");
  CHECK(j.at("dvi").get<double>() == 0.25);
  CHECK(j.at("ik").at("support") == 0);
  for (const char* key : {"z_precip", "sm_percentile", "z_temp", "evidence", "summary"}) CHECK(j.contains(key));
}

TEST_CASE("make_bulletin: errors") {
  BulletinRequest req;
  req.region = "r";
  req.period = {2023, 7};
  const auto data = june(50, 14, 20);
  req.observations = data;
  CHECK(code_of([&] { make_bulletin(req, neutral_baseline(), kNs); }) == Errc::NoData);

  req.period = {2023, 6};
  const std::vector<CanonicalObservation> partial(data.begin(), data.begin() + 2);
  req.observations = partial;
  CHECK(code_of([&] { make_bulletin(req, neutral_baseline(), kNs); }) == Errc::NoData);

  req.observations = data;
  BaselineClimatology thin;
  thin.add_entry(kNs.ex("precipitation"), 6, {50, 10, 3, {}, false});
  CHECK(code_of([&] { make_bulletin(req, thin, kNs); }) == Errc::InsufficientBaseline);
}

TEST_CASE("make_bulletin: evidence and the IK ablation switch") {
  const auto period = CalendarMonth{2023, 6};
  const auto data = june(20, 9, 24);  // dry, hot
  const auto start = month_start(period);
  std::vector<cep::Firing> firings;
  for (const auto& [rule, end] : std::vector<std::pair<std::string, std::int64_t>>{
           {"dry_spell", start - 86400}, {"dry_spell", start + 86400}, {"ik_drier", start + 2 * 86400},
           {"ik_follow", start + 3 * 86400}, {"heat", month_start(next_month(period))}}) {
    cep::Firing f;
    f.rule = rule;
    f.window_end = end;
    firings.push_back(f);
  }
  BulletinRequest req;
  req.region = "free_state";
  req.period = period;
  req.observations = data;
  req.firings = firings;
  req.ik_rules = {"ik_drier", "ik_follow"};
  req.ik = {0.9, 4};
  const auto b = make_bulletin(req, neutral_baseline(), kNs);
  CHECK(b.report.severity >= Severity::Warning);
  std::vector<std::string> rules;
  for (const auto& e : b.evidence) rules.push_back(e.rule);
  CHECK(rules == std::vector<std::string>{"dry_spell", "ik_drier", "ik_follow", "dvi.precipitation",
                                          "dvi.soil_moisture", "dvi.temperature", "dvi.ik"});

  req.weights = {0.5, 0.3, 0.2, 0.0};
  const auto without = bulletin_to_json(make_bulletin(req, neutral_baseline(), kNs));
  CHECK(without.at("evidence").size() == 4);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    req.ik = {std::uniform_real_distribution<double>(-1, 1)(rng), static_cast<std::size_t>(rng() % 50)};
    CHECK(bulletin_to_json(make_bulletin(req, neutral_baseline(), kNs)) == without);
  }
}

TEST_CASE("property: evidence is non-empty whenever severity exceeds None") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> precip(0, 100), soil(5, 25), temp(10, 30), ik(-1, 1);
  for (int i = 0; i < 2000; ++i) {
    const auto data = june(precip(rng), soil(rng), temp(rng));
    BulletinRequest req;
    req.region = "r";
    req.period = {2023, 6};
    req.observations = data;
    req.ik = {ik(rng), rng() % 3};
    if (req.ik.support == 0) req.ik.value = 0;
    const auto b = make_bulletin(req, neutral_baseline(), kNs);
    if (b.report.severity > Severity::None) CHECK_FALSE(b.evidence.empty());
  }
}
