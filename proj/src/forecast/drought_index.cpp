#include "semdrought/forecast/drought_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "semdrought/core/error.hpp"
#include "semdrought/core/vocabulary.hpp"

namespace semdrought::forecast {

void BaselineClimatology::add_entry(std::string property, unsigned month, ClimatologyEntry entry) {
  entries_[{std::move(property), month}] = std::move(entry);
}

const ClimatologyEntry* BaselineClimatology::find(std::string_view property, unsigned month) const {
  const auto it = entries_.find(std::pair<std::string, unsigned>{std::string(property), month});
  return it == entries_.end() ? nullptr : &it->second;
}

const ClimatologyEntry& BaselineClimatology::usable(std::string_view property, unsigned month) const {
  const auto* e = find(property, month);
  if (!e || !e->usable)
    throw Error(Errc::InsufficientBaseline,
                "no usable baseline for " + std::string(property) + " in month " + std::to_string(month) +
                    (e ? " (n=" + std::to_string(e->n) + ")" : ""),
                std::string(property));
  return *e;
}

BaselineClimatology build_climatology(std::span<const CanonicalObservation> history, std::size_t min_count) {
  std::map<std::pair<std::string, unsigned>, std::vector<double>> groups;
  for (const auto& o : history) groups[{o.property, month_of(o.timestamp).month}].push_back(o.value);

  BaselineClimatology out(min_count);
  for (auto& [key, values] : groups) {
    ClimatologyEntry e;
    e.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    e.mean = sum / static_cast<double>(e.n);
    if (e.n > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - e.mean) * (v - e.mean);
      e.sd = std::sqrt(ss / static_cast<double>(e.n - 1));
    }
    std::sort(values.begin(), values.end());
    e.sorted = std::move(values);
    e.usable = e.n >= min_count && e.sd > 0.0;
    out.add_entry(key.first, key.second, std::move(e));
  }
  return out;
}

std::vector<CanonicalObservation> monthly_aggregates(std::span<const CanonicalObservation> observations,
                                                     const Namespaces& ns) {
  struct Acc {
    CanonicalObservation first;
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::map<std::tuple<std::string, std::string, CalendarMonth>, Acc> groups;
  for (const auto& o : observations) {
    auto& acc = groups[{o.sensor_id, o.property, month_of(o.timestamp)}];
    if (acc.n == 0) acc.first = o;
    acc.sum += o.value;
    ++acc.n;
  }
  const auto precipitation = ns.ex(vocab::kPrecipitation);
  std::vector<CanonicalObservation> out;
  for (auto& [key, acc] : groups) {
    auto o = acc.first;
    o.id.clear();
    o.timestamp = month_start(std::get<2>(key));
    o.value = o.property == precipitation ? acc.sum : acc.sum / static_cast<double>(acc.n);
    out.push_back(std::move(o));
  }
  return out;
}

double standardized_anomaly(double x, double mu, double sigma) {
  if (!(sigma > 0.0)) throw Error(Errc::InsufficientBaseline, "standard deviation must be positive");
  return (x - mu) / sigma;
}

double empirical_percentile(double x, std::span<const double> sorted_samples) {
  if (sorted_samples.empty()) throw Error(Errc::InsufficientBaseline, "no baseline samples");
  const auto r = std::upper_bound(sorted_samples.begin(), sorted_samples.end(), x) - sorted_samples.begin();
  return static_cast<double>(r) / static_cast<double>(sorted_samples.size() + 1);
}

void validate(const DviWeights& w) {
  const double parts[] = {w.precipitation, w.soil_moisture, w.temperature, w.ik};
  for (double p : parts)
    if (!std::isfinite(p) || p < 0.0) throw Error(Errc::BadWeights, "weights must be non-negative");
  const double sum = w.precipitation + w.soil_moisture + w.temperature + w.ik;
  if (std::fabs(sum - 1.0) > 1e-9)
    throw Error(Errc::BadWeights, "weights must sum to 1, got " + canonical_double(sum));
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
double q(double u) { return clamp01(u / 2.0); }

struct Terms {
  double precipitation, soil_moisture, temperature, ik;
};

Terms dvi_terms(double z_precip, double sm_percentile, double z_temp, double ik_value, const DviWeights& w) {
  return {w.precipitation * q(-z_precip), w.soil_moisture * (1.0 - sm_percentile), w.temperature * q(z_temp),
          w.ik * (ik_value + 1.0) / 2.0};
}

}  // namespace

double compute_dvi(double z_precip, double sm_percentile, double z_temp, double ik_value, const DviWeights& w) {
  validate(w);
  if (!(sm_percentile >= 0.0 && sm_percentile <= 1.0))
    throw Error(Errc::PreconditionViolation, "soil moisture percentile outside [0, 1]");
  if (!(ik_value >= -1.0 && ik_value <= 1.0))
    throw Error(Errc::PreconditionViolation, "IK value outside [-1, 1]");
  const auto t = dvi_terms(z_precip, sm_percentile, z_temp, ik_value, w);
  return clamp01(t.precipitation + t.soil_moisture + t.temperature + t.ik);
}

std::string_view severity_name(Severity s) noexcept {
  switch (s) {
    case Severity::None: return "None";
    case Severity::Watch: return "Watch";
    case Severity::Warning: return "Warning";
    case Severity::Severe: return "Severe";
  }
  return "?";
}

void validate(const SeverityThresholds& t) {
  if (!(t.watch > 0.0 && t.watch < t.warning && t.warning < t.severe && t.severe <= 1.0))
    throw Error(Errc::PreconditionViolation, "thresholds must satisfy 0 < watch < warning < severe <= 1");
}

Severity classify_severity(double dvi, const SeverityThresholds& t) {
  if (dvi >= t.severe) return Severity::Severe;
  if (dvi >= t.warning) return Severity::Warning;
  if (dvi >= t.watch) return Severity::Watch;
  return Severity::None;
}

namespace {

/// Mean over sensors of each sensor's monthly aggregate.
std::optional<double> region_value(const std::vector<CanonicalObservation>& monthly, const std::string& property) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& m : monthly)
    if (m.property == property) sum += m.value, ++n;
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

ForecastBulletin make_bulletin(const BulletinRequest& req, const BaselineClimatology& climatology,
                               const Namespaces& ns) {
  validate(req.weights);
  validate(req.thresholds);
  const auto start = month_start(req.period);
  const auto end = month_start(next_month(req.period));

  std::vector<CanonicalObservation> in_period;
  for (const auto& o : req.observations)
    if (o.timestamp >= start && o.timestamp < end) in_period.push_back(o);
  if (in_period.empty())
    throw Error(Errc::NoData, "no observations for " + req.region + " in " + format_year_month(req.period),
                format_year_month(req.period));
  const auto monthly = monthly_aggregates(in_period, ns);

  const auto need = [&](std::string_view local) {
    const auto property = ns.ex(local);
    const auto v = region_value(monthly, property);
    if (!v)
      throw Error(Errc::NoData,
                  "no " + std::string(local) + " observations for " + req.region + " in " +
                      format_year_month(req.period),
                  property);
    return std::pair{property, *v};
  };
  const auto [p_iri, precip] = need(vocab::kPrecipitation);
  const auto [s_iri, soil] = need(vocab::kSoilMoisture);
  const auto [t_iri, temp] = need(vocab::kAirTemperature);

  DroughtIndexReport r;
  r.region = req.region;
  r.period = req.period;
  r.precipitation_total = precip;
  r.soil_moisture_mean = soil;
  r.temperature_mean = temp;
  const auto& pe = climatology.usable(p_iri, req.period.month);
  const auto& te = climatology.usable(t_iri, req.period.month);
  const auto* se = climatology.find(s_iri, req.period.month);
  if (!se || se->n < climatology.min_count())
    throw Error(Errc::InsufficientBaseline,
                "no usable baseline for " + s_iri + " in month " + std::to_string(req.period.month), s_iri);
  r.z_precip = standardized_anomaly(precip, pe.mean, pe.sd);
  r.z_temp = standardized_anomaly(temp, te.mean, te.sd);
  r.sm_percentile = empirical_percentile(soil, se->sorted);
  const bool with_ik = req.weights.ik > 0.0;
  r.ik = with_ik ? req.ik : ik::IkSignal{};
  r.dvi = compute_dvi(r.z_precip, r.sm_percentile, r.z_temp, r.ik.value, req.weights);
  r.severity = classify_severity(r.dvi, req.thresholds);

  ForecastBulletin b;
  b.region = req.region;
  b.period = req.period;
  b.issued_at = req.issued_at;
  for (const auto& f : req.firings) {
    if (f.window_end < start || f.window_end >= end) continue;
    if (!with_ik && req.ik_rules.contains(f.rule)) continue;
    b.evidence.push_back({f.rule, f.window_end, std::nullopt});
  }
  const auto t = dvi_terms(r.z_precip, r.sm_percentile, r.z_temp, r.ik.value, req.weights);
  const auto last_second = end - 1;
  for (const auto& [name, value] : {std::pair{"dvi.precipitation", t.precipitation},
                                    std::pair{"dvi.soil_moisture", t.soil_moisture},
                                    std::pair{"dvi.temperature", t.temperature}})
    if (value > 0.0) b.evidence.push_back({name, last_second, value});
  if (t.ik > 0.0 && with_ik && (r.ik.support > 0 || b.evidence.empty()))
    b.evidence.push_back({"dvi.ik", last_second, t.ik});
  b.report = r;

  std::size_t cited = 0;
  for (const auto& e : b.evidence) cited += e.contribution ? 0 : 1;
  b.summary = r.region + " " + format_year_month(r.period) + ": " + std::string(severity_name(r.severity)) +
              " (DVI " + fmt("%.2f", r.dvi) + "). Precipitation " + fmt("%.1f", precip) + " mm (z " +
              fmt("%+.2f", r.z_precip) + "), soil moisture percentile " + fmt("%.2f", r.sm_percentile) +
              ", temperature z " + fmt("%+.2f", r.z_temp) +
              (with_ik ? ", IK " + fmt("%+.2f", r.ik.value) + " from " + std::to_string(r.ik.support) + " reports"
                       : std::string()) +
              ", " + std::to_string(cited) + " rule firings.";
  return b;
}

nlohmann::json bulletin_to_json(const ForecastBulletin& b) {
  nlohmann::json evidence = nlohmann::json::array();
  for (const auto& e : b.evidence) {
    nlohmann::json item{{"rule", e.rule}, {"at", format_iso8601(e.at)}};
    if (e.contribution) item["contribution"] = *e.contribution;
    evidence.push_back(std::move(item));
  }
  const auto& r = b.report;
  return nlohmann::json{
      {"region", b.region},
      {"period", format_year_month(b.period)},
      {"issued_at", format_iso8601(b.issued_at)},
      {"dvi", r.dvi},
      {"severity", severity_name(r.severity)},
      {"z_precip", r.z_precip},
      {"sm_percentile", r.sm_percentile},
      {"z_temp", r.z_temp},
      {"precipitation_total", r.precipitation_total},
      {"soil_moisture_mean", r.soil_moisture_mean},
      {"temperature_mean", r.temperature_mean},
      {"ik", {{"value", r.ik.value}, {"support", r.ik.support}}},
      {"evidence", std::move(evidence)},
      {"summary", b.summary},
  };
}

}  // namespace semdrought::forecast
