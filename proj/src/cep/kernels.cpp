#include "semdrought/cep/kernels.hpp"

#include <algorithm>

#include "semdrought/core/error.hpp"

namespace semdrought::cep {

std::optional<double> try_aggregate(std::span<const TimedValue> values, AggFn fn) {
  if (fn == AggFn::Count) return static_cast<double>(values.size());
  double sum = 0.0;
  for (const auto& [t, v] : values) sum += v;
  if (fn == AggFn::Sum) return sum;
  if (values.empty()) return std::nullopt;
  if (fn == AggFn::Avg) return sum / static_cast<double>(values.size());
  const auto by_value = [](const TimedValue& a, const TimedValue& b) { return a.second < b.second; };
  return fn == AggFn::Min ? std::min_element(values.begin(), values.end(), by_value)->second
                          : std::max_element(values.begin(), values.end(), by_value)->second;
}

double window_aggregate(std::span<const TimedValue> values, AggFn fn) {
  if (auto v = try_aggregate(values, fn)) return *v;
  throw Error(Errc::EmptyWindow, std::string(agg_name(fn)) + " over an empty window");
}

std::optional<double> try_slope(std::span<const TimedValue> points) {
  if (points.size() < 2) return std::nullopt;
  // Days relative to the first point keep the sums well conditioned.
  const auto t0 = points.front().first;
  const auto n = static_cast<double>(points.size());
  double mean_t = 0.0, mean_v = 0.0;
  for (const auto& [t, v] : points) {
    mean_t += static_cast<double>(t - t0) / 86400.0;
    mean_v += v;
  }
  mean_t /= n;
  mean_v /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [t, v] : points) {
    const double dt = static_cast<double>(t - t0) / 86400.0 - mean_t;
    sxy += dt * (v - mean_v);
    sxx += dt * dt;
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

double slope(std::span<const TimedValue> points) {
  if (auto s = try_slope(points)) return *s;
  throw Error(Errc::Degenerate, "slope needs at least two distinct timestamps");
}

}  // namespace semdrought::cep
