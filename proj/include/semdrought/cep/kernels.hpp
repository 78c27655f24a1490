#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "semdrought/cep/rule.hpp"

namespace semdrought::cep {

using TimedValue = std::pair<std::int64_t, double>;

/// Throws Error(EmptyWindow) for AVG/MIN/MAX over no values.
double window_aggregate(std::span<const TimedValue> values, AggFn fn);
std::optional<double> try_aggregate(std::span<const TimedValue> values, AggFn fn);

/// Least-squares slope in value units per day. Throws Error(Degenerate) with
/// fewer than two distinct timestamps.
double slope(std::span<const TimedValue> points);
std::optional<double> try_slope(std::span<const TimedValue> points);

}  // namespace semdrought::cep
