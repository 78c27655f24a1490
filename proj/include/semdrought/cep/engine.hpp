#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semdrought/cep/rule.hpp"
#include "semdrought/core/term.hpp"

namespace semdrought::cep {

struct Event {
  std::string kind;
  std::int64_t timestamp = 0;
  std::optional<double> value;
  std::map<std::string, std::string> attributes;
  /// Assigned by the engine on acceptance; evidence lists refer to it.
  std::uint64_t seq = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Firing {
  std::string rule;
  std::int64_t window_end = 0;
  Event emitted;
  /// Sequence numbers of the events that made the pattern true, ascending.
  std::vector<std::uint64_t> evidence;
  /// Values of the aggregate and trend leaves in pattern pre-order; NaN
  /// where the leaf was undefined over the window.
  std::vector<double> observed;
};

/// Evaluates a rule set over one time-ordered stream.
///
/// Window boundaries sit at multiples of the rule's step (epoch-aligned),
/// starting with the first boundary at or after the first event. Boundary e
/// covers events with timestamps in (e - length, e] and is evaluated once
/// the stream has moved past e: on an event with a later timestamp, or by
/// advance_to(t) for every e <= t. Events emitted at e become visible to
/// evaluations at later boundaries only.
class Engine {
 public:
  /// Kinds are resolved through `ns` (prefixed names expanded). Emitting a
  /// kind listed in `reserved_kinds` is rejected with SemanticError.
  explicit Engine(std::vector<CepRule> rules, Namespaces ns = Namespaces(),
                  const std::set<std::string>& reserved_kinds = {});

  /// Throws Error(OutOfOrder) if the timestamp is earlier than the last
  /// accepted event or not after the last closed boundary; the engine is
  /// unchanged in that case.
  std::vector<Firing> push_event(Event event);
  std::vector<Firing> advance_to(std::int64_t t);

  /// True if push_event would accept an event at `timestamp`.
  bool accepts(std::int64_t timestamp) const noexcept;

  const std::vector<CepRule>& rules() const noexcept { return rules_; }
  std::string resolve(const KindRef& kind) const;
  std::int64_t max_window() const noexcept { return max_window_; }
  std::size_t retained() const noexcept { return events_.size(); }
  /// Events sequenced so far, emitted ones included.
  std::uint64_t sequenced() const noexcept { return next_seq_ - 1; }

 private:
  struct Compiled {
    CepRule rule;
    PatternExpr pattern;  // kinds resolved
    std::optional<std::int64_t> next_boundary;
  };

  std::vector<Firing> close_until(std::int64_t limit, bool inclusive);
  void evict();

  std::vector<CepRule> rules_;
  Namespaces ns_;
  std::vector<Compiled> compiled_;  // ordered by rule name
  std::deque<Event> events_;
  std::int64_t max_window_ = 0;
  std::optional<std::int64_t> last_timestamp_;
  std::optional<std::int64_t> closed_through_;
  std::uint64_t next_seq_ = 1;
};

/// Rounds up to the first multiple of `step` that is >= t (t >= 0).
std::int64_t first_boundary_at_or_after(std::int64_t t, std::int64_t step) noexcept;

}  // namespace semdrought::cep
