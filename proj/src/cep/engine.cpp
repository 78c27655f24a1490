#include "semdrought/cep/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semdrought/cep/kernels.hpp"
#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"

namespace semdrought::cep {

namespace {

enum class Truth { False, True, Unknown };

struct Outcome {
  Truth truth = Truth::False;
  std::vector<std::uint64_t> evidence;
};

using N = PatternExpr::Node;

class WindowView {
 public:
  WindowView(const std::deque<Event>& events, std::int64_t start, std::int64_t end)
      : events_(events), start_(start), end_(end) {}

  template <typename F>
  void each(const std::string& kind, F&& f) const {
    // Events are in timestamp order, but the window is usually a short tail.
    auto it = std::partition_point(events_.begin(), events_.end(),
                                   [&](const Event& e) { return e.timestamp <= start_; });
    for (; it != events_.end() && it->timestamp <= end_; ++it)
      if (it->kind == kind) f(*it);
  }

 private:
  const std::deque<Event>& events_;
  std::int64_t start_;
  std::int64_t end_;
};

Outcome evaluate(const PatternExpr& e, const WindowView& w, std::vector<double>& observed) {
  Outcome out;
  switch (e.node) {
    case N::Threshold:
      w.each(e.kind.text, [&](const Event& ev) {
        if (ev.value && compare(*ev.value, e.cmp, e.constant)) out.evidence.push_back(ev.seq);
      });
      out.truth = out.evidence.empty() ? Truth::False : Truth::True;
      return out;

    case N::Aggregate:
    case N::Trend: {
      std::vector<TimedValue> values;
      std::vector<std::uint64_t> seqs;
      w.each(e.kind.text, [&](const Event& ev) {
        if (e.node == N::Aggregate && e.fn == AggFn::Count) {
          values.emplace_back(ev.timestamp, 0.0);
          seqs.push_back(ev.seq);
        } else if (ev.value) {
          values.emplace_back(ev.timestamp, *ev.value);
          seqs.push_back(ev.seq);
        }
      });
      const auto v = e.node == N::Trend ? try_slope(values) : try_aggregate(values, e.fn);
      observed.push_back(v ? *v : std::numeric_limits<double>::quiet_NaN());
      if (!v) {
        out.truth = Truth::Unknown;
      } else if (compare(*v, e.cmp, e.constant)) {
        out.truth = Truth::True;
        out.evidence = std::move(seqs);
      }
      return out;
    }

    case N::Seq: {
      std::vector<const Event*> stream;
      w.each(e.kind.text, [&](const Event& ev) { stream.push_back(&ev); });
      if (e.kind_b.text != e.kind.text)
        w.each(e.kind_b.text, [&](const Event& ev) { stream.push_back(&ev); });
      std::sort(stream.begin(), stream.end(), [](const Event* a, const Event* b) {
        return a->seq < b->seq;
      });
      std::deque<const Event*> waiting;
      for (const Event* ev : stream) {
        if (ev->kind == e.kind_b.text && !waiting.empty() &&
            waiting.front()->timestamp < ev->timestamp) {
          out.evidence.push_back(waiting.front()->seq);
          out.evidence.push_back(ev->seq);
          waiting.pop_front();
          continue;
        }
        if (ev->kind == e.kind.text) waiting.push_back(ev);
      }
      out.truth = out.evidence.empty() ? Truth::False : Truth::True;
      return out;
    }

    case N::Absent: {
      bool any = false;
      w.each(e.kind.text, [&](const Event&) { any = true; });
      out.truth = any ? Truth::False : Truth::True;
      return out;
    }

    case N::Not: {
      const auto inner = evaluate(e.children.front(), w, observed);
      out.truth = inner.truth == Truth::Unknown ? Truth::Unknown
                  : inner.truth == Truth::True  ? Truth::False
                                                : Truth::True;
      return out;
    }

    case N::And:
    case N::Or: {
      const bool is_and = e.node == N::And;
      bool unknown = false, decided = false;
      std::vector<std::uint64_t> collected;
      for (const auto& child : e.children) {
        auto r = evaluate(child, w, observed);
        if (r.truth == Truth::Unknown) unknown = true;
        if (r.truth == (is_and ? Truth::False : Truth::True)) decided = true;
        if (r.truth == Truth::True)
          collected.insert(collected.end(), r.evidence.begin(), r.evidence.end());
      }
      if (is_and)
        out.truth = decided ? Truth::False : unknown ? Truth::Unknown : Truth::True;
      else
        out.truth = decided ? Truth::True : unknown ? Truth::Unknown : Truth::False;
      if (out.truth == Truth::True) out.evidence = std::move(collected);
      return out;
    }
  }
  return out;
}

void resolve_kinds(PatternExpr& e, const Engine& engine) {
  e.kind.text = engine.resolve(e.kind);
  if (e.node == N::Seq) e.kind_b.text = engine.resolve(e.kind_b);
  for (auto& c : e.children) resolve_kinds(c, engine);
}

}  // namespace

std::int64_t first_boundary_at_or_after(std::int64_t t, std::int64_t step) noexcept {
  const auto q = t / step;
  return q * step >= t ? q * step : (q + 1) * step;
}

Engine::Engine(std::vector<CepRule> rules, Namespaces ns, const std::set<std::string>& reserved_kinds)
    : rules_(std::move(rules)), ns_(std::move(ns)) {
  std::set<std::string> names;
  for (const auto& r : rules_) {
    if (!names.insert(r.name).second)
      throw Error(Errc::SemanticError, "duplicate rule name " + r.name, r.name);
    if (r.window.length <= 0 || r.window.step <= 0 || r.window.step > r.window.length)
      throw Error(Errc::SemanticError, "invalid window in rule " + r.name, r.name);
    if (reserved_kinds.contains(resolve(KindRef{r.emit, false})))
      throw Error(Errc::SemanticError, "rule " + r.name + " emits an observed property kind", r.emit);
    max_window_ = std::max(max_window_, r.window.length);
  }
  for (const auto& r : rules_) {
    Compiled c{r, r.pattern, std::nullopt};
    resolve_kinds(c.pattern, *this);
    compiled_.push_back(std::move(c));
  }
  std::sort(compiled_.begin(), compiled_.end(),
            [](const Compiled& a, const Compiled& b) { return a.rule.name < b.rule.name; });
}

std::string Engine::resolve(const KindRef& kind) const {
  if (kind.bracketed || kind.text.find(':') == std::string::npos) return kind.text;
  return ns_.expand(kind.text);
}

bool Engine::accepts(std::int64_t timestamp) const noexcept {
  if (timestamp < 0) return false;
  if (last_timestamp_ && timestamp < *last_timestamp_) return false;
  if (closed_through_ && timestamp <= *closed_through_) return false;
  return true;
}

std::vector<Firing> Engine::push_event(Event event) {
  if (!accepts(event.timestamp))
    throw Error(Errc::OutOfOrder,
                "event at " + format_iso8601(std::max<std::int64_t>(event.timestamp, 0)) +
                    " is earlier than the stream position",
                event.kind);
  if (!last_timestamp_) {
    for (auto& c : compiled_)
      c.next_boundary = first_boundary_at_or_after(event.timestamp, c.rule.window.step);
  }
  auto firings = close_until(event.timestamp, false);
  last_timestamp_ = event.timestamp;
  event.seq = next_seq_++;
  events_.push_back(std::move(event));
  return firings;
}

std::vector<Firing> Engine::advance_to(std::int64_t t) {
  if (last_timestamp_ && t < *last_timestamp_)
    throw Error(Errc::OutOfOrder, "cannot advance to a time before the last event");
  if (!last_timestamp_) return {};
  auto firings = close_until(t, true);
  if (!closed_through_ || t > *closed_through_) closed_through_ = t;
  return firings;
}

std::vector<Firing> Engine::close_until(std::int64_t limit, bool inclusive) {
  std::vector<Firing> firings;
  const auto due = [&](std::int64_t e) { return inclusive ? e <= limit : e < limit; };
  for (;;) {
    std::optional<std::int64_t> end;
    for (const auto& c : compiled_)
      if (c.next_boundary && due(*c.next_boundary) && (!end || *c.next_boundary < *end))
        end = c.next_boundary;
    if (!end) break;

    // Held back until every rule due at `end` has run: one cascade level.
    std::vector<Event> emitted;
    for (auto& c : compiled_) {
      if (c.next_boundary != end) continue;
      c.next_boundary = *end + c.rule.window.step;
      WindowView view(events_, *end - c.rule.window.length, *end);
      std::vector<double> observed;
      auto outcome = evaluate(c.pattern, view, observed);
      if (outcome.truth != Truth::True) continue;

      std::sort(outcome.evidence.begin(), outcome.evidence.end());
      outcome.evidence.erase(std::unique(outcome.evidence.begin(), outcome.evidence.end()),
                             outcome.evidence.end());
      Event out;
      out.kind = resolve(KindRef{c.rule.emit, false});
      out.timestamp = *end;
      out.value = c.rule.severity;
      out.attributes["rule"] = c.rule.name;
      out.seq = next_seq_++;
      firings.push_back(Firing{c.rule.name, *end, out, std::move(outcome.evidence), std::move(observed)});
      emitted.push_back(std::move(out));
    }
    for (auto& e : emitted) events_.push_back(std::move(e));
    closed_through_ = *end;
  }
  evict();
  return firings;
}

void Engine::evict() {
  if (!closed_through_) return;
  // Every future window starts after closed_through_ - max_window_.
  const auto horizon = *closed_through_ - max_window_;
  while (!events_.empty() && events_.front().timestamp <= horizon) events_.pop_front();
}

}  // namespace semdrought::cep
