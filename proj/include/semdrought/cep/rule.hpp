#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace semdrought::cep {

enum class Cmp { Lt, Le, Gt, Ge, Eq, Ne };
enum class AggFn { Avg, Min, Max, Sum, Count };

std::string_view cmp_symbol(Cmp c) noexcept;
std::string_view agg_name(AggFn f) noexcept;
bool compare(double lhs, Cmp c, double rhs) noexcept;

/// An event kind as written in rule text: a bare or prefixed identifier, or
/// an IRI that was written in angle brackets.
struct KindRef {
  std::string text;
  bool bracketed = false;

  friend bool operator==(const KindRef&, const KindRef&) = default;
};

struct PatternExpr {
  enum class Node { Threshold, Aggregate, Trend, Seq, Absent, And, Or, Not };

  Node node = Node::Threshold;
  KindRef kind;
  KindRef kind_b;  // Seq only: the second kind
  AggFn fn = AggFn::Count;
  Cmp cmp = Cmp::Gt;
  double constant = 0.0;
  std::vector<PatternExpr> children;

  friend bool operator==(const PatternExpr&, const PatternExpr&) = default;

  static PatternExpr threshold(KindRef kind, Cmp cmp, double constant);
  static PatternExpr aggregate(AggFn fn, KindRef kind, Cmp cmp, double constant);
  static PatternExpr trend(KindRef kind, Cmp cmp, double constant);
  static PatternExpr seq(KindRef first, KindRef second);
  static PatternExpr absent(KindRef kind);
  static PatternExpr all_of(std::vector<PatternExpr> children);
  static PatternExpr any_of(std::vector<PatternExpr> children);
  static PatternExpr negate(PatternExpr child);
};

struct WindowSpec {
  enum class Mode { Sliding, Tumbling };
  Mode mode = Mode::Tumbling;
  std::int64_t length = 0;  // seconds
  std::int64_t step = 0;    // seconds; equals length when tumbling

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

inline constexpr double kDefaultSeverity = 0.5;

struct CepRule {
  std::string name;
  WindowSpec window;
  PatternExpr pattern;
  std::string emit;
  double severity = kDefaultSeverity;

  friend bool operator==(const CepRule&, const CepRule&) = default;
};

/// Exactly one rule. Throws ParseFailure with Errc::SyntaxError or
/// Errc::SemanticError.
CepRule parse_rule(std::string_view text);
/// One or more rules; names must be unique.
std::vector<CepRule> parse_ruleset(std::string_view text);

std::string print_rule(const CepRule& rule);
std::string print_pattern(const PatternExpr& expr);
std::string print_duration(std::int64_t seconds);

}  // namespace semdrought::cep
