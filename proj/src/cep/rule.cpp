#include "semdrought/cep/rule.hpp"

#include "semdrought/core/lexical.hpp"

namespace semdrought::cep {

std::string_view cmp_symbol(Cmp c) noexcept {
  switch (c) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
    case Cmp::Eq: return "==";
    case Cmp::Ne: return "!=";
  }
  return "?";
}

std::string_view agg_name(AggFn f) noexcept {
  switch (f) {
    case AggFn::Avg: return "AVG";
    case AggFn::Min: return "MIN";
    case AggFn::Max: return "MAX";
    case AggFn::Sum: return "SUM";
    case AggFn::Count: return "COUNT";
  }
  return "?";
}

bool compare(double lhs, Cmp c, double rhs) noexcept {
  switch (c) {
    case Cmp::Lt: return lhs < rhs;
    case Cmp::Le: return lhs <= rhs;
    case Cmp::Gt: return lhs > rhs;
    case Cmp::Ge: return lhs >= rhs;
    case Cmp::Eq: return lhs == rhs;
    case Cmp::Ne: return lhs != rhs;
  }
  return false;
}

PatternExpr PatternExpr::threshold(KindRef kind, Cmp cmp, double constant) {
  PatternExpr e;
  e.node = Node::Threshold;
  e.kind = std::move(kind);
  e.cmp = cmp;
  e.constant = constant;
  return e;
}

PatternExpr PatternExpr::aggregate(AggFn fn, KindRef kind, Cmp cmp, double constant) {
  auto e = threshold(std::move(kind), cmp, constant);
  e.node = Node::Aggregate;
  e.fn = fn;
  return e;
}

PatternExpr PatternExpr::trend(KindRef kind, Cmp cmp, double constant) {
  auto e = threshold(std::move(kind), cmp, constant);
  e.node = Node::Trend;
  return e;
}

PatternExpr PatternExpr::seq(KindRef first, KindRef second) {
  PatternExpr e;
  e.node = Node::Seq;
  e.kind = std::move(first);
  e.kind_b = std::move(second);
  return e;
}

PatternExpr PatternExpr::absent(KindRef kind) {
  PatternExpr e;
  e.node = Node::Absent;
  e.kind = std::move(kind);
  return e;
}

PatternExpr PatternExpr::all_of(std::vector<PatternExpr> children) {
  PatternExpr e;
  e.node = Node::And;
  e.children = std::move(children);
  return e;
}

PatternExpr PatternExpr::any_of(std::vector<PatternExpr> children) {
  auto e = all_of(std::move(children));
  e.node = Node::Or;
  return e;
}

PatternExpr PatternExpr::negate(PatternExpr child) {
  PatternExpr e;
  e.node = Node::Not;
  e.children.push_back(std::move(child));
  return e;
}

namespace {

std::string kind_text(const KindRef& k) { return k.bracketed ? "<" + k.text + ">" : k.text; }

std::string comparison_text(const PatternExpr& e) {
  return " " + std::string(cmp_symbol(e.cmp)) + " " + canonical_double(e.constant);
}

void print_into(const PatternExpr& e, std::string& out);

void print_child(const PatternExpr& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(child, out);
  if (parens) out += ')';
}

void print_into(const PatternExpr& e, std::string& out) {
  using N = PatternExpr::Node;
  switch (e.node) {
    case N::Threshold:
      out += kind_text(e.kind) + comparison_text(e);
      return;
    case N::Aggregate:
      out += std::string(agg_name(e.fn)) + "(" + kind_text(e.kind) + ")" + comparison_text(e);
      return;
    case N::Trend:
      out += "SLOPE(" + kind_text(e.kind) + ")" + comparison_text(e);
      return;
    case N::Seq:
      out += "SEQ(" + kind_text(e.kind) + " -> " + kind_text(e.kind_b) + ")";
      return;
    case N::Absent:
      out += "ABSENT(" + kind_text(e.kind) + ")";
      return;
    case N::Not:
      out += "NOT ";
      print_child(e.children.front(), e.children.front().node == N::Not ||
                                          e.children.front().node == N::And ||
                                          e.children.front().node == N::Or,
                  out);
      return;
    case N::And:
    case N::Or: {
      const bool is_and = e.node == N::And;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += is_and ? " AND " : " OR ";
        const auto cn = e.children[i].node;
        print_child(e.children[i], cn == N::Or || (is_and && cn == N::And), out);
      }
      return;
    }
  }
}

}  // namespace

std::string print_pattern(const PatternExpr& expr) {
  std::string out;
  print_into(expr, out);
  return out;
}

std::string print_duration(std::int64_t seconds) {
  if (seconds % 86400 == 0) return std::to_string(seconds / 86400) + "d";
  if (seconds % 3600 == 0) return std::to_string(seconds / 3600) + "h";
  return std::to_string(seconds / 60) + "m";
}

std::string print_rule(const CepRule& rule) {
  std::string out = "RULE " + rule.name + " WHEN " + print_pattern(rule.pattern) + " WITHIN " +
                    print_duration(rule.window.length);
  if (rule.window.mode == WindowSpec::Mode::Sliding)
    out += " STEP " + print_duration(rule.window.step);
  out += " EMIT " + rule.emit + " SEVERITY " + canonical_double(rule.severity);
  return out;
}

}  // namespace semdrought::cep
