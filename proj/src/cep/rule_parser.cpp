#include <cctype>
#include <cmath>
#include <set>

#include "semdrought/cep/rule.hpp"
#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"
#include "semdrought/core/term.hpp"

namespace semdrought::cep {

namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "RULE", "WHEN", "WITHIN", "STEP", "EMIT", "SEVERITY", "AND", "OR", "NOT",
    "AVG",  "MIN",  "MAX",    "SUM",  "COUNT", "SLOPE",  "SEQ", "ABSENT"};

enum class Tok { Ident, Iri, Number, Duration, LParen, RParen, Arrow, Cmp, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  double number = 0.0;
  std::int64_t seconds = 0;
  Cmp cmp = Cmp::Lt;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = column();
    if (pos_ >= s_.size()) return t;
    const char c = s_[pos_];

    if (c == '(' || c == ')') {
      t.type = c == '(' ? Tok::LParen : Tok::RParen;
      t.text = std::string(1, c);
      ++pos_;
      return t;
    }
    if (c == '-' && peek(1) == '>') {
      t.type = Tok::Arrow;
      t.text = "->";
      pos_ += 2;
      return t;
    }
    if (c == '<' && ident_start(peek(1))) {
      const auto close = s_.find('>', pos_);
      if (close != std::string_view::npos) {
        std::string iri(s_.substr(pos_ + 1, close - pos_ - 1));
        if (is_valid_iri(iri)) {
          t.type = Tok::Iri;
          t.text = std::move(iri);
          pos_ = close + 1;
          return t;
        }
      }
    }
    if (c == '<' || c == '>' || c == '=' || c == '!') {
      const bool eq = peek(1) == '=';
      if ((c == '=' || c == '!') && !eq) fail(t, "a comparison operator");
      t.type = Tok::Cmp;
      t.text = std::string(s_.substr(pos_, eq ? 2 : 1));
      t.cmp = c == '<' ? (eq ? Cmp::Le : Cmp::Lt)
              : c == '>' ? (eq ? Cmp::Ge : Cmp::Gt)
              : c == '=' ? Cmp::Eq
                         : Cmp::Ne;
      pos_ += eq ? 2 : 1;
      return t;
    }
    if (digit(c) || (c == '-' && (digit(peek(1)) || peek(1) == '.')) || c == '.') return number(t);
    if (ident_start(c)) return ident(t);
    fail(t, "a token");
  }

  [[noreturn]] static void fail(const Token& at, std::string expectation) {
    throw ParseFailure(Errc::SyntaxError, at.line, at.column, std::move(expectation));
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }
  std::size_t column() const { return pos_ - line_start_ + 1; }

  void skip_space() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
        line_start_ = pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  Token number(Token t) {
    const auto begin = pos_;
    if (s_[pos_] == '-') ++pos_;
    while (digit(peek(0))) ++pos_;
    if (peek(0) == '.') {
      ++pos_;
      while (digit(peek(0))) ++pos_;
    }
    if ((peek(0) == 'e' || peek(0) == 'E') &&
        (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
      pos_ += 2;
      while (digit(peek(0))) ++pos_;
    }
    t.text = std::string(s_.substr(begin, pos_ - begin));
    const auto value = parse_double(t.text);
    if (!value || !std::isfinite(*value)) fail(t, "a finite number");
    t.number = *value;
    t.type = Tok::Number;

    const char unit = peek(0);
    if ((unit == 'd' || unit == 'h' || unit == 'm') && !ident_char(peek(1))) {
      ++pos_;
      t.text += unit;
      t.type = Tok::Duration;
      const double scale = unit == 'd' ? 86400.0 : unit == 'h' ? 3600.0 : 60.0;
      const double seconds = *value * scale;
      if (!(seconds > 0) || seconds > 1e15)
        throw ParseFailure(Errc::SemanticError, t.line, t.column, "a positive duration");
      const double rounded = std::round(seconds);
      if (std::fabs(seconds - rounded) > 1e-6 * std::max(1.0, seconds) ||
          static_cast<std::int64_t>(rounded) % 60 != 0)
        throw ParseFailure(Errc::SemanticError, t.line, t.column,
                           "a duration of whole minutes");
      t.seconds = static_cast<std::int64_t>(rounded);
    } else if (ident_char(unit)) {
      fail(t, "a number or a duration ending in d, h or m");
    }
    return t;
  }

  Token ident(Token t) {
    const auto begin = pos_;
    while (ident_char(peek(0))) ++pos_;
    if (peek(0) == ':') {
      const auto colon = pos_++;
      while (ident_char(peek(0)) || peek(0) == '/') ++pos_;
      if (pos_ == colon + 1) fail(t, "a local name after ':'");
    }
    t.type = Tok::Ident;
    t.text = std::string(s_.substr(begin, pos_ - begin));
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { advance(); }

  bool at_end() const { return cur_.type == Tok::End; }
  const Token& current() const { return cur_; }

  CepRule rule() {
    CepRule r;
    expect_keyword("RULE");
    r.name = name("a rule name");
    expect_keyword("WHEN");
    r.pattern = disjunction();
    expect_keyword("WITHIN");
    const auto length = duration();
    r.window = {WindowSpec::Mode::Tumbling, length.seconds, length.seconds};
    if (is_keyword("STEP")) {
      advance();
      const auto step = duration();
      if (step.seconds > length.seconds) semantic(step, "a STEP no longer than the window");
      r.window.mode = WindowSpec::Mode::Sliding;
      r.window.step = step.seconds;
    }
    expect_keyword("EMIT");
    r.emit = name("an event kind to emit");
    if (is_keyword("SEVERITY")) {
      advance();
      const auto sev = cur_;
      if (sev.type != Tok::Number) Lexer::fail(sev, "a severity number");
      if (sev.number < 0.0 || sev.number > 1.0) semantic(sev, "a severity in [0, 1]");
      r.severity = sev.number;
      advance();
    }
    return r;
  }

 private:
  [[noreturn]] static void semantic(const Token& at, std::string expectation) {
    throw ParseFailure(Errc::SemanticError, at.line, at.column, std::move(expectation));
  }

  void advance() { cur_ = lex_.next(); }

  bool is_keyword(std::string_view kw) const { return cur_.type == Tok::Ident && cur_.text == kw; }

  void expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) Lexer::fail(cur_, "'" + std::string(kw) + "'");
    advance();
  }

  void expect(Tok type, std::string_view what) {
    if (cur_.type != type) Lexer::fail(cur_, std::string(what));
    advance();
  }

  std::string name(std::string_view what) {
    if (cur_.type != Tok::Ident || kKeywords.contains(cur_.text)) Lexer::fail(cur_, std::string(what));
    auto out = cur_.text;
    advance();
    return out;
  }

  Token duration() {
    const auto t = cur_;
    if (t.type != Tok::Duration) Lexer::fail(t, "a duration such as 30d, 12h or 15m");
    advance();
    return t;
  }

  KindRef kind() {
    if (cur_.type == Tok::Iri) {
      KindRef k{cur_.text, true};
      advance();
      return k;
    }
    return KindRef{name("an event kind"), false};
  }

  PatternExpr disjunction() {
    std::vector<PatternExpr> parts{conjunction()};
    while (is_keyword("OR")) {
      advance();
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? std::move(parts.front()) : PatternExpr::any_of(std::move(parts));
  }

  PatternExpr conjunction() {
    std::vector<PatternExpr> parts{unary()};
    while (is_keyword("AND")) {
      advance();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? std::move(parts.front()) : PatternExpr::all_of(std::move(parts));
  }

  PatternExpr unary() {
    if (!is_keyword("NOT")) return primary();
    const auto at = cur_;
    advance();
    auto inner = primary();
    using N = PatternExpr::Node;
    if (inner.node != N::Threshold && inner.node != N::Aggregate && inner.node != N::Trend)
      semantic(at, "NOT applied to a threshold, aggregate or SLOPE comparison");
    return PatternExpr::negate(std::move(inner));
  }

  std::pair<Cmp, double> comparison() {
    if (cur_.type != Tok::Cmp) Lexer::fail(cur_, "a comparison operator");
    const auto cmp = cur_.cmp;
    advance();
    if (cur_.type != Tok::Number) Lexer::fail(cur_, "a number");
    const double value = cur_.number;
    advance();
    return {cmp, value};
  }

  KindRef parenthesized_kind() {
    expect(Tok::LParen, "'('");
    auto k = kind();
    expect(Tok::RParen, "')'");
    return k;
  }

  PatternExpr primary() {
    if (cur_.type == Tok::LParen) {
      advance();
      auto inner = disjunction();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (cur_.type == Tok::Ident) {
      static const std::pair<std::string_view, AggFn> kAggs[] = {
          {"AVG", AggFn::Avg}, {"MIN", AggFn::Min}, {"MAX", AggFn::Max},
          {"SUM", AggFn::Sum}, {"COUNT", AggFn::Count}};
      for (const auto& [kw, fn] : kAggs) {
        if (!is_keyword(kw)) continue;
        advance();
        auto k = parenthesized_kind();
        const auto [cmp, value] = comparison();
        return PatternExpr::aggregate(fn, std::move(k), cmp, value);
      }
      if (is_keyword("SLOPE")) {
        advance();
        auto k = parenthesized_kind();
        const auto [cmp, value] = comparison();
        return PatternExpr::trend(std::move(k), cmp, value);
      }
      if (is_keyword("SEQ")) {
        advance();
        expect(Tok::LParen, "'('");
        auto a = kind();
        expect(Tok::Arrow, "'->'");
        auto b = kind();
        expect(Tok::RParen, "')'");
        return PatternExpr::seq(std::move(a), std::move(b));
      }
      if (is_keyword("ABSENT")) {
        advance();
        return PatternExpr::absent(parenthesized_kind());
      }
    }
    if (cur_.type != Tok::Ident && cur_.type != Tok::Iri) Lexer::fail(cur_, "a pattern");
    auto k = kind();
    const auto [cmp, value] = comparison();
    return PatternExpr::threshold(std::move(k), cmp, value);
  }

  Lexer lex_;
  Token cur_;
};

}  // namespace

CepRule parse_rule(std::string_view text) {
  Parser p(text);
  auto rule = p.rule();
  if (!p.at_end()) Lexer::fail(p.current(), "end of input");
  return rule;
}

std::vector<CepRule> parse_ruleset(std::string_view text) {
  Parser p(text);
  std::vector<CepRule> out;
  std::set<std::string> names;
  do {
    const auto at = p.current();
    auto rule = p.rule();
    if (!names.insert(rule.name).second)
      throw ParseFailure(Errc::SemanticError, at.line, at.column,
                         "a rule name not used earlier (" + rule.name + ")");
    out.push_back(std::move(rule));
  } while (!p.at_end());
  return out;
}

}  // namespace semdrought::cep
