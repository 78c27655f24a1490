#include <cctype>

#include "semdrought/core/error.hpp"
#include "semdrought/store/triple_store.hpp"
#include "term_reader.hpp"

namespace semdrought::store {

namespace {

bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class RuleLine {
 public:
  RuleLine(std::string_view text, std::size_t line, const Namespaces& ns)
      : reader_(text, line), ns_(ns) {}

  InferenceRule parse() {
    reader_.skip_ws();
    const auto name = word();
    if (name.empty()) reader_.fail("rule name");
    reader_.skip_ws();
    if (!reader_.consume(":")) reader_.fail("':' after rule name");

    std::vector<TriplePattern> body;
    body.push_back(pattern());
    for (;;) {
      reader_.skip_ws();
      if (reader_.consume("->")) break;
      if (!reader_.consume(".")) reader_.fail("'.' between body patterns or '->'");
      body.push_back(pattern());
    }
    auto head = pattern();
    reader_.skip_ws();
    if (!reader_.at_end() && reader_.peek() != '#') reader_.fail("end of rule");
    return InferenceRule::make(name, std::move(body), std::move(head));
  }

 private:
  std::string word() {
    std::string out;
    while (!reader_.at_end() && name_char(reader_.peek())) {
      out += reader_.peek();
      reader_.advance();
    }
    return out;
  }

  PatternTerm position() {
    reader_.skip_ws();
    const char c = reader_.peek();
    if (c == '?') {
      reader_.consume("?");
      const auto name = word();
      if (name.empty()) reader_.fail("variable name");
      return var(name);
    }
    if (c == '<' || c == '"' || c == '_') return reader_.term();
    // prefixed name
    std::string prefixed;
    while (!reader_.at_end() && !std::isspace(static_cast<unsigned char>(reader_.peek())) &&
           reader_.peek() != '.') {
      prefixed += reader_.peek();
      reader_.advance();
    }
    const auto expanded = ns_.expand(prefixed);
    if (expanded == prefixed || !is_valid_iri(expanded)) reader_.fail("a term or ?variable");
    return Term::iri(expanded);
  }

  TriplePattern pattern() {
    auto s = position();
    auto p = position();
    auto o = position();
    return TriplePattern::make(std::move(s), std::move(p), std::move(o));
  }

  detail::TermReader reader_;
  const Namespaces& ns_;
};

}  // namespace

std::vector<InferenceRule> parse_inference_rules(std::string_view text, const Namespaces& ns) {
  std::vector<InferenceRule> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    detail::TermReader probe(line, line_no);
    probe.skip_ws();
    if (probe.at_end() || probe.peek() == '#') continue;
    out.push_back(RuleLine(line, line_no, ns).parse());
  }
  return out;
}

}  // namespace semdrought::store
