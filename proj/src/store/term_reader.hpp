#pragma once

// Cursor over one line of N-Triples-like text, shared by the N-Triples
// loader and the inference-rule parser.

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "semdrought/core/error.hpp"
#include "semdrought/core/term.hpp"

namespace semdrought::store::detail {

class TermReader {
 public:
  TermReader(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  [[noreturn]] void fail(std::string expectation) const {
    throw ParseFailure(Errc::ParseError, line_, pos_ + 1, std::move(expectation));
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  bool consume(std::string_view lit) {
    if (s_.substr(pos_, lit.size()) != lit) return false;
    pos_ += lit.size();
    return true;
  }
  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }

  std::string iri_ref() {
    if (!consume("<")) fail("'<' starting an IRI");
    const auto end = s_.find('>', pos_);
    if (end == std::string_view::npos) fail("'>' closing the IRI");
    std::string value(s_.substr(pos_, end - pos_));
    if (!is_valid_iri(value)) fail("a valid IRI");
    pos_ = end + 1;
    return value;
  }

  Term term() {
    const char c = peek();
    if (c == '<') return Term::iri(iri_ref());
    if (c == '_') {
      if (!consume("_:")) fail("'_:' blank node");
      const auto begin = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                           s_[pos_] == '-'))
        ++pos_;
      if (pos_ == begin) fail("blank node label");
      return Term::blank(std::string(s_.substr(begin, pos_ - begin)));
    }
    if (c == '"') return literal();
    fail("an IRI, blank node or literal");
  }

  Term literal() {
    consume("\"");
    std::string lex;
    for (;;) {
      if (at_end()) fail("closing '\"'");
      const char ch = s_[pos_++];
      if (ch == '"') break;
      if (ch != '\\') {
        lex += ch;
        continue;
      }
      if (at_end()) fail("escape character");
      switch (s_[pos_++]) {
        case '\\': lex += '\\'; break;
        case '"': lex += '"'; break;
        case 'n': lex += '\n'; break;
        case 'r': lex += '\r'; break;
        case 't': lex += '\t'; break;
        default: --pos_; fail("one of \\\\ \\\" \\n \\r \\t");
      }
    }
    if (!consume("^^")) fail("'^^' datatype marker");
    const auto at = pos_;
    const auto dt_iri = iri_ref();
    Datatype dt;
    if (!datatype_from_iri(dt_iri, dt)) {
      pos_ = at;
      fail("a supported datatype IRI");
    }
    try {
      return Term::literal(std::move(lex), dt);
    } catch (const Error&) {
      pos_ = at;
      fail("a lexical form valid for its datatype");
    }
  }

 private:
  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace semdrought::store::detail
