#include "xml_reader.hpp"

#include <cctype>
#include <cstdint>

#include "semdrought/core/error.hpp"

namespace semdrought::ingest::xml {

namespace {

[[noreturn]] void malformed(std::string_view what, std::size_t pos) {
  throw Error(Errc::Malformed, "XML: " + std::string(what) + " at offset " + std::to_string(pos));
}

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  Element document() {
    skip_misc();
    if (starts("<?xml")) {
      const auto end = s_.find("?>", pos_);
      if (end == std::string_view::npos) malformed("unterminated declaration", pos_);
      pos_ = end + 2;
    }
    skip_misc();
    if (starts("<!DOCTYPE")) malformed("DTDs are not supported", pos_);
    if (!starts("<")) malformed("expected root element", pos_);
    Element root = element();
    skip_misc();
    if (pos_ != s_.size()) malformed("content after root element", pos_);
    return root;
  }

 private:
  bool starts(std::string_view lit) const { return s_.substr(pos_, lit.size()) == lit; }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void skip_comment() {
    const auto end = s_.find("-->", pos_ + 4);
    if (end == std::string_view::npos) malformed("unterminated comment", pos_);
    pos_ = end + 3;
  }

  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts("<!--")) {
        skip_comment();
      } else if (starts("<?") && !starts("<?xml")) {
        const auto end = s_.find("?>", pos_);
        if (end == std::string_view::npos) malformed("unterminated processing instruction", pos_);
        pos_ = end + 2;
      } else {
        return;
      }
    }
  }

  std::string name() {
    if (pos_ >= s_.size() || !is_name_start(s_[pos_])) malformed("expected a name", pos_);
    const auto begin = pos_;
    while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(begin, pos_ - begin));
  }

  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c) malformed(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  std::string decode(std::string_view raw, std::size_t at) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '<') malformed("'<' in character data", at + i);
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      const auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) malformed("unterminated entity", at + i);
      const auto ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (ent.size() > 1 && ent[0] == '#') {
        const bool hex = ent[1] == 'x';
        const auto digits = ent.substr(hex ? 2 : 1);
        if (digits.empty()) malformed("bad character reference", at + i);
        std::uint32_t cp = 0;
        for (char d : digits) {
          const int v = std::isdigit(static_cast<unsigned char>(d)) ? d - '0'
                        : hex && std::isxdigit(static_cast<unsigned char>(d))
                            ? std::tolower(static_cast<unsigned char>(d)) - 'a' + 10
                            : -1;
          if (v < 0 || cp > 0x10FFFF) malformed("bad character reference", at + i);
          cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        }
        if (cp == 0 || cp > 0x10FFFF) malformed("bad character reference", at + i);
        append_utf8(out, cp);
      } else {
        malformed("unknown entity", at + i);
      }
      i = semi;
    }
    return out;
  }

  Element element() {
    expect('<');
    Element el;
    el.name = name();
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size()) malformed("unterminated start tag", pos_);
      if (starts("/>")) {
        pos_ += 2;
        return el;
      }
      if (s_[pos_] == '>') {
        ++pos_;
        break;
      }
      auto attr = name();
      skip_ws();
      expect('=');
      skip_ws();
      if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) malformed("expected quote", pos_);
      const char q = s_[pos_++];
      const auto end = s_.find(q, pos_);
      if (end == std::string_view::npos) malformed("unterminated attribute", pos_);
      auto value = decode(s_.substr(pos_, end - pos_), pos_);
      pos_ = end + 1;
      if (!el.attributes.emplace(std::move(attr), std::move(value)).second)
        malformed("duplicate attribute", pos_);
    }
    // content
    for (;;) {
      if (pos_ >= s_.size()) malformed("missing end tag for <" + el.name + ">", pos_);
      if (starts("</")) {
        pos_ += 2;
        const auto closing = name();
        if (closing != el.name) malformed("mismatched end tag </" + closing + ">", pos_);
        skip_ws();
        expect('>');
        return el;
      }
      if (starts("<!--")) {
        skip_comment();
      } else if (starts("<![CDATA[")) {
        const auto end = s_.find("]]>", pos_);
        if (end == std::string_view::npos) malformed("unterminated CDATA", pos_);
        el.text += s_.substr(pos_ + 9, end - pos_ - 9);
        pos_ = end + 3;
      } else if (starts("<")) {
        el.children.push_back(element());
      } else {
        const auto next = s_.find('<', pos_);
        const auto stop = next == std::string_view::npos ? s_.size() : next;
        el.text += decode(s_.substr(pos_, stop - pos_), pos_);
        pos_ = stop;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Element parse_document(std::string_view text) { return Reader(text).document(); }

}  // namespace semdrought::ingest::xml
