#include "semdrought/store/ntriples.hpp"

#include <algorithm>
#include <fstream>

#include "semdrought/core/error.hpp"
#include "term_reader.hpp"

namespace semdrought::store {

std::string to_ntriples(const Term& term) {
  switch (term.kind()) {
    case TermKind::Iri: return "<" + term.value() + ">";
    case TermKind::Blank: return "_:" + term.value();
    case TermKind::Literal: break;
  }
  std::string out = "\"";
  for (char c : term.value()) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"^^<" + datatype_iri(term.datatype()) + ">";
}

std::string serialize(const TripleStore& store) {
  std::vector<std::string> lines;
  lines.reserve(store.size());
  for (const auto& t : store.triples())
    lines.push_back(to_ntriples(t.subject) + " " + to_ntriples(t.predicate) + " " +
                    to_ntriples(t.object) + " .");
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

TripleStore load(std::string_view text) {
  TripleStore out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    detail::TermReader r(line, line_no);
    r.skip_ws();
    if (r.at_end() || r.peek() == '#') continue;

    Term s = r.term();
    if (s.is_literal()) r.fail("an IRI or blank node subject");
    r.skip_ws();
    if (r.peek() != '<') r.fail("an IRI predicate");
    Term p = r.term();
    r.skip_ws();
    Term o = r.term();
    r.skip_ws();
    if (!r.consume(".")) r.fail("terminal ' .'");
    r.skip_ws();
    if (!r.at_end() && r.peek() != '#') r.fail("end of line after ' .'");
    out.insert(Triple{std::move(s), std::move(p), std::move(o)});
  }
  return out;
}

void write_atomically(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::NotFound, "cannot write " + tmp.string(), tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(Errc::NotFound, "write failed for " + tmp.string(), tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace semdrought::store
