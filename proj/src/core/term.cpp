#include "semdrought/core/term.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"

namespace semdrought {

namespace {

constexpr std::array<std::string_view, 5> kRegisteredPrefixes = {"rdf:", "rdfs:", "xsd:", "ex:",
                                                                  "urn:"};

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::string datatype_iri(Datatype dt) {
  switch (dt) {
    case Datatype::Double: return std::string(kXsdNs) + "double";
    case Datatype::DateTime: return std::string(kXsdNs) + "dateTime";
    case Datatype::String: return std::string(kXsdNs) + "string";
    case Datatype::Integer: return std::string(kXsdNs) + "integer";
  }
  return {};
}

bool datatype_from_iri(std::string_view iri, Datatype& out) {
  for (auto dt : {Datatype::Double, Datatype::DateTime, Datatype::String, Datatype::Integer}) {
    if (datatype_iri(dt) == iri) {
      out = dt;
      return true;
    }
  }
  return false;
}

bool is_valid_iri(std::string_view text) noexcept {
  if (text.empty()) return false;
  for (unsigned char c : text) {
    if (std::isspace(c) || c == '<' || c == '>' || c == '"' || c < 0x20) return false;
  }
  if (text.find("://") != std::string_view::npos) return true;
  return std::any_of(kRegisteredPrefixes.begin(), kRegisteredPrefixes.end(),
                     [&](std::string_view p) { return starts_with(text, p) && text.size() > p.size(); });
}

Term Term::iri(std::string value) {
  if (!is_valid_iri(value)) throw Error(Errc::InvalidIri, "not a valid IRI: '" + value + "'", value);
  return Term(TermKind::Iri, std::move(value), Datatype::String);
}

Term Term::literal(std::string lexical, Datatype datatype) {
  switch (datatype) {
    case Datatype::Double:
      if (!parse_double(lexical))
        throw Error(Errc::BadLiteral, "not a finite double: '" + lexical + "'", lexical);
      break;
    case Datatype::DateTime:
      if (!parse_iso8601(lexical))
        throw Error(Errc::BadLiteral, "not an ISO-8601 UTC dateTime: '" + lexical + "'", lexical);
      break;
    case Datatype::Integer:
      if (!parse_integer(lexical))
        throw Error(Errc::BadLiteral, "not an integer: '" + lexical + "'", lexical);
      break;
    case Datatype::String:
      break;
  }
  return Term(TermKind::Literal, std::move(lexical), datatype);
}

Term Term::blank(std::string label) {
  const bool ok = !label.empty() && std::all_of(label.begin(), label.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
  if (!ok) throw Error(Errc::InvalidIri, "bad blank node label: '" + label + "'", label);
  return Term(TermKind::Blank, std::move(label), Datatype::String);
}

Term Term::of_double(double value) {
  if (!std::isfinite(value)) throw Error(Errc::NonFinite, "double literal must be finite");
  return Term(TermKind::Literal, canonical_double(value), Datatype::Double);
}

Term Term::of_datetime(std::int64_t epoch_seconds) {
  return Term(TermKind::Literal, format_iso8601(epoch_seconds), Datatype::DateTime);
}

Term Term::of_integer(std::int64_t value) {
  return Term(TermKind::Literal, std::to_string(value), Datatype::Integer);
}

Term Term::of_string(std::string value) {
  return Term(TermKind::Literal, std::move(value), Datatype::String);
}

bool is_valid_triple(const Term& subject, const Term& predicate) noexcept {
  return (subject.is_iri() || subject.is_blank()) && predicate.is_iri();
}

Triple Triple::make(Term subject, Term predicate, Term object) {
  if (!is_valid_triple(subject, predicate))
    throw Error(Errc::InvalidIri, "triple subject must be IRI/blank and predicate an IRI");
  return Triple{std::move(subject), std::move(predicate), std::move(object)};
}

Namespaces::Namespaces(std::string base) : base_(std::move(base)) {
  if (base_.find("://") == std::string::npos || !is_valid_iri(base_))
    throw Error(Errc::InvalidIri, "base IRI must be absolute: '" + base_ + "'", base_);
}

std::string Namespaces::expand(std::string_view text) const {
  if (starts_with(text, "ex:")) return base_ + std::string(text.substr(3));
  if (starts_with(text, "rdf:")) return std::string(kRdfNs) + std::string(text.substr(4));
  if (starts_with(text, "rdfs:")) return std::string(kRdfsNs) + std::string(text.substr(5));
  if (starts_with(text, "xsd:")) return std::string(kXsdNs) + std::string(text.substr(4));
  return std::string(text);
}

std::string Namespaces::compact(std::string_view iri) const {
  if (starts_with(iri, base_)) return "ex:" + std::string(iri.substr(base_.size()));
  if (starts_with(iri, kRdfNs)) return "rdf:" + std::string(iri.substr(kRdfNs.size()));
  if (starts_with(iri, kRdfsNs)) return "rdfs:" + std::string(iri.substr(kRdfsNs.size()));
  if (starts_with(iri, kXsdNs)) return "xsd:" + std::string(iri.substr(kXsdNs.size()));
  return std::string(iri);
}

}  // namespace semdrought
