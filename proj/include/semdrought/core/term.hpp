#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace semdrought {

inline constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfsNs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kDefaultBaseIri = "http://example.org/semdrought#";

enum class TermKind : std::uint8_t { Iri, Literal, Blank };
enum class Datatype : std::uint8_t { Double, DateTime, String, Integer };

std::string datatype_iri(Datatype dt);
bool datatype_from_iri(std::string_view iri, Datatype& out);

/// True for non-empty, whitespace-free identifiers carrying "://" or one of
/// the registered prefixes (rdf:, rdfs:, xsd:, ex:, urn:).
bool is_valid_iri(std::string_view text) noexcept;

/// RDF term. Immutable value; construct through the factories, which
/// enforce the per-variant invariants and throw Error otherwise.
class Term {
 public:
  static Term iri(std::string value);
  static Term literal(std::string lexical, Datatype datatype);
  static Term blank(std::string label);

  static Term of_double(double value);
  static Term of_datetime(std::int64_t epoch_seconds);
  static Term of_integer(std::int64_t value);
  static Term of_string(std::string value);

  TermKind kind() const noexcept { return kind_; }
  const std::string& value() const noexcept { return value_; }
  Datatype datatype() const noexcept { return datatype_; }

  bool is_iri() const noexcept { return kind_ == TermKind::Iri; }
  bool is_literal() const noexcept { return kind_ == TermKind::Literal; }
  bool is_blank() const noexcept { return kind_ == TermKind::Blank; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(TermKind kind, std::string value, Datatype dt)
      : kind_(kind), datatype_(dt), value_(std::move(value)) {}

  TermKind kind_;
  Datatype datatype_;  // String for IRIs and blanks
  std::string value_;
};

/// Subject is an IRI or blank node and the predicate is always an IRI;
/// make() enforces both.
struct Triple {
  Term subject;
  Term predicate;
  Term object;

  static Triple make(Term subject, Term predicate, Term object);

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

bool is_valid_triple(const Term& subject, const Term& predicate) noexcept;

/// Prefix table: rdf:, rdfs:, xsd: are fixed, ex: is the configured base.
class Namespaces {
 public:
  explicit Namespaces(std::string base = std::string(kDefaultBaseIri));

  const std::string& base() const noexcept { return base_; }
  std::string ex(std::string_view local) const { return base_ + std::string(local); }
  std::string rdf(std::string_view local) const { return std::string(kRdfNs) + std::string(local); }
  std::string rdfs(std::string_view local) const {
    return std::string(kRdfsNs) + std::string(local);
  }

  /// "ex:foo" → base + "foo"; rdf:/rdfs:/xsd: likewise; anything else unchanged.
  std::string expand(std::string_view text) const;
  /// Inverse of expand for IRIs under a known namespace.
  std::string compact(std::string_view iri) const;

 private:
  std::string base_;
};

}  // namespace semdrought

template <>
struct std::hash<semdrought::Term> {
  std::size_t operator()(const semdrought::Term& t) const noexcept {
    const std::size_t h = std::hash<std::string>{}(t.value());
    return h ^ (static_cast<std::size_t>(t.kind()) * 0x9e3779b97f4a7c15ULL) ^
           (static_cast<std::size_t>(t.datatype()) << 7);
  }
};

template <>
struct std::hash<semdrought::Triple> {
  std::size_t operator()(const semdrought::Triple& t) const noexcept {
    std::hash<semdrought::Term> h;
    std::size_t seed = h(t.subject);
    seed ^= h(t.predicate) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    seed ^= h(t.object) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
};
