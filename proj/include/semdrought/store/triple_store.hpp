#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "semdrought/core/term.hpp"

namespace semdrought::store {

struct Variable {
  std::string name;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Term, Variable>;

/// Variable names must match [a-zA-Z][a-zA-Z0-9_]*; make() checks.
struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  static TriplePattern make(PatternTerm s, PatternTerm p, PatternTerm o);
  std::set<std::string> variables() const;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

PatternTerm var(std::string name);
PatternTerm iri(std::string value);

using Binding = std::map<std::string, Term>;
using BindingSet = std::set<Binding>;

/// Positive Datalog rule over triples. Every head variable must occur in
/// the body, so saturation never invents terms and always terminates.
struct InferenceRule {
  std::string name;
  std::vector<TriplePattern> body;
  TriplePattern head;

  /// Errors: InvalidRule (empty body, head variable not in body).
  static InferenceRule make(std::string name, std::vector<TriplePattern> body, TriplePattern head);
};

/// Instantiates `pattern` under `binding`; nullopt when a variable is
/// unbound or the result is not a well-formed triple.
std::optional<Triple> instantiate(const TriplePattern& pattern, const Binding& binding);

/// Unifies one pattern with one triple, extending `binding` in place.
bool unify(const TriplePattern& pattern, const Triple& triple, Binding& binding);

/// In-memory set of triples with subject/predicate/object indexes.
/// Not internally synchronized: callers provide many-readers/one-writer.
class TripleStore {
 public:
  /// True iff the triple was not already present.
  bool insert(const Triple& triple);
  bool contains(const Triple& triple) const;
  bool is_inferred(const Triple& triple) const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  BindingSet match_pattern(const TriplePattern& pattern) const;
  /// Natural join of the per-pattern solutions. `patterns` must be non-empty.
  BindingSet query_bgp(std::span<const TriplePattern> patterns) const;

  /// Computes the least fixpoint of `rules` over the store (semi-naive).
  /// Returns the number of distinct triples added; they are marked inferred.
  std::size_t saturate(std::span<const InferenceRule> rules);

  /// All triples in sorted order.
  std::vector<Triple> triples() const;
  /// Triples whose subject is `subject`, in insertion order.
  std::vector<Triple> about(const Term& subject) const;

  friend bool operator==(const TripleStore& a, const TripleStore& b);

 private:
  struct Entry {
    Triple triple;
    bool inferred = false;
  };

  bool insert_entry(const Triple& triple, bool inferred);
  const std::vector<std::size_t>* candidates(const TriplePattern& pattern, const Binding& bound) const;
  template <typename Fn>
  void match_each(const TriplePattern& pattern, const Binding& bound, Fn&& fn) const;
  template <typename Fn>
  void join(std::span<const TriplePattern> patterns, std::vector<bool>& used, Binding& binding,
            std::size_t remaining, Fn&& fn) const;

  std::vector<Entry> entries_;
  std::unordered_map<Triple, std::size_t> lookup_;
  std::unordered_map<Term, std::vector<std::size_t>> by_subject_;
  std::unordered_map<Term, std::vector<std::size_t>> by_predicate_;
  std::unordered_map<Term, std::vector<std::size_t>> by_object_;
};

/// subClassOf and subPropertyOf transitivity, type propagation through
/// subClassOf, predicate propagation through subPropertyOf.
std::vector<InferenceRule> builtin_rules(const Namespaces& ns);

/// Parses one rule per non-empty, non-comment line:
///   name: ?a rdfs:subClassOf ?b . ?b rdfs:subClassOf ?c -> ?a rdfs:subClassOf ?c
/// Terms are ?variables, <iri>, prefixed names or "lexical"^^<datatype>.
std::vector<InferenceRule> parse_inference_rules(std::string_view text, const Namespaces& ns);

}  // namespace semdrought::store
