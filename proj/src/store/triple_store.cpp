#include "semdrought/store/triple_store.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "semdrought/core/error.hpp"

namespace semdrought::store {

namespace {

bool valid_variable_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

void check_variable(const PatternTerm& t) {
  if (const auto* v = std::get_if<Variable>(&t); v && !valid_variable_name(v->name))
    throw Error(Errc::InvalidRule, "bad variable name '" + v->name + "'", v->name);
}

/// Binds or checks one position; false on conflict.
bool unify_position(const PatternTerm& p, const Term& value, Binding& binding) {
  if (const auto* t = std::get_if<Term>(&p)) return *t == value;
  const auto& name = std::get<Variable>(p).name;
  auto [it, inserted] = binding.try_emplace(name, value);
  return inserted || it->second == value;
}

const Term* resolved(const PatternTerm& p, const Binding& binding) {
  if (const auto* t = std::get_if<Term>(&p)) return t;
  auto it = binding.find(std::get<Variable>(p).name);
  return it == binding.end() ? nullptr : &it->second;
}

int bound_positions(const TriplePattern& p, const Binding& b) {
  return (resolved(p.subject, b) ? 1 : 0) + (resolved(p.predicate, b) ? 1 : 0) +
         (resolved(p.object, b) ? 1 : 0);
}

}  // namespace

TriplePattern TriplePattern::make(PatternTerm s, PatternTerm p, PatternTerm o) {
  for (const auto* t : {&s, &p, &o}) check_variable(*t);
  return TriplePattern{std::move(s), std::move(p), std::move(o)};
}

std::set<std::string> TriplePattern::variables() const {
  std::set<std::string> out;
  for (const auto* t : {&subject, &predicate, &object})
    if (const auto* v = std::get_if<Variable>(t)) out.insert(v->name);
  return out;
}

PatternTerm var(std::string name) {
  PatternTerm t = Variable{std::move(name)};
  check_variable(t);
  return t;
}

PatternTerm iri(std::string value) { return Term::iri(std::move(value)); }

InferenceRule InferenceRule::make(std::string name, std::vector<TriplePattern> body,
                                  TriplePattern head) {
  if (body.empty()) throw Error(Errc::InvalidRule, "rule '" + name + "' has an empty body", name);
  std::set<std::string> body_vars;
  for (const auto& p : body) {
    for (const auto& v : p.variables()) body_vars.insert(v);
    for (const auto* t : {&p.subject, &p.predicate, &p.object}) check_variable(*t);
  }
  for (const auto& v : head.variables())
    if (!body_vars.count(v))
      throw Error(Errc::InvalidRule,
                  "rule '" + name + "': head variable ?" + v + " does not occur in the body", name);
  return InferenceRule{std::move(name), std::move(body), std::move(head)};
}

std::optional<Triple> instantiate(const TriplePattern& pattern, const Binding& binding) {
  const Term* s = resolved(pattern.subject, binding);
  const Term* p = resolved(pattern.predicate, binding);
  const Term* o = resolved(pattern.object, binding);
  if (!s || !p || !o || !is_valid_triple(*s, *p)) return std::nullopt;
  return Triple{*s, *p, *o};
}

bool unify(const TriplePattern& pattern, const Triple& triple, Binding& binding) {
  return unify_position(pattern.subject, triple.subject, binding) &&
         unify_position(pattern.predicate, triple.predicate, binding) &&
         unify_position(pattern.object, triple.object, binding);
}

bool TripleStore::insert(const Triple& triple) { return insert_entry(triple, false); }

bool TripleStore::insert_entry(const Triple& triple, bool inferred) {
  if (!is_valid_triple(triple.subject, triple.predicate))
    throw Error(Errc::InvalidIri, "malformed triple");
  auto [it, inserted] = lookup_.try_emplace(triple, entries_.size());
  if (!inserted) return false;
  const auto idx = entries_.size();
  entries_.push_back({triple, inferred});
  by_subject_[triple.subject].push_back(idx);
  by_predicate_[triple.predicate].push_back(idx);
  by_object_[triple.object].push_back(idx);
  return true;
}

bool TripleStore::contains(const Triple& triple) const { return lookup_.count(triple) != 0; }

bool TripleStore::is_inferred(const Triple& triple) const {
  auto it = lookup_.find(triple);
  return it != lookup_.end() && entries_[it->second].inferred;
}

const std::vector<std::size_t>* TripleStore::candidates(const TriplePattern& pattern,
                                                        const Binding& bound) const {
  static const std::vector<std::size_t> kNone;
  const std::vector<std::size_t>* best = nullptr;
  const auto consider = [&](const PatternTerm& p,
                            const std::unordered_map<Term, std::vector<std::size_t>>& index) {
    const Term* t = resolved(p, bound);
    if (!t) return;
    auto it = index.find(*t);
    const auto* list = it == index.end() ? &kNone : &it->second;
    if (!best || list->size() < best->size()) best = list;
  };
  consider(pattern.subject, by_subject_);
  consider(pattern.predicate, by_predicate_);
  consider(pattern.object, by_object_);
  return best;  // nullptr: no bound position, scan everything
}

template <typename Fn>
void TripleStore::match_each(const TriplePattern& pattern, const Binding& bound, Fn&& fn) const {
  const auto* list = candidates(pattern, bound);
  const auto visit = [&](std::size_t idx) {
    Binding b = bound;
    if (unify(pattern, entries_[idx].triple, b)) fn(b);
  };
  if (list) {
    for (auto idx : *list) visit(idx);
  } else {
    for (std::size_t idx = 0; idx < entries_.size(); ++idx) visit(idx);
  }
}

BindingSet TripleStore::match_pattern(const TriplePattern& pattern) const {
  BindingSet out;
  match_each(pattern, Binding{}, [&](const Binding& b) { out.insert(b); });
  return out;
}

template <typename Fn>
void TripleStore::join(std::span<const TriplePattern> patterns, std::vector<bool>& used,
                       Binding& binding, std::size_t remaining, Fn&& fn) const {
  if (remaining == 0) {
    fn(binding);
    return;
  }
  std::size_t next = patterns.size();
  int best = -1;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (used[i]) continue;
    const int score = bound_positions(patterns[i], binding);
    if (score > best) {
      best = score;
      next = i;
    }
  }
  used[next] = true;
  match_each(patterns[next], binding, [&](const Binding& extended) {
    Binding b = extended;
    join(patterns, used, b, remaining - 1, fn);
  });
  used[next] = false;
}

BindingSet TripleStore::query_bgp(std::span<const TriplePattern> patterns) const {
  if (patterns.empty()) throw Error(Errc::PreconditionViolation, "query needs at least one pattern");
  BindingSet out;
  std::vector<bool> used(patterns.size(), false);
  Binding start;
  join(patterns, used, start, patterns.size(), [&](const Binding& b) { out.insert(b); });
  return out;
}

std::size_t TripleStore::saturate(std::span<const InferenceRule> rules) {
  std::vector<Triple> delta;
  delta.reserve(entries_.size());
  for (const auto& e : entries_) delta.push_back(e.triple);

  std::size_t added = 0;
  while (!delta.empty()) {
    std::unordered_set<Triple> fresh;
    for (const auto& rule : rules) {
      const std::span<const TriplePattern> body(rule.body);
      for (std::size_t i = 0; i < body.size(); ++i) {
        std::vector<bool> used(body.size(), false);
        used[i] = true;
        for (const auto& t : delta) {
          Binding b;
          if (!unify(body[i], t, b)) continue;
          join(body, used, b, body.size() - 1, [&](const Binding& full) {
            auto derived = instantiate(rule.head, full);
            if (derived && !contains(*derived)) fresh.insert(std::move(*derived));
          });
        }
      }
    }
    delta.assign(fresh.begin(), fresh.end());
    std::sort(delta.begin(), delta.end());
    for (const auto& t : delta) added += insert_entry(t, true) ? 1 : 0;
  }
  return added;
}

std::vector<Triple> TripleStore::triples() const {
  std::vector<Triple> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.triple);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Triple> TripleStore::about(const Term& subject) const {
  std::vector<Triple> out;
  if (auto it = by_subject_.find(subject); it != by_subject_.end())
    for (auto idx : it->second) out.push_back(entries_[idx].triple);
  return out;
}

bool operator==(const TripleStore& a, const TripleStore& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.entries_.begin(), a.entries_.end(),
                     [&](const TripleStore::Entry& e) { return b.contains(e.triple); });
}

std::vector<InferenceRule> builtin_rules(const Namespaces& ns) {
  const auto sub_class = iri(ns.rdfs("subClassOf"));
  const auto sub_prop = iri(ns.rdfs("subPropertyOf"));
  const auto type = iri(ns.rdf("type"));
  const auto a = var("a"), b = var("b"), c = var("c"), x = var("x"), y = var("y"), p = var("p"),
             q = var("q");
  return {
      InferenceRule::make("subclass_transitivity",
                          {TriplePattern::make(a, sub_class, b), TriplePattern::make(b, sub_class, c)},
                          TriplePattern::make(a, sub_class, c)),
      InferenceRule::make("subproperty_transitivity",
                          {TriplePattern::make(a, sub_prop, b), TriplePattern::make(b, sub_prop, c)},
                          TriplePattern::make(a, sub_prop, c)),
      InferenceRule::make("type_propagation",
                          {TriplePattern::make(x, type, a), TriplePattern::make(a, sub_class, b)},
                          TriplePattern::make(x, type, b)),
      InferenceRule::make("predicate_propagation",
                          {TriplePattern::make(x, p, y), TriplePattern::make(p, sub_prop, q)},
                          TriplePattern::make(x, q, y)),
  };
}

}  // namespace semdrought::store
