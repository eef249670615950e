#include "oracle.h"

#include <map>
#include <optional>
#include <string>

namespace rdfr::testing {

namespace {

using Assignment = std::map<std::string, TermId>;

bool bindSlot(const Slot& slot, TermId value, Assignment& a) {
  if (const TermId* id = std::get_if<TermId>(&slot)) return *id == value;
  const std::string& name = std::get<Variable>(slot).name;
  auto [it, inserted] = a.emplace(name, value);
  return inserted || it->second == value;
}

std::optional<TermId> valueOf(const Slot& slot, const Assignment& a) {
  if (const TermId* id = std::get_if<TermId>(&slot)) return *id;
  auto it = a.find(std::get<Variable>(slot).name);
  if (it == a.end()) return std::nullopt;
  return it->second;
}

struct Buckets {
  std::map<TermId, std::vector<Triple>> byPredicate;
  std::vector<Triple> all;

  explicit Buckets(const std::set<Triple>& triples) : all(triples.begin(), triples.end()) {
    for (const Triple& t : all) byPredicate[t.p].push_back(t);
  }
  const std::vector<Triple>& candidates(const Slot& predicate, const Assignment& a) const {
    static const std::vector<Triple> kNone;
    if (auto p = valueOf(predicate, a)) {
      auto it = byPredicate.find(*p);
      return it == byPredicate.end() ? kNone : it->second;
    }
    return all;
  }
};

void enumerate(const Rule& rule, std::size_t index, const Assignment& a, const Buckets& buckets,
               std::set<Triple>& out) {
  if (index == rule.antecedents.size()) {
    const TriplePattern& c = rule.consequent;
    out.insert({*valueOf(c.s, a), *valueOf(c.p, a), *valueOf(c.o, a)});
    return;
  }
  const TriplePattern& pattern = rule.antecedents[index];
  for (const Triple& t : buckets.candidates(pattern.p, a)) {
    Assignment next = a;
    if (bindSlot(pattern.s, t.s, next) && bindSlot(pattern.p, t.p, next) &&
        bindSlot(pattern.o, t.o, next)) {
      enumerate(rule, index + 1, next, buckets, out);
    }
  }
}

void replace(const std::set<Triple>& closure, std::set<Triple>& out) {
  std::map<TermId, std::vector<TermId>> equal;
  for (const Triple& t : closure) {
    if (t.p == vocab::kSameAs) equal[t.s].push_back(t.o);
  }
  for (const Triple& t : closure) {
    if (auto it = equal.find(t.s); it != equal.end()) {
      for (TermId y : it->second) out.insert({y, t.p, t.o});
    }
    if (auto it = equal.find(t.p); it != equal.end()) {
      for (TermId y : it->second) out.insert({t.s, y, t.o});
    }
    if (auto it = equal.find(t.o); it != equal.end()) {
      for (TermId y : it->second) out.insert({t.s, t.p, y});
    }
  }
}

}  // namespace

std::set<Triple> naiveClosure(const std::vector<Triple>& input, const std::vector<Rule>& rules,
                              const OracleOptions& options) {
  std::set<Triple> closure(input.begin(), input.end());
  for (;;) {
    std::set<Triple> next = closure;
    Buckets buckets(closure);
    for (const Rule& rule : rules) enumerate(rule, 0, {}, buckets, next);
    if (options.replacement) replace(closure, next);
    if (next.size() == closure.size()) return closure;
    closure = std::move(next);
  }
}

std::set<Triple> expandedClosure(const KnowledgeBase& kb) {
  const EquivalenceMap& eq = kb.equivalence();
  std::vector<Triple> triples(kb.triples().begin(), kb.triples().end());
  std::set<Triple> out;
  if (eq.empty()) {
    out.insert(triples.begin(), triples.end());
    return out;
  }
  for (const Triple& t : expandAnswers(eq, triples)) out.insert(t);
  for (const Triple& t : sameAsClosure(eq)) out.insert(t);
  return out;
}

std::vector<Triple> filterClosure(const std::set<Triple>& closure, const TriplePattern& goal) {
  std::vector<Triple> out;
  for (const Triple& t : closure) {
    if (matches(goal, t)) out.push_back(t);
  }
  return out;
}

}  // namespace rdfr::testing
