#include "rdfr/pattern.h"

#include <algorithm>
#include <stdexcept>

#include "rdfr/dictionary.h"
#include "rdfr/ntriples.h"

namespace rdfr {

std::size_t TriplePattern::variableCount() const {
  std::size_t n = 0;
  for (const Slot* slot : slots()) n += variableOf(*slot) != nullptr;
  return n;
}

Triple TriplePattern::toTriple() const {
  if (!ground()) throw std::logic_error("pattern has unbound variables");
  return {std::get<TermId>(s), std::get<TermId>(p), std::get<TermId>(o)};
}

TriplePattern patternOf(const Triple& t) { return {t.s, t.p, t.o}; }

Binding::Binding(std::initializer_list<std::pair<std::string, TermId>> entries) {
  for (const auto& [name, id] : entries) {
    if (!bind(name, id)) throw std::invalid_argument("conflicting binding for ?" + name);
  }
}

std::optional<TermId> Binding::get(const std::string& name) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const auto& entry, const std::string& n) { return entry.first < n; });
  if (it != entries_.end() && it->first == name) return it->second;
  return std::nullopt;
}

bool Binding::bind(const std::string& name, TermId id) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const auto& entry, const std::string& n) { return entry.first < n; });
  if (it != entries_.end() && it->first == name) return it->second == id;
  entries_.insert(it, {name, id});
  return true;
}

bool operator==(const Binding& a, const Binding& b) { return a.entries_ == b.entries_; }

bool matches(const TriplePattern& pattern, const Triple& t) {
  Binding scratch;
  return unifyWithTriple(pattern, t, scratch);
}

bool unifyWithTriple(const TriplePattern& pattern, const Triple& t, Binding& binding) {
  const TermId values[3] = {t.s, t.p, t.o};
  auto slots = pattern.slots();
  for (int i = 0; i < 3; ++i) {
    if (const TermId* id = boundId(*slots[i])) {
      if (*id != values[i]) return false;
    } else if (!binding.bind(variableOf(*slots[i])->name, values[i])) {
      return false;
    }
  }
  return true;
}

TriplePattern normalizeVariables(const TriplePattern& pattern) {
  std::vector<std::string> seen;
  auto rename = [&](const Slot& slot) -> Slot {
    const Variable* v = variableOf(slot);
    if (!v) return slot;
    auto it = std::find(seen.begin(), seen.end(), v->name);
    std::size_t index = static_cast<std::size_t>(it - seen.begin());
    if (it == seen.end()) seen.push_back(v->name);
    return Variable{std::to_string(index)};
  };
  // Evaluation order matters for the numbering; keep it explicit.
  Slot s = rename(pattern.s);
  Slot p = rename(pattern.p);
  Slot o = rename(pattern.o);
  return {std::move(s), std::move(p), std::move(o)};
}

bool isTBoxResident(const TriplePattern& pattern) {
  const TermId* p = boundId(pattern.p);
  if (!p) return false;
  if (*p == vocab::kSubClassOf || *p == vocab::kSubPropertyOf) return true;
  const TermId* o = boundId(pattern.o);
  return *p == vocab::kType && o && *o == vocab::kSymmetricProperty;
}

std::string formatSlot(const Slot& slot, const Dictionary& dict) {
  if (const Variable* v = variableOf(slot)) return "?" + v->name;
  TermId id = std::get<TermId>(slot);
  if (!dict.contains(id)) return "<#" + std::to_string(raw(id)) + ">";
  return formatTerm(dict.resolve(id));
}

std::string formatPattern(const TriplePattern& pattern, const Dictionary& dict) {
  return formatSlot(pattern.s, dict) + " " + formatSlot(pattern.p, dict) + " " +
         formatSlot(pattern.o, dict);
}

}  // namespace rdfr
