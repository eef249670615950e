#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rdfr/triple.h"

namespace rdfr {

class Dictionary;

struct Variable {
  std::string name;

  friend auto operator<=>(const Variable&, const Variable&) = default;
  friend bool operator==(const Variable&, const Variable&) = default;
};

// One position of a triple pattern: a constant or a named variable.
using Slot = std::variant<TermId, Variable>;

inline Slot var(std::string name) { return Variable{std::move(name)}; }

inline const TermId* boundId(const Slot& slot) { return std::get_if<TermId>(&slot); }
inline const Variable* variableOf(const Slot& slot) { return std::get_if<Variable>(&slot); }

struct TriplePattern {
  Slot s;
  Slot p;
  Slot o;

  std::array<const Slot*, 3> slots() const { return {&s, &p, &o}; }
  std::size_t variableCount() const;
  bool ground() const { return variableCount() == 0; }
  // Only meaningful when ground().
  Triple toTriple() const;

  friend auto operator<=>(const TriplePattern&, const TriplePattern&) = default;
  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

TriplePattern patternOf(const Triple& t);

// Patterns that can only match TBox triples: predicate rdfs:subClassOf or
// rdfs:subPropertyOf, or rdf:type with object owl:SymmetricProperty.
bool isTBoxResident(const TriplePattern& pattern);

// Variable -> id assignment. Rebinding a variable to a different id is a
// failed unification, never an overwrite.
class Binding {
 public:
  Binding() = default;
  Binding(std::initializer_list<std::pair<std::string, TermId>> entries);

  std::optional<TermId> get(const std::string& name) const;
  // False when `name` is already bound to a different id.
  bool bind(const std::string& name, TermId id);
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  const std::vector<std::pair<std::string, TermId>>& entries() const { return entries_; }

  friend bool operator==(const Binding& a, const Binding& b);

 private:
  std::vector<std::pair<std::string, TermId>> entries_;  // sorted by name
};

// True iff every bound position equals the triple and repeated variables see
// equal ids.
bool matches(const TriplePattern& pattern, const Triple& t);

// Extends `binding` so that `pattern` under it equals `t`; leaves `binding`
// unspecified and returns false on mismatch.
bool unifyWithTriple(const TriplePattern& pattern, const Triple& t, Binding& binding);

// Renames variables to ?0, ?1, ... in order of first occurrence, so two
// patterns that differ only in variable names normalize identically.
TriplePattern normalizeVariables(const TriplePattern& pattern);

std::string formatSlot(const Slot& slot, const Dictionary& dict);
std::string formatPattern(const TriplePattern& pattern, const Dictionary& dict);

}  // namespace rdfr
