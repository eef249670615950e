#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfr/pattern.h"

namespace rdfr {

struct Rule {
  std::string name;
  std::vector<TriplePattern> antecedents;
  TriplePattern consequent;
  // Closure companion added so the printed rules reach their fixpoint; not
  // one of the rules the fragment is defined by.
  bool companion = false;

  // Variables of the consequent that no antecedent mentions.
  std::vector<std::string> unsafeVariables() const;
  bool safe() const { return unsafeVariables().empty(); }
};

class UnsafeBindingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace rules {
inline constexpr const char* kSameAsTrans = "R-sameAs-trans";
inline constexpr const char* kTypeSub = "R-type-sub";
inline constexpr const char* kSubTrans = "R-sub-trans";
inline constexpr const char* kSubProp = "R-subprop";
inline constexpr const char* kSubPropTrans = "R-subprop-trans";
inline constexpr const char* kSymmetric = "R-symm";
inline constexpr const char* kSameAsSymm = "R-sameAs-symm";
}  // namespace rules

// The seven built-in rules in their fixed order.
std::vector<Rule> builtinRuleset();

// Same rule up to consistent variable renaming (names and flags ignored).
bool sameShape(const Rule& a, const Rule& b);

// Binds consequent variables to the constants at the query's bound
// positions; fails when a consequent constant clashes with a query constant
// or a repeated consequent variable would need two values. Query variables
// impose no constraint.
std::optional<Binding> unifyConsequent(const Rule& rule, const TriplePattern& query);

TriplePattern substitute(const TriplePattern& pattern, const Binding& binding);

// One ground consequent per binding, sorted and duplicate free. Throws
// UnsafeBindingError when a binding leaves a consequent variable open.
std::vector<Triple> applyRule(const Rule& rule, std::span<const Binding> bindings);

using LookupFn = std::function<std::vector<Triple>(const TriplePattern&)>;

// Left-to-right nested-loop join: each antecedent is instantiated with the
// binding built so far, looked up, and every match extends the binding.
std::vector<Binding> joinAntecedents(const LookupFn& lookup,
                                     std::span<const TriplePattern> antecedents,
                                     const Binding& seed);

}  // namespace rdfr
