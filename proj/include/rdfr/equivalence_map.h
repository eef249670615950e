#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rdfr/triple.h"

namespace rdfr {

// Union-find forest over the terms mentioned by owl:sameAs statements. The
// representative of a class is always its smallest id, which makes the
// choice independent of merge order.
//
// Every mentioned term has a parent entry (roots point at themselves), so
// a term asserted equal only to itself still forms a class. The member
// index used for answer expansion is rebuilt by finalize().
class EquivalenceMap {
 public:
  // Merges the classes of a and b; returns the merged representative.
  TermId unite(TermId a, TermId b);

  TermId find(TermId x);
  TermId find(TermId x) const;

  bool contains(TermId x) const { return parent_.contains(x); }
  bool empty() const { return parent_.empty(); }

  // Flattens the forest and rebuilds the representative -> members index.
  void finalize();
  bool finalized() const { return !dirty_; }

  // Sorted members of x's class; {x} for terms never mentioned by sameAs.
  // Requires finalize().
  std::vector<TermId> members(TermId x) const;
  const std::map<TermId, std::vector<TermId>>& classes() const;

  std::size_t termCount() const { return parent_.size(); }
  std::size_t classCount() const;
  // Parent entries plus member-index entries.
  std::size_t storedEntries() const;

  // (member, representative) for every mentioned term, sorted.
  std::vector<std::pair<TermId, TermId>> assignments() const;

 private:
  std::unordered_map<TermId, TermId> parent_;
  std::map<TermId, std::vector<TermId>> members_;
  bool dirty_ = false;
};

// Replaces every position of every triple by its class representative and
// drops the owl:sameAs statements; result is sorted and duplicate free.
std::vector<Triple> canonicalizeTriples(std::span<const Triple> triples, const EquivalenceMap& eq);

// Inverse of canonicalization for presentation: every answer is replaced by
// all member combinations of its subject, predicate and object classes.
// Output is sorted and duplicate free.
std::vector<Triple> expandAnswers(const EquivalenceMap& eq, std::span<const Triple> answers);

// The owl:sameAs statements an explicit reflexive, symmetric and transitive
// closure would hold: n^2 per class of n members.
std::vector<Triple> sameAsClosure(const EquivalenceMap& eq);
std::size_t sameAsClosureSize(const EquivalenceMap& eq);

}  // namespace rdfr
