#pragma once

#include <cstddef>
#include <span>
#include <unordered_set>
#include <vector>

#include "rdfr/equivalence_map.h"
#include "rdfr/pattern.h"
#include "rdfr/triple.h"

namespace rdfr {

// ABox + TBox triple set with SPO, POS and OSP sorted indexes and the
// owl:sameAs equivalence map.
//
// Inserts are buffered and become visible to lookups at the next commit();
// indexes are sorted arrays rebuilt at phase boundaries. Between commits a
// knowledge base is an immutable snapshot that may be shared read-only.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(std::span<const Triple> triples);

  // True iff `t` was absent (committed or pending).
  bool insert(const Triple& t);
  std::size_t insertAll(std::span<const Triple> triples);
  void commit();
  bool committed() const { return pending_.empty(); }

  bool contains(const Triple& t) const;

  std::size_t size() const { return spo_.size() + pending_.size(); }
  std::size_t tboxSize() const { return tboxCount_; }
  std::size_t aboxSize() const { return size() - tboxCount_; }

  // Matches on bound positions. The index is picked from the bound prefix:
  // SPO when s is bound, POS when p is bound, OSP when o is bound.
  std::vector<Triple> lookup(const TriplePattern& pattern) const;

  template <typename Fn>
  void forEachMatch(const TriplePattern& pattern, Fn&& fn) const {
    for (const Triple& t : matchRange(pattern)) {
      if (positionsMatch(pattern, t)) fn(t);
    }
  }

  // All triples in SPO order (committed state).
  std::span<const Triple> triples() const;
  std::vector<Triple> tbox() const;
  std::vector<Triple> abox() const;

  EquivalenceMap& equivalence() { return equivalence_; }
  const EquivalenceMap& equivalence() const { return equivalence_; }

  // Set by the materializer once the closure has been computed.
  bool materialized() const { return materialized_; }
  void setMaterialized(bool value) { materialized_ = value; }

 private:
  enum class Order { Spo, Pos, Osp };

  std::span<const Triple> matchRange(const TriplePattern& pattern) const;
  static bool positionsMatch(const TriplePattern& pattern, const Triple& t);
  void requireCommitted() const;

  std::vector<Triple> spo_;
  std::vector<Triple> pos_;
  std::vector<Triple> osp_;
  std::vector<Triple> pending_;
  std::unordered_set<Triple, TripleHash> pendingSet_;
  std::size_t tboxCount_ = 0;
  EquivalenceMap equivalence_;
  bool materialized_ = false;
};

// Builds the equivalence map from every owl:sameAs statement, then rewrites
// all other triples to class representatives. The sameAs statements are
// consumed; the map is kept on the result for answer expansion.
KnowledgeBase canonicalize(const KnowledgeBase& kb);
KnowledgeBase canonicalize(std::span<const Triple> triples);

// Unites subject and object of each statement. True when a class changed
// or a term was seen for the first time. Call finalize() afterwards.
bool mergeSameAs(EquivalenceMap& eq, std::span<const Triple> sameAsStatements);

}  // namespace rdfr
