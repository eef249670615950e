#include "rdfr/knowledge_base.h"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace rdfr {

namespace {

using Key = std::tuple<TermId, TermId, TermId>;

Key spoKey(const Triple& t) { return {t.s, t.p, t.o}; }
Key posKey(const Triple& t) { return {t.p, t.o, t.s}; }
Key ospKey(const Triple& t) { return {t.o, t.s, t.p}; }

struct ByPos {
  bool operator()(const Triple& a, const Triple& b) const { return posKey(a) < posKey(b); }
};
struct ByOsp {
  bool operator()(const Triple& a, const Triple& b) const { return ospKey(a) < ospKey(b); }
};

// Range of `index` (sorted by keyOf) whose first `prefixLength` key
// components equal `prefix`.
template <typename KeyOf>
std::span<const Triple> prefixRange(const std::vector<Triple>& index, KeyOf keyOf,
                                    const std::array<TermId, 3>& prefix, int prefixLength) {
  auto compare = [&](const Triple& t) {
    Key k = keyOf(t);
    const TermId parts[3] = {std::get<0>(k), std::get<1>(k), std::get<2>(k)};
    for (int i = 0; i < prefixLength; ++i) {
      if (parts[i] < prefix[i]) return -1;
      if (parts[i] > prefix[i]) return 1;
    }
    return 0;
  };
  auto lo = std::partition_point(index.begin(), index.end(),
                                 [&](const Triple& t) { return compare(t) < 0; });
  auto hi = std::partition_point(lo, index.end(), [&](const Triple& t) { return compare(t) == 0; });
  return {lo, hi};
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::span<const Triple> triples) {
  insertAll(triples);
  commit();
}

bool KnowledgeBase::insert(const Triple& t) {
  if (std::binary_search(spo_.begin(), spo_.end(), t)) return false;
  if (!pendingSet_.insert(t).second) return false;
  pending_.push_back(t);
  if (isTBoxTriple(t)) ++tboxCount_;
  return true;
}

std::size_t KnowledgeBase::insertAll(std::span<const Triple> triples) {
  std::size_t added = 0;
  for (const Triple& t : triples) added += insert(t);
  return added;
}

void KnowledgeBase::commit() {
  if (pending_.empty()) return;
  auto merge = [&](std::vector<Triple>& index, auto less) {
    std::vector<Triple> add = pending_;
    std::sort(add.begin(), add.end(), less);
    std::size_t mid = index.size();
    index.insert(index.end(), add.begin(), add.end());
    std::inplace_merge(index.begin(), index.begin() + static_cast<std::ptrdiff_t>(mid), index.end(),
                       less);
  };
  merge(spo_, std::less<Triple>{});
  merge(pos_, ByPos{});
  merge(osp_, ByOsp{});
  pending_.clear();
  pendingSet_.clear();
}

bool KnowledgeBase::contains(const Triple& t) const {
  return std::binary_search(spo_.begin(), spo_.end(), t) || pendingSet_.contains(t);
}

void KnowledgeBase::requireCommitted() const {
  if (!pending_.empty()) {
    throw std::logic_error("knowledge base has uncommitted inserts; call commit() first");
  }
}

std::span<const Triple> KnowledgeBase::matchRange(const TriplePattern& pattern) const {
  requireCommitted();
  const TermId* s = boundId(pattern.s);
  const TermId* p = boundId(pattern.p);
  const TermId* o = boundId(pattern.o);
  if (s) {
    if (o && !p) return prefixRange(osp_, ospKey, {*o, *s, {}}, 2);
    if (p) return prefixRange(spo_, spoKey, {*s, *p, o ? *o : TermId{}}, o ? 3 : 2);
    return prefixRange(spo_, spoKey, {*s, {}, {}}, 1);
  }
  if (p) return prefixRange(pos_, posKey, {*p, o ? *o : TermId{}, {}}, o ? 2 : 1);
  if (o) return prefixRange(osp_, ospKey, {*o, {}, {}}, 1);
  return spo_;
}

bool KnowledgeBase::positionsMatch(const TriplePattern& pattern, const Triple& t) {
  const TermId* s = boundId(pattern.s);
  const TermId* p = boundId(pattern.p);
  const TermId* o = boundId(pattern.o);
  return (!s || *s == t.s) && (!p || *p == t.p) && (!o || *o == t.o);
}

std::vector<Triple> KnowledgeBase::lookup(const TriplePattern& pattern) const {
  std::vector<Triple> out;
  forEachMatch(pattern, [&](const Triple& t) { out.push_back(t); });
  return out;
}

std::span<const Triple> KnowledgeBase::triples() const {
  requireCommitted();
  return spo_;
}

std::vector<Triple> KnowledgeBase::tbox() const {
  std::vector<Triple> out;
  for (const Triple& t : triples()) {
    if (isTBoxTriple(t)) out.push_back(t);
  }
  return out;
}

std::vector<Triple> KnowledgeBase::abox() const {
  std::vector<Triple> out;
  for (const Triple& t : triples()) {
    if (!isTBoxTriple(t)) out.push_back(t);
  }
  return out;
}

bool mergeSameAs(EquivalenceMap& eq, std::span<const Triple> sameAsStatements) {
  bool changed = false;
  for (const Triple& t : sameAsStatements) {
    bool alreadyEqual = eq.contains(t.s) && eq.contains(t.o) && eq.find(t.s) == eq.find(t.o);
    changed |= !alreadyEqual;
    eq.unite(t.s, t.o);
  }
  return changed;
}

KnowledgeBase canonicalize(std::span<const Triple> triples) {
  EquivalenceMap eq;
  std::vector<Triple> sameAs;
  for (const Triple& t : triples) {
    if (t.p == vocab::kSameAs) sameAs.push_back(t);
  }
  mergeSameAs(eq, sameAs);
  eq.finalize();
  std::vector<Triple> current = canonicalizeTriples(triples, eq);
  // A predicate equated with owl:sameAs canonicalizes to owl:sameAs itself;
  // those statements are equalities too.
  for (;;) {
    std::vector<Triple> extra;
    for (const Triple& t : current) {
      if (t.p == vocab::kSameAs) extra.push_back(t);
    }
    if (extra.empty()) break;
    mergeSameAs(eq, extra);
    eq.finalize();
    current = canonicalizeTriples(current, eq);
  }
  KnowledgeBase kb(current);
  kb.equivalence() = std::move(eq);
  return kb;
}

KnowledgeBase canonicalize(const KnowledgeBase& kb) {
  std::vector<Triple> all(kb.triples().begin(), kb.triples().end());
  // Earlier equalities stay in force.
  for (const auto& [member, rep] : kb.equivalence().assignments()) {
    all.push_back({member, vocab::kSameAs, rep});
  }
  KnowledgeBase out = canonicalize(std::span<const Triple>(all));
  out.setMaterialized(kb.materialized());
  return out;
}

}  // namespace rdfr
