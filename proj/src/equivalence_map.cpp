#include "rdfr/equivalence_map.h"

#include <algorithm>
#include <stdexcept>

namespace rdfr {

TermId EquivalenceMap::find(TermId x) {
  auto it = parent_.find(x);
  if (it == parent_.end()) return x;
  TermId root = x;
  while (true) {
    TermId up = parent_[root];
    if (up == root) break;
    root = up;
  }
  // Path compression.
  while (x != root) {
    TermId& up = parent_[x];
    TermId next = up;
    up = root;
    x = next;
  }
  return root;
}

TermId EquivalenceMap::find(TermId x) const {
  auto it = parent_.find(x);
  if (it == parent_.end()) return x;
  while (it->second != it->first) it = parent_.find(it->second);
  return it->first;
}

TermId EquivalenceMap::unite(TermId a, TermId b) {
  parent_.try_emplace(a, a);
  parent_.try_emplace(b, b);
  TermId ra = find(a);
  TermId rb = find(b);
  dirty_ = true;
  if (ra == rb) return ra;
  if (rb < ra) std::swap(ra, rb);
  parent_[rb] = ra;
  return ra;
}

void EquivalenceMap::finalize() {
  members_.clear();
  std::vector<TermId> keys;
  keys.reserve(parent_.size());
  for (const auto& entry : parent_) keys.push_back(entry.first);
  std::sort(keys.begin(), keys.end());
  for (TermId k : keys) {
    TermId root = find(k);
    members_[root].push_back(k);
  }
  dirty_ = false;
}

std::vector<TermId> EquivalenceMap::members(TermId x) const {
  if (dirty_) throw std::logic_error("equivalence map used before finalize()");
  TermId root = find(x);
  auto it = members_.find(root);
  if (it == members_.end()) return {x};
  return it->second;
}

const std::map<TermId, std::vector<TermId>>& EquivalenceMap::classes() const {
  if (dirty_) throw std::logic_error("equivalence map used before finalize()");
  return members_;
}

std::size_t EquivalenceMap::classCount() const { return classes().size(); }

std::size_t EquivalenceMap::storedEntries() const {
  std::size_t n = parent_.size();
  for (const auto& [root, list] : members_) n += list.size();
  return n;
}

std::vector<std::pair<TermId, TermId>> EquivalenceMap::assignments() const {
  std::vector<std::pair<TermId, TermId>> out;
  out.reserve(parent_.size());
  for (const auto& entry : parent_) out.emplace_back(entry.first, find(entry.first));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Triple> canonicalizeTriples(std::span<const Triple> triples, const EquivalenceMap& eq) {
  std::vector<Triple> out;
  out.reserve(triples.size());
  const bool identity = eq.empty();
  for (const Triple& t : triples) {
    if (t.p == vocab::kSameAs) continue;
    out.push_back(identity ? t : Triple{eq.find(t.s), eq.find(t.p), eq.find(t.o)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Triple> expandAnswers(const EquivalenceMap& eq, std::span<const Triple> answers) {
  std::vector<Triple> out;
  if (eq.empty()) {
    out.assign(answers.begin(), answers.end());
  } else {
    out.reserve(answers.size());
    for (const Triple& t : answers) {
      auto ss = eq.members(t.s);
      auto ps = eq.members(t.p);
      auto os = eq.members(t.o);
      for (TermId s : ss) {
        for (TermId p : ps) {
          for (TermId o : os) out.push_back({s, p, o});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Triple> sameAsClosure(const EquivalenceMap& eq) {
  std::vector<Triple> out;
  for (const auto& [root, list] : eq.classes()) {
    for (TermId a : list) {
      for (TermId b : list) out.push_back({a, vocab::kSameAs, b});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t sameAsClosureSize(const EquivalenceMap& eq) {
  std::size_t n = 0;
  for (const auto& [root, list] : eq.classes()) n += list.size() * list.size();
  return n;
}

}  // namespace rdfr
