#include "rdfr/query_engine.h"

#include <algorithm>

namespace rdfr {

namespace {

bool sameAsOnly(const Rule& rule) {
  return std::all_of(rule.antecedents.begin(), rule.antecedents.end(), [](const TriplePattern& a) {
    const TermId* p = boundId(a.p);
    return p && *p == vocab::kSameAs;
  });
}

void sortUnique(std::vector<Triple>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<Triple> withAssignments(const KnowledgeBase& kb, std::span<const Triple> extra) {
  std::vector<Triple> all(kb.triples().begin(), kb.triples().end());
  all.insert(all.end(), extra.begin(), extra.end());
  for (const auto& [member, rep] : kb.equivalence().assignments()) {
    all.push_back({member, vocab::kSameAs, rep});
  }
  return all;
}

}  // namespace

std::optional<QueryMode> parseQueryMode(std::string_view text) {
  if (text == "materialized") return QueryMode::Materialized;
  if (text == "backward") return QueryMode::Backward;
  if (text == "hybrid") return QueryMode::Hybrid;
  return std::nullopt;
}

std::string toString(QueryMode mode) {
  switch (mode) {
    case QueryMode::Materialized:
      return "materialized";
    case QueryMode::Backward:
      return "backward";
    case QueryMode::Hybrid:
      return "hybrid";
  }
  return "?";
}

QueryEngine::QueryEngine(KnowledgeBase kb, std::vector<Rule> rules, QueryOptions options)
    : kb_(std::move(kb)), rules_(std::move(rules)), options_(options) {
  if (options_.canonicalSameAs) {
    bool hasSameAs = std::any_of(kb_.triples().begin(), kb_.triples().end(),
                                 [](const Triple& t) { return t.p == vocab::kSameAs; });
    if (hasSameAs) kb_ = canonicalize(kb_);
    if (!kb_.equivalence().finalized()) kb_.equivalence().finalize();
    for (const Rule& r : rules_) {
      if (!sameAsOnly(r)) backward_.push_back(r);
    }
  } else {
    backward_ = rules_;
  }
}

BackwardOptions QueryEngine::backwardOptions(QueryMode mode) const {
  BackwardOptions opts;
  opts.depthLimit = options_.depthLimit;
  opts.tabling = options_.tabling;
  opts.useStore = mode == QueryMode::Hybrid;
  opts.pruning = mode == QueryMode::Hybrid;
  return opts;
}

void QueryEngine::saturateSameAs() {
  if (saturated_ || !options_.canonicalSameAs) return;
  // Equalities can also be derived (e.g. through a subproperty of
  // owl:sameAs); fold them into the map until canonicalization is stable.
  const TriplePattern sameAsGoal{var("0"), vocab::kSameAs, var("1")};
  for (;;) {
    BackwardOptions pure = backwardOptions(QueryMode::Backward);
    Tabling table;
    BackwardChainer chainer(kb_, backward_, nullptr, table, pure);
    std::vector<Triple> derived = chainer.solve(sameAsGoal);
    const EquivalenceMap& eq = kb_.equivalence();
    std::erase_if(derived, [&](const Triple& t) {
      return eq.contains(t.s) && eq.contains(t.o) && eq.find(t.s) == eq.find(t.o);
    });
    if (derived.empty()) break;
    bool materialized = kb_.materialized();
    kb_ = canonicalize(std::span<const Triple>(withAssignments(kb_, derived)));
    kb_.setMaterialized(materialized);
  }
  saturated_ = true;
}

const TerminologicalStore& QueryEngine::store() {
  saturateSameAs();
  if (!store_) {
    store_ = std::make_unique<TerminologicalStore>(
        precomputeTerminological(kb_, backward_, backwardOptions(QueryMode::Backward)));
  }
  return *store_;
}

BackwardChainer QueryEngine::chainerFor(QueryMode mode) {
  const TerminologicalStore* store = mode == QueryMode::Hybrid ? &this->store() : nullptr;
  return BackwardChainer(kb_, backward_, store, tables_[mode], backwardOptions(mode),
                         &counters_[mode]);
}

TriplePattern QueryEngine::canonicalGoal(const TriplePattern& goal) const {
  if (!options_.canonicalSameAs) return goal;
  const EquivalenceMap& eq = kb_.equivalence();
  auto slot = [&](const Slot& s) -> Slot {
    if (const TermId* id = boundId(s)) return eq.find(*id);
    return s;
  };
  return {slot(goal.s), slot(goal.p), slot(goal.o)};
}

std::vector<Triple> QueryEngine::sameAsAnswers(const TriplePattern& goal) const {
  const EquivalenceMap& eq = kb_.equivalence();
  if (const TermId* p = boundId(goal.p); p && eq.find(*p) != vocab::kSameAs) return {};
  // Pairs are generated per class; the full closure is quadratic.
  std::vector<Triple> out;
  auto emitClass = [&](const std::vector<TermId>& members) {
    for (TermId a : members) {
      for (TermId b : members) {
        Triple t{a, vocab::kSameAs, b};
        if (matches(goal, t)) out.push_back(t);
      }
    }
  };
  const TermId* s = boundId(goal.s);
  const TermId* o = boundId(goal.o);
  if (s || o) {
    const TermId x = s ? *s : *o;
    if (eq.contains(x)) emitClass(eq.members(x));
  } else {
    for (const auto& [root, members] : eq.classes()) emitClass(members);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Triple> QueryEngine::query(const TriplePattern& goal, QueryMode mode) {
  if (mode == QueryMode::Materialized && !kb_.materialized()) {
    throw ModeError("materialized queries need a materialized knowledge base");
  }
  if (mode != QueryMode::Materialized) saturateSameAs();
  const TriplePattern target = canonicalGoal(goal);
  std::vector<Triple> found;
  if (mode == QueryMode::Materialized) {
    kb_.forEachMatch(target, [&](const Triple& t) {
      if (matches(target, t)) found.push_back(t);
    });
  } else {
    found = chainerFor(mode).solve(target);
  }
  if (!options_.canonicalSameAs) {
    sortUnique(found);
    return found;
  }
  std::vector<Triple> answers = expandAnswers(kb_.equivalence(), found);
  std::erase_if(answers, [&](const Triple& t) { return !matches(goal, t); });
  std::vector<Triple> equalities = sameAsAnswers(goal);
  answers.insert(answers.end(), equalities.begin(), equalities.end());
  sortUnique(answers);
  return answers;
}

ReasoningTree QueryEngine::explain(const TriplePattern& goal, QueryMode mode) {
  const TriplePattern target = canonicalGoal(goal);
  if (mode == QueryMode::Materialized) {
    if (!kb_.materialized()) throw ModeError("materialized explanations need a materialized knowledge base");
    ReasoningTree tree;
    tree.root.pattern = target;
    ReasoningNode leaf;
    leaf.kind = ReasoningNode::Kind::Leaf;
    leaf.pattern = target;
    kb_.forEachMatch(target, [&](const Triple& t) {
      if (matches(target, t)) leaf.matches.push_back(t);
    });
    tree.root.answers = leaf.matches.size();
    tree.root.children.push_back(std::move(leaf));
    tree.nodeCount = 2;
    return tree;
  }
  saturateSameAs();
  return chainerFor(mode).explain(target);
}

void QueryEngine::insert(std::span<const Triple> triples) {
  if (options_.canonicalSameAs) {
    kb_ = canonicalize(std::span<const Triple>(withAssignments(kb_, triples)));
  } else {
    std::vector<Triple> all(kb_.triples().begin(), kb_.triples().end());
    all.insert(all.end(), triples.begin(), triples.end());
    kb_ = KnowledgeBase(all);
  }
  kb_.setMaterialized(false);
  invalidate();
}

void QueryEngine::invalidate() {
  saturated_ = false;
  store_.reset();
  tables_.clear();
}

const ExpansionCounters& QueryEngine::counters(QueryMode mode) const {
  static const ExpansionCounters kEmpty;
  auto it = counters_.find(mode);
  return it == counters_.end() ? kEmpty : it->second;
}

void QueryEngine::resetCounters() { counters_.clear(); }

std::vector<Triple> hybridQuery(const TriplePattern& goal, const KnowledgeBase& kb, QueryMode mode,
                                const QueryOptions& options) {
  QueryEngine engine(kb, builtinRuleset(), options);
  return engine.query(goal, mode);
}

}  // namespace rdfr
