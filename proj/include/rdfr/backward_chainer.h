#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfr/dictionary.h"
#include "rdfr/knowledge_base.h"
#include "rdfr/rule.h"

namespace rdfr {

// Predicate in {subClassOf, subPropertyOf, sameAs}, or rdf:type with object
// owl:SymmetricProperty, or any reserved term as object. Used to order
// antecedents; rdf:type with an ordinary class object stays instance level.
bool isTerminological(const TriplePattern& pattern);

// Complete answer sets for the patterns schema lookups can ask:
// (?x subClassOf ?y), (?x subPropertyOf ?y) and (?x type SymmetricProperty).
class TerminologicalStore {
 public:
  static std::vector<TriplePattern> shapes();
  // True for patterns the store can answer (isTBoxResident).
  static bool covers(const TriplePattern& pattern);

  void put(const TriplePattern& shape, std::vector<Triple> answers);
  // Stored triples matching `pattern`, which may be partially bound.
  std::vector<Triple> lookup(const TriplePattern& pattern) const;

  const std::map<TriplePattern, std::vector<Triple>>& closed() const { return closed_; }
  std::size_t tripleCount() const;

 private:
  std::map<TriplePattern, std::vector<Triple>> closed_;  // keyed by normalized shape
};

// Memoized subgoal answers for one knowledge base snapshot.
class Tabling {
 public:
  struct Entry {
    std::vector<Triple> answers;  // sorted
    bool complete = false;
  };

  std::map<TriplePattern, Entry>& memo() { return memo_; }
  const std::map<TriplePattern, Entry>& memo() const { return memo_; }
  std::size_t completeCount() const;
  void clear() { memo_.clear(); }

 private:
  std::map<TriplePattern, Entry> memo_;
};

struct BackwardOptions {
  std::size_t depthLimit = 128;
  // Keep table entries across solve() calls. Within one call subgoals are
  // always memoized.
  bool tabling = true;
  // Answer schema-shaped subgoals from the store and drop rules whose
  // schema antecedent has no match there. Both need a store.
  bool useStore = true;
  bool pruning = true;
};

struct ExpansionCounters {
  std::map<std::string, std::size_t> expanded;  // rule name -> applications
  std::map<std::string, std::size_t> pruned;
  std::size_t goals = 0;
  std::size_t tableHits = 0;

  std::size_t expandedFor(const std::string& rule) const;
  std::size_t prunedFor(const std::string& rule) const;
  std::size_t expandedTotal() const;
};

class DepthLimitError : public std::runtime_error {
 public:
  DepthLimitError(std::size_t limit, std::vector<TriplePattern> chain);
  const std::vector<TriplePattern>& chain() const { return chain_; }

 private:
  std::vector<TriplePattern> chain_;
};

struct ReasoningNode {
  enum class Kind { Or, And, Leaf };
  enum class Source { Data, Store };

  Kind kind = Kind::Or;
  TriplePattern pattern;  // Or/Leaf: the goal; And: the instantiated consequent
  std::vector<ReasoningNode> children;

  // Or nodes
  std::size_t answers = 0;
  bool cyclic = false;     // goal already open on the path; not expanded again
  bool tabled = false;     // expanded elsewhere in the tree
  bool truncated = false;  // node budget exhausted

  // And nodes
  std::string rule;
  bool pruned = false;
  std::string reason;

  // Leaf nodes
  Source source = Source::Data;
  std::vector<Triple> matches;
};

struct ReasoningTree {
  ReasoningNode root;
  std::size_t nodeCount = 0;
};

// Tabled, goal-directed evaluation of `rules` over a knowledge base.
// Mutually recursive goals are iterated by the first goal of their cycle
// until no answer set grows; their table entries are complete afterwards.
class BackwardChainer {
 public:
  BackwardChainer(const KnowledgeBase& kb, const std::vector<Rule>& rules,
                  const TerminologicalStore* store, Tabling& table, BackwardOptions options = {},
                  ExpansionCounters* counters = nullptr);

  // All triples entailed by the knowledge base and rules that match `goal`.
  std::vector<Triple> solve(const TriplePattern& goal);

  // The OR/AND tree the evaluation walks for `goal`, including pruned
  // branches. Each distinct subgoal is expanded once.
  ReasoningTree explain(const TriplePattern& goal, std::size_t nodeBudget = 5000);

 private:
  struct Frame {
    TriplePattern key;
    std::size_t low;
    bool hasDependents;
    std::size_t iteration = 0;
  };
  // Where an unfinished subgoal was last expanded: the frame it depends on
  // and that frame's iteration at the time.
  struct Visit {
    std::size_t frame;
    std::size_t iteration;
  };

  std::vector<Triple> solveKey(const TriplePattern& key, std::size_t& callerLow);
  std::vector<Triple> solveSubgoal(const TriplePattern& sub, std::size_t& low);
  std::vector<Triple> expandOnce(const TriplePattern& goal, std::size_t& low);
  std::vector<TriplePattern> orderedAntecedents(const Rule& rule, const Binding& binding) const;
  const TriplePattern* prunedBy(const std::vector<TriplePattern>& antecedents) const;
  bool storeAnswers(const TriplePattern& pattern) const;
  void settle(const TriplePattern& key);
  ReasoningNode explainGoal(const TriplePattern& goal, std::set<TriplePattern>& path,
                            std::set<TriplePattern>& expanded, std::size_t& budget,
                            std::size_t& nodes);

  const KnowledgeBase& kb_;
  std::vector<Rule> rules_;
  const TerminologicalStore* store_;
  Tabling& table_;
  BackwardOptions options_;
  ExpansionCounters* counters_;
  ExpansionCounters scratch_;

  std::vector<Frame> stack_;
  std::map<TriplePattern, std::size_t> onStack_;
  std::vector<TriplePattern> partial_;
  std::map<TriplePattern, Visit> visited_;
  std::size_t growth_ = 0;
  std::size_t iterations_ = 0;
};

// One-shot entry point: answers for `goal` using `table` for memoized
// subgoals and, when given, the terminological store.
std::vector<Triple> tiReason(const TriplePattern& goal, const KnowledgeBase& kb,
                             const std::vector<Rule>& rules, const TerminologicalStore* store,
                             Tabling& table, const BackwardOptions& options = {},
                             ExpansionCounters* counters = nullptr);

// Fills the store by pure backward evaluation of every store shape, so
// schema facts derivable from instance data are included.
TerminologicalStore precomputeTerminological(const KnowledgeBase& kb, const std::vector<Rule>& rules,
                                             const BackwardOptions& options = {});

// Indented text rendering, one node per line.
std::string formatTree(const ReasoningTree& tree, const Dictionary& dict);

}  // namespace rdfr
