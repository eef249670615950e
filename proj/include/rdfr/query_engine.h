#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rdfr/backward_chainer.h"
#include "rdfr/knowledge_base.h"
#include "rdfr/rule.h"

namespace rdfr {

enum class QueryMode { Materialized, Backward, Hybrid };

std::optional<QueryMode> parseQueryMode(std::string_view text);
std::string toString(QueryMode mode);

// The requested mode cannot run on this knowledge base (e.g. materialized
// lookups before materialization).
class ModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct QueryOptions {
  std::size_t depthLimit = 128;
  bool tabling = true;
  // Answer owl:sameAs through the equivalence map over a canonical KB.
  bool canonicalSameAs = true;
};

// Answers triple-pattern queries over one knowledge base in any of the
// three modes. Answers are expanded through the equivalence map, filtered
// against the goal as written and sorted, so all modes agree.
//
// Tables and the terminological store belong to the current snapshot and
// are dropped by insert().
class QueryEngine {
 public:
  QueryEngine(KnowledgeBase kb, std::vector<Rule> rules, QueryOptions options = {});

  std::vector<Triple> query(const TriplePattern& goal, QueryMode mode);
  ReasoningTree explain(const TriplePattern& goal, QueryMode mode);

  // Adds triples (original ids) and invalidates every derived structure.
  void insert(std::span<const Triple> triples);

  const TerminologicalStore& store();
  const KnowledgeBase& knowledgeBase() const { return kb_; }
  const ExpansionCounters& counters(QueryMode mode) const;
  void resetCounters();

 private:
  TriplePattern canonicalGoal(const TriplePattern& goal) const;
  std::vector<Triple> sameAsAnswers(const TriplePattern& goal) const;
  void saturateSameAs();
  BackwardOptions backwardOptions(QueryMode mode) const;
  BackwardChainer chainerFor(QueryMode mode);
  void invalidate();

  KnowledgeBase kb_;
  std::vector<Rule> rules_;     // as given
  std::vector<Rule> backward_;  // rules used for goal-directed evaluation
  QueryOptions options_;
  bool saturated_ = false;
  std::unique_ptr<TerminologicalStore> store_;
  std::map<QueryMode, Tabling> tables_;
  std::map<QueryMode, ExpansionCounters> counters_;
};

// One-shot query with the built-in rules.
std::vector<Triple> hybridQuery(const TriplePattern& goal, const KnowledgeBase& kb, QueryMode mode,
                                const QueryOptions& options = {});

}  // namespace rdfr
