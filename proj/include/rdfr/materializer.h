#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfr/knowledge_base.h"
#include "rdfr/mapreduce.h"
#include "rdfr/rule.h"

namespace rdfr {

// Schema knowledge held in memory while instance data streams past it.
struct TBoxClosure {
  std::map<TermId, std::vector<TermId>> superclassesOf;     // sorted values
  std::map<TermId, std::vector<TermId>> superpropertiesOf;  // sorted values
  std::vector<TermId> symmetricProperties;                  // sorted

  bool empty() const {
    return superclassesOf.empty() && superpropertiesOf.empty() && symmetricProperties.empty();
  }
  // TBox triples matching a pattern whose predicate is rdfs:subClassOf,
  // rdfs:subPropertyOf, or rdf:type with object owl:SymmetricProperty.
  std::vector<Triple> lookup(const TriplePattern& pattern) const;
  // The closure as triples, sorted.
  std::vector<Triple> triples() const;
};

// Reachability over the subclass and subproperty digraphs. With a flag
// cleared the corresponding map holds direct edges only. A term on a cycle
// reaches itself.
TBoxClosure buildTBoxClosure(std::span<const Triple> tbox, bool transitiveClasses = true,
                             bool transitiveProperties = true);

struct RoundStats {
  std::size_t round = 0;
  std::size_t emitted = 0;
  std::size_t duplicates = 0;
  std::size_t accepted = 0;
};

struct MaterializationState {
  std::vector<Triple> base;   // sorted; input plus accepted inferences
  std::vector<Triple> delta;  // sorted; subset of base, joined against this round
  std::size_t round = 0;
  std::vector<RoundStats> stats;
};

struct JobOptions {
  mr::Config mapreduce;
  // 0 picks twice the worker count.
  std::size_t partitions = 0;
};

struct SubclassJobFlags {
  bool emitTypes = true;       // rdf:type inheritance
  bool emitSubclasses = true;  // subclass transitivity
};

// One job: type statements are grouped under (0, subject) and subclass
// statements under (1, subject); every superclass of a group's classes
// that is not already among them becomes an inferred statement.
std::vector<Triple> subclassTypeJob(const MaterializationState& state, const TBoxClosure& closure,
                                    const JobOptions& options = {}, SubclassJobFlags flags = {});

class UnsupportedRuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Map-side join of the delta against the in-memory TBox for rules with a
// single instance antecedent. Rules joining two owl:sameAs instance
// patterns use a reduce-side join over the whole base (only reachable with
// canonicalization off). Any other multi-instance rule is unsupported.
std::vector<Triple> genericRuleJob(const Rule& rule, const MaterializationState& state,
                                   const TBoxClosure& closure, const JobOptions& options = {});

// Emits each candidate that is not in the base, once.
std::vector<Triple> duplicateEliminationJob(std::span<const Triple> candidates,
                                            const MaterializationState& state,
                                            const JobOptions& options = {});

class RoundLimitError : public std::runtime_error {
 public:
  RoundLimitError(std::size_t limit, const RoundStats& last);
  const RoundStats& lastRound() const { return last_; }

 private:
  RoundStats last_;
};

struct MaterializeOptions {
  JobOptions jobs;
  std::size_t roundLimit = 64;
  // Realize owl:sameAs through the equivalence map instead of triples.
  bool canonicalSameAs = true;
};

struct MaterializeResult {
  KnowledgeBase kb;
  std::vector<RoundStats> rounds;
  std::size_t inferred = 0;
};

// Forward closure by rounds of rule jobs seeded on the previous round's
// new triples, each followed by duplicate elimination, until a round
// accepts nothing.
MaterializeResult materialize(const KnowledgeBase& kb, const std::vector<Rule>& rules,
                              const MaterializeOptions& options = {});

}  // namespace rdfr
