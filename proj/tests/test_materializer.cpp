#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracle.h"
#include "random_kb.h"
#include "rdfr/knowledge_base.h"
#include "rdfr/materializer.h"
#include "rdfr/rule.h"

namespace rdfr {
namespace {

using testing::OracleOptions;

constexpr TermId id(std::uint64_t n) { return termId(kFirstDataId + n); }

const Rule& ruleNamed(const std::vector<Rule>& rules, const std::string& name) {
  for (const Rule& r : rules) {
    if (r.name == name) return r;
  }
  throw std::out_of_range(name);
}

MaterializationState stateOf(std::vector<Triple> base) {
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  MaterializationState state;
  state.base = base;
  state.delta = base;
  return state;
}

TBoxClosure closureOf(const std::vector<Triple>& triples) {
  std::vector<Triple> tbox;
  for (const Triple& t : triples) {
    if (isTBoxTriple(t)) tbox.push_back(t);
  }
  return buildTBoxClosure(tbox);
}

std::set<Triple> asSet(std::span<const Triple> v) { return {v.begin(), v.end()}; }

TEST(Materializer, TBoxClosureChain) {
  TermId c1 = id(1), c2 = id(2), c3 = id(3);
  TBoxClosure closure =
      buildTBoxClosure(std::vector<Triple>{{c1, vocab::kSubClassOf, c2}, {c2, vocab::kSubClassOf, c3}});
  EXPECT_EQ(closure.superclassesOf.at(c1), (std::vector<TermId>{c2, c3}));
  EXPECT_EQ(closure.superclassesOf.at(c2), (std::vector<TermId>{c3}));
  EXPECT_FALSE(closure.superclassesOf.contains(c3));
}

TEST(Materializer, TBoxClosureEmpty) {
  TBoxClosure closure = buildTBoxClosure(std::vector<Triple>{});
  EXPECT_TRUE(closure.empty());
  EXPECT_TRUE(closure.triples().empty());
}

TEST(Materializer, TBoxClosureCycle) {
  TermId c1 = id(1), c2 = id(2);
  TBoxClosure closure =
      buildTBoxClosure(std::vector<Triple>{{c1, vocab::kSubClassOf, c2}, {c2, vocab::kSubClassOf, c1}});
  // Cycle members reach each other and, through the cycle, themselves.
  EXPECT_EQ(closure.superclassesOf.at(c1), (std::vector<TermId>{c1, c2}));
  EXPECT_EQ(closure.superclassesOf.at(c2), (std::vector<TermId>{c1, c2}));
}

TEST(Materializer, TBoxClosureMatchesReachabilityOracle) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, 9);
    std::vector<Triple> tbox;
    for (int i = 0; i < 15; ++i) tbox.push_back({id(pick(rng)), vocab::kSubClassOf, id(pick(rng))});
    for (int i = 0; i < 10; ++i) tbox.push_back({id(pick(rng)), vocab::kSubPropertyOf, id(pick(rng))});
    tbox.push_back({id(pick(rng)), vocab::kType, vocab::kSymmetricProperty});
    TBoxClosure closure = buildTBoxClosure(tbox);
    // Floyd-Warshall style reachability as the independent oracle.
    for (TermId pred : {vocab::kSubClassOf, vocab::kSubPropertyOf}) {
      bool reach[10][10] = {};
      for (const Triple& t : tbox) {
        if (t.p == pred) reach[raw(t.s) - kFirstDataId][raw(t.o) - kFirstDataId] = true;
      }
      for (int k = 0; k < 10; ++k)
        for (int i = 0; i < 10; ++i)
          for (int j = 0; j < 10; ++j) reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
      const auto& map = pred == vocab::kSubClassOf ? closure.superclassesOf : closure.superpropertiesOf;
      for (int i = 0; i < 10; ++i) {
        std::vector<TermId> expected;
        for (int j = 0; j < 10; ++j) {
          if (reach[i][j]) expected.push_back(id(j));
        }
        auto it = map.find(id(i));
        std::vector<TermId> actual = it == map.end() ? std::vector<TermId>{} : it->second;
        EXPECT_EQ(actual, expected) << "seed " << seed;
      }
    }
  }
}

TEST(Materializer, SubclassJobTypeInheritance) {
  TermId a = id(0), c1 = id(1), c2 = id(2);
  std::vector<Triple> kb{{a, vocab::kType, c1}, {c1, vocab::kSubClassOf, c2}};
  auto out = subclassTypeJob(stateOf(kb), closureOf(kb));
  EXPECT_EQ(out, (std::vector<Triple>{{a, vocab::kType, c2}}));
}

TEST(Materializer, SubclassJobSubclassTransitivity) {
  TermId x = id(0), y = id(1), z = id(2);
  std::vector<Triple> kb{{x, vocab::kSubClassOf, y}, {y, vocab::kSubClassOf, z}};
  auto out = subclassTypeJob(stateOf(kb), closureOf(kb));
  EXPECT_EQ(out, (std::vector<Triple>{{x, vocab::kSubClassOf, z}}));
}

TEST(Materializer, SubclassJobChainInOneJob) {
  TermId a = id(0), c0 = id(10), c1 = id(11), c2 = id(12), c3 = id(13);
  std::vector<Triple> kb{{a, vocab::kType, c0},
                         {c0, vocab::kSubClassOf, c1},
                         {c1, vocab::kSubClassOf, c2},
                         {c2, vocab::kSubClassOf, c3}};
  auto out = subclassTypeJob(stateOf(kb), closureOf(kb), {}, {true, false});
  EXPECT_EQ(out, (std::vector<Triple>{{a, vocab::kType, c1}, {a, vocab::kType, c2}, {a, vocab::kType, c3}}));
  // The brute-force oracle agrees on the instance part.
  std::set<Triple> oracle = testing::naiveClosure(kb, {ruleNamed(builtinRuleset(), rules::kTypeSub)});
  std::set<Triple> expected = asSet(kb);
  expected.insert(out.begin(), out.end());
  EXPECT_EQ(oracle, expected);
}

TEST(Materializer, GenericJobSubProperty) {
  TermId a = id(0), b = id(1), knows = id(2), acquainted = id(3);
  std::vector<Triple> kb{{a, knows, b}, {knows, vocab::kSubPropertyOf, acquainted}};
  auto out = genericRuleJob(ruleNamed(builtinRuleset(), rules::kSubProp), stateOf(kb), closureOf(kb));
  EXPECT_EQ(out, (std::vector<Triple>{{a, acquainted, b}}));
}

TEST(Materializer, GenericJobSymmetric) {
  TermId a = id(0), b = id(1), p = id(2);
  std::vector<Triple> kb{{p, vocab::kType, vocab::kSymmetricProperty}, {a, p, b}};
  auto out = genericRuleJob(ruleNamed(builtinRuleset(), rules::kSymmetric), stateOf(kb), closureOf(kb));
  EXPECT_EQ(out, (std::vector<Triple>{{b, p, a}}));
}

TEST(Materializer, SameAsChainBuildsClassWithoutTriples) {
  TermId a = id(0), b = id(1), c = id(2);
  KnowledgeBase kb(std::vector<Triple>{{a, vocab::kSameAs, b}, {b, vocab::kSameAs, c}});
  MaterializeResult result = materialize(kb, builtinRuleset());
  EXPECT_EQ(result.kb.size(), 0u);
  EXPECT_EQ(result.inferred, 0u);
  EXPECT_EQ(result.kb.equivalence().members(c), (std::vector<TermId>{a, b, c}));
  std::set<Triple> oracle = testing::naiveClosure(
      std::vector<Triple>(kb.triples().begin(), kb.triples().end()), builtinRuleset());
  EXPECT_EQ(testing::expandedClosure(result.kb), oracle);
}

TEST(Materializer, SameAsReduceSideJoinWithoutCanonicalization) {
  TermId a = id(0), b = id(1), c = id(2);
  std::vector<Triple> kb{{a, vocab::kSameAs, b}, {b, vocab::kSameAs, c}};
  auto out = genericRuleJob(ruleNamed(builtinRuleset(), rules::kSameAsTrans), stateOf(kb), closureOf(kb));
  EXPECT_EQ(out, (std::vector<Triple>{{a, vocab::kSameAs, c}}));
}

TEST(Materializer, DuplicateElimination) {
  TermId a = id(0), b = id(1), p = id(2);
  MaterializationState state = stateOf({{a, p, b}});
  std::vector<Triple> inBase{{a, p, b}};
  EXPECT_TRUE(duplicateEliminationJob(inBase, state).empty());
  std::vector<Triple> twice{{b, p, a}, {b, p, a}};
  EXPECT_EQ(duplicateEliminationJob(twice, state), (std::vector<Triple>{{b, p, a}}));
  std::vector<Triple> disjoint{{b, p, b}, {a, p, a}};
  EXPECT_EQ(duplicateEliminationJob(disjoint, state), (std::vector<Triple>{{a, p, a}, {b, p, b}}));
}

TEST(Materializer, DuplicateEliminationMatchesSetDifference) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, 6);
    std::vector<Triple> base, candidates;
    for (int i = 0; i < 60; ++i) base.push_back({id(pick(rng)), id(pick(rng)), id(pick(rng))});
    for (int i = 0; i < 80; ++i) candidates.push_back({id(pick(rng)), id(pick(rng)), id(pick(rng))});
    MaterializationState state = stateOf(base);
    std::set<Triple> expected;
    for (const Triple& t : candidates) {
      if (!std::binary_search(state.base.begin(), state.base.end(), t)) expected.insert(t);
    }
    JobOptions options;
    options.mapreduce.workers = 1 + seed % 3;
    auto out = duplicateEliminationJob(candidates, state, options);
    EXPECT_EQ(std::vector<Triple>(expected.begin(), expected.end()), out);
  }
}

TEST(Materializer, UnionAxiomFixture) {
  // X ⊔ Z ⊑ Y written as X ⊑ P, P ⊑ Y and Z ⊑ Y.
  TermId a = id(0), x = id(1), z = id(2), y = id(3), p = id(4);
  KnowledgeBase kb(std::vector<Triple>{{a, vocab::kType, x},
                                       {x, vocab::kSubClassOf, p},
                                       {z, vocab::kSubClassOf, y},
                                       {p, vocab::kSubClassOf, y}});
  MaterializeResult result = materialize(kb, builtinRuleset());
  EXPECT_TRUE(result.kb.contains({a, vocab::kType, p}));
  EXPECT_TRUE(result.kb.contains({a, vocab::kType, y}));
  EXPECT_FALSE(result.kb.contains({a, vocab::kType, z}));
  EXPECT_EQ(result.inferred, 3u);  // plus X ⊑ Y
  EXPECT_TRUE(result.kb.materialized());
}

TEST(Materializer, ClosedKbNeedsOneRound) {
  TermId a = id(0), c = id(1);
  KnowledgeBase kb(std::vector<Triple>{{a, vocab::kType, c}});
  MaterializeResult result = materialize(kb, builtinRuleset());
  ASSERT_EQ(result.rounds.size(), 1u);
  EXPECT_EQ(result.rounds[0].accepted, 0u);
  EXPECT_EQ(result.inferred, 0u);
}

TEST(Materializer, RoundStatsAreConsistent) {
  std::mt19937_64 rng(77);
  testing::RandomKb random = testing::randomKb(rng, {400, 5, true, true});
  MaterializeResult result = materialize(KnowledgeBase(random.triples), builtinRuleset());
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < result.rounds.size(); ++i) {
    const RoundStats& s = result.rounds[i];
    EXPECT_EQ(s.round, i + 1);
    EXPECT_EQ(s.duplicates, s.emitted - s.accepted);
    accepted += s.accepted;
  }
  EXPECT_EQ(accepted, result.inferred);
  EXPECT_EQ(result.rounds.back().accepted, 0u);
}

class OracleEquivalence : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(OracleEquivalence, CanonicalClosureMatchesReplacementOracle) {
  std::mt19937_64 rng(GetParam());
  testing::RandomKb random = testing::randomKb(rng, {300, 4, true, true});
  MaterializeResult result = materialize(KnowledgeBase(random.triples), builtinRuleset());
  std::set<Triple> oracle = testing::naiveClosure(random.triples, builtinRuleset());
  EXPECT_EQ(testing::expandedClosure(result.kb), oracle);
}

TEST_P(OracleEquivalence, PlainClosureMatchesRuleOnlyOracle) {
  std::mt19937_64 rng(GetParam() * 1000 + 7);
  testing::RandomKb random = testing::randomKb(rng, {300, 4, true, true});
  MaterializeOptions options;
  options.canonicalSameAs = false;
  MaterializeResult result = materialize(KnowledgeBase(random.triples), builtinRuleset(), options);
  std::set<Triple> oracle = testing::naiveClosure(random.triples, builtinRuleset(), OracleOptions{false});
  EXPECT_EQ(asSet(result.kb.triples()), oracle);
}

INSTANTIATE_TEST_SUITE_P(Materializer, OracleEquivalence, ::testing::Range<std::uint64_t>(1, 16));

TEST(Materializer, IdempotentAndMonotone) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed + 500);
    testing::RandomKb random = testing::randomKb(rng, {500, 5, true, true});
    KnowledgeBase input(random.triples);
    MaterializeResult once = materialize(input, builtinRuleset());
    MaterializeResult twice = materialize(once.kb, builtinRuleset());
    EXPECT_EQ(twice.inferred, 0u);
    ASSERT_EQ(twice.rounds.size(), 1u);
    EXPECT_EQ(asSet(twice.kb.triples()), asSet(once.kb.triples()));

    // Derived equalities may re-canonicalize earlier triples, so input
    // triples survive in the expanded closure.
    std::set<Triple> expanded = testing::expandedClosure(once.kb);
    for (const Triple& t : random.triples) EXPECT_TRUE(expanded.contains(t));
  }
}

TEST(Materializer, DeterministicAcrossWorkers) {
  std::mt19937_64 rng(99);
  testing::RandomKb random = testing::randomKb(rng, {1000, 5, true, true});
  KnowledgeBase kb(random.triples);
  MaterializeResult reference = materialize(kb, builtinRuleset());
  for (std::size_t workers : {2u, 4u, 8u}) {
    MaterializeOptions options;
    options.jobs.mapreduce.workers = workers;
    MaterializeResult other = materialize(kb, builtinRuleset(), options);
    EXPECT_EQ(std::vector<Triple>(other.kb.triples().begin(), other.kb.triples().end()),
              std::vector<Triple>(reference.kb.triples().begin(), reference.kb.triples().end()));
    EXPECT_EQ(other.kb.equivalence().assignments(), reference.kb.equivalence().assignments());
    ASSERT_EQ(other.rounds.size(), reference.rounds.size());
    for (std::size_t i = 0; i < other.rounds.size(); ++i) {
      EXPECT_EQ(other.rounds[i].accepted, reference.rounds[i].accepted);
      EXPECT_EQ(other.rounds[i].emitted, reference.rounds[i].emitted);
    }
  }
}

TEST(Materializer, SpillingDoesNotChangeClosure) {
  std::mt19937_64 rng(12);
  testing::RandomKb random = testing::randomKb(rng, {600, 5, true, true});
  KnowledgeBase kb(random.triples);
  MaterializeResult reference = materialize(kb, builtinRuleset());
  MaterializeOptions tiny;
  tiny.jobs.mapreduce.shuffleBudgetBytes = 4096;
  tiny.jobs.mapreduce.workers = 2;
  MaterializeResult spilled = materialize(kb, builtinRuleset(), tiny);
  EXPECT_EQ(asSet(spilled.kb.triples()), asSet(reference.kb.triples()));
}

TEST(Materializer, RoundLimitAborts) {
  TermId a = id(0), c1 = id(1), c2 = id(2);
  KnowledgeBase kb(std::vector<Triple>{{a, vocab::kType, c1}, {c1, vocab::kSubClassOf, c2}});
  MaterializeOptions options;
  options.roundLimit = 1;
  try {
    materialize(kb, builtinRuleset(), options);
    FAIL();
  } catch (const RoundLimitError& e) {
    EXPECT_EQ(e.lastRound().round, 1u);
    EXPECT_EQ(e.lastRound().accepted, 1u);
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
  }
  options.roundLimit = 2;
  EXPECT_NO_THROW(materialize(kb, builtinRuleset(), options));
}

TEST(Materializer, TwoInstanceJoinIsUnsupported) {
  TermId knows = id(5);
  Rule chain{"chain", {{var("a"), knows, var("b")}, {var("b"), knows, var("c")}}, {var("a"), knows, var("c")}};
  KnowledgeBase kb(std::vector<Triple>{{id(0), knows, id(1)}, {id(1), knows, id(2)}});
  EXPECT_THROW(materialize(kb, {chain}), UnsupportedRuleError);
}

TEST(Materializer, CustomSingleInstanceRule) {
  // Instances of a symmetric property's subject class are "linked".
  TermId linked = id(7), a = id(0), b = id(1), p = id(2);
  Rule rule{"link", {{var("p"), vocab::kType, vocab::kSymmetricProperty}, {var("s"), var("p"), var("o")}},
            {var("s"), vocab::kType, linked}};
  KnowledgeBase kb(std::vector<Triple>{{p, vocab::kType, vocab::kSymmetricProperty}, {a, p, b}});
  std::vector<Triple> input(kb.triples().begin(), kb.triples().end());
  std::vector<Rule> rules = builtinRuleset();
  rules.push_back(rule);
  MaterializeResult result = materialize(kb, rules);
  EXPECT_EQ(asSet(result.kb.triples()), testing::naiveClosure(input, rules));
  EXPECT_TRUE(result.kb.contains({b, vocab::kType, linked}));
}

TEST(Materializer, SubsetOfRulesStillMatchesOracle) {
  std::vector<Rule> all = builtinRuleset();
  std::vector<Rule> subset{ruleNamed(all, rules::kTypeSub), ruleNamed(all, rules::kSubProp)};
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    std::mt19937_64 rng(seed + 40);
    testing::RandomKb random = testing::randomKb(rng, {300, 4, false, true});
    MaterializeResult result = materialize(KnowledgeBase(random.triples), subset);
    EXPECT_EQ(asSet(result.kb.triples()), testing::naiveClosure(random.triples, subset)) << seed;
  }
}

}  // namespace
}  // namespace rdfr
