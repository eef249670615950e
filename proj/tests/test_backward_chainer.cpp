#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracle.h"
#include "random_kb.h"
#include "rdfr/backward_chainer.h"
#include "rdfr/dictionary.h"
#include "rdfr/materializer.h"
#include "rdfr/query_engine.h"

namespace rdfr {
namespace {

constexpr TermId id(std::uint64_t n) { return termId(kFirstDataId + n); }

std::vector<Rule> withoutSameAsRules() {
  std::vector<Rule> out;
  for (const Rule& r : builtinRuleset()) {
    if (r.name != rules::kSameAsTrans && r.name != rules::kSameAsSymm) out.push_back(r);
  }
  return out;
}

std::vector<Triple> sorted(std::vector<Triple> v) {
  std::sort(v.begin(), v.end());
  return v;
}

const ReasoningNode* andChild(const ReasoningNode& node, const std::string& rule) {
  for (const ReasoningNode& child : node.children) {
    if (child.kind == ReasoningNode::Kind::And && child.rule == rule) return &child;
  }
  return nullptr;
}

TEST(BackwardChainer, TerminologicalDecisionTable) {
  TermId person = id(0), p = id(1);
  EXPECT_TRUE(isTerminological({var("X"), vocab::kSubPropertyOf, vocab::kType}));
  EXPECT_TRUE(isTerminological({var("x"), vocab::kSubClassOf, var("y")}));
  EXPECT_TRUE(isTerminological({var("x"), vocab::kSameAs, var("y")}));
  EXPECT_TRUE(isTerminological({var("p"), vocab::kType, vocab::kSymmetricProperty}));
  EXPECT_TRUE(isTerminological({var("s"), var("p"), vocab::kSubClassOf}));
  EXPECT_FALSE(isTerminological({var("s"), vocab::kType, person}));
  EXPECT_FALSE(isTerminological({var("s"), vocab::kType, var("o")}));
  EXPECT_FALSE(isTerminological({var("s"), p, var("o")}));
  EXPECT_FALSE(isTerminological({var("s"), var("p"), var("o")}));
}

TEST(BackwardChainer, PrecomputeSubclassChain) {
  TermId c1 = id(1), c2 = id(2), c3 = id(3);
  KnowledgeBase kb(std::vector<Triple>{{c1, vocab::kSubClassOf, c2}, {c2, vocab::kSubClassOf, c3}});
  TerminologicalStore store = precomputeTerminological(kb, builtinRuleset());
  auto sub = store.lookup({var("x"), vocab::kSubClassOf, var("y")});
  EXPECT_EQ(sub, (std::vector<Triple>{{c1, vocab::kSubClassOf, c2},
                                      {c1, vocab::kSubClassOf, c3},
                                      {c2, vocab::kSubClassOf, c3}}));
  EXPECT_EQ(store.lookup({c1, vocab::kSubClassOf, var("y")}).size(), 2u);
  EXPECT_EQ(store.lookup({var("x"), vocab::kSubClassOf, c2}).size(), 1u);
}

TEST(BackwardChainer, PrecomputeEmptyTBox) {
  KnowledgeBase kb(std::vector<Triple>{{id(0), vocab::kType, id(1)}});
  TerminologicalStore store = precomputeTerminological(kb, builtinRuleset());
  EXPECT_EQ(store.tripleCount(), 0u);
  EXPECT_EQ(store.closed().size(), TerminologicalStore::shapes().size());
  for (const auto& [shape, answers] : store.closed()) EXPECT_TRUE(answers.empty());
}

TEST(BackwardChainer, StoreEqualsSchemaPartOfMaterialization) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    std::mt19937_64 rng(seed);
    testing::RandomKb random = testing::randomKb(rng, {400, 5, true, true});
    KnowledgeBase kb(random.triples);
    QueryEngine engine(kb, builtinRuleset());
    std::vector<Triple> stored;
    for (const auto& [shape, answers] : engine.store().closed()) {
      stored.insert(stored.end(), answers.begin(), answers.end());
    }
    MaterializeResult full = materialize(kb, builtinRuleset());
    EXPECT_EQ(sorted(stored), full.kb.tbox()) << "seed " << seed;
  }
}

TEST(BackwardChainer, StoreCoversOnlySchemaShapes) {
  EXPECT_TRUE(TerminologicalStore::covers({var("x"), vocab::kSubClassOf, var("y")}));
  EXPECT_TRUE(TerminologicalStore::covers({id(1), vocab::kSubPropertyOf, var("y")}));
  EXPECT_TRUE(TerminologicalStore::covers({var("p"), vocab::kType, vocab::kSymmetricProperty}));
  EXPECT_FALSE(TerminologicalStore::covers({var("p"), vocab::kType, var("o")}));
  EXPECT_FALSE(TerminologicalStore::covers({var("x"), vocab::kSameAs, var("y")}));
}

struct StudentFixture {
  TermId a = id(0), student = id(1), person = id(2);
  KnowledgeBase kb{std::vector<Triple>{{a, vocab::kType, student}, {student, vocab::kSubClassOf, person}}};
  TriplePattern goal{var("S"), vocab::kType, person};
};

TEST(BackwardChainer, StudentIsPerson) {
  StudentFixture f;
  std::vector<Rule> rules = builtinRuleset();
  TerminologicalStore store = precomputeTerminological(f.kb, rules);
  for (bool useStore : {false, true}) {
    Tabling table;
    BackwardOptions options;
    options.useStore = useStore;
    options.pruning = useStore;
    auto answers = tiReason(f.goal, f.kb, rules, useStore ? &store : nullptr, table, options);
    EXPECT_EQ(answers, (std::vector<Triple>{{f.a, vocab::kType, f.person}}));
  }
  std::set<Triple> oracle = testing::naiveClosure(
      std::vector<Triple>(f.kb.triples().begin(), f.kb.triples().end()), rules);
  EXPECT_EQ(testing::filterClosure(oracle, f.goal), (std::vector<Triple>{{f.a, vocab::kType, f.person}}));
}

TEST(BackwardChainer, NoRulesNoDataGivesNothing) {
  KnowledgeBase kb(std::vector<Triple>{{id(0), id(5), id(1)}});
  Tabling table;
  EXPECT_TRUE(tiReason({var("s"), id(6), var("o")}, kb, withoutSameAsRules(), nullptr, table,
                       {128, true, false, false})
                  .empty());
}

TEST(BackwardChainer, SymmetricPropertyAnswer) {
  TermId knows = id(0), a = id(1), b = id(2);
  KnowledgeBase kb(std::vector<Triple>{{knows, vocab::kType, vocab::kSymmetricProperty}, {a, knows, b}});
  std::vector<Rule> rules = builtinRuleset();
  TerminologicalStore store = precomputeTerminological(kb, rules);
  Tabling table;
  auto answers = tiReason({b, knows, var("o")}, kb, rules, &store, table);
  EXPECT_EQ(answers, (std::vector<Triple>{{b, knows, a}}));
  MaterializeResult full = materialize(kb, rules);
  EXPECT_EQ(full.kb.lookup({b, knows, var("o")}), answers);
}

TEST(BackwardChainer, ExplainStudentTree) {
  StudentFixture f;
  QueryEngine engine(f.kb, builtinRuleset());
  ReasoningTree tree = engine.explain(f.goal, QueryMode::Hybrid);
  const ReasoningNode& root = tree.root;
  EXPECT_EQ(root.kind, ReasoningNode::Kind::Or);
  EXPECT_EQ(root.answers, 1u);
  ASSERT_FALSE(root.children.empty());
  EXPECT_EQ(root.children[0].kind, ReasoningNode::Kind::Leaf);
  EXPECT_EQ(root.children[0].source, ReasoningNode::Source::Data);

  const ReasoningNode* typeSub = andChild(root, rules::kTypeSub);
  const ReasoningNode* subProp = andChild(root, rules::kSubProp);
  const ReasoningNode* symm = andChild(root, rules::kSymmetric);
  ASSERT_TRUE(typeSub);
  ASSERT_TRUE(subProp);
  ASSERT_TRUE(symm);
  EXPECT_FALSE(typeSub->pruned);
  // No subproperty of rdf:type and no symmetric property: both prune.
  EXPECT_TRUE(subProp->pruned);
  EXPECT_TRUE(symm->pruned);
  EXPECT_FALSE(symm->reason.empty());
  ASSERT_EQ(symm->children.size(), 1u);
  EXPECT_EQ(symm->children[0].source, ReasoningNode::Source::Store);
  // The unpruned branch consults the store first, then the instance goal.
  ASSERT_EQ(typeSub->children.size(), 2u);
  EXPECT_EQ(typeSub->children[0].kind, ReasoningNode::Kind::Leaf);
  EXPECT_EQ(typeSub->children[0].source, ReasoningNode::Source::Store);
  EXPECT_EQ(typeSub->children[1].kind, ReasoningNode::Kind::Or);

  Dictionary dict;
  std::string text = formatTree(tree, dict);
  EXPECT_NE(text.find("OR"), std::string::npos);
  EXPECT_NE(text.find("AND R-type-sub"), std::string::npos);
  EXPECT_NE(text.find("PRUNED"), std::string::npos);
  EXPECT_NE(text.find("LEAF"), std::string::npos);
}

TEST(BackwardChainer, ExplainDataOnlyAnswerIsSingleLeaf) {
  TermId a = id(0), b = id(1), p = id(2);
  KnowledgeBase kb(std::vector<Triple>{{a, p, b}});
  Tabling table;
  BackwardChainer chainer(kb, {}, nullptr, table, {128, true, false, false});
  ReasoningTree tree = chainer.explain({a, p, var("o")});
  ASSERT_EQ(tree.root.children.size(), 1u);
  EXPECT_EQ(tree.root.children[0].kind, ReasoningNode::Kind::Leaf);
  EXPECT_EQ(tree.root.children[0].matches, (std::vector<Triple>{{a, p, b}}));
  EXPECT_EQ(tree.nodeCount, 2u);
}

TEST(BackwardChainer, ExplainBudgetTruncates) {
  std::mt19937_64 rng(3);
  testing::RandomKb random = testing::randomKb(rng, {800, 5, true, true});
  KnowledgeBase kb = canonicalize(KnowledgeBase(random.triples));
  Tabling table;
  BackwardChainer chainer(kb, withoutSameAsRules(), nullptr, table, {128, true, false, false});
  ReasoningTree tree = chainer.explain({var("s"), var("p"), var("o")}, 1);
  std::size_t truncated = 0;
  std::function<void(const ReasoningNode&)> walk = [&](const ReasoningNode& n) {
    truncated += n.truncated;
    for (const auto& c : n.children) walk(c);
  };
  walk(tree.root);
  EXPECT_GT(truncated, 0u);
}

TEST(BackwardChainer, PruningSkipsSymmetricRuleWithoutSymmetricProperties) {
  std::mt19937_64 rng(21);
  testing::RandomKb random = testing::randomKb(rng, {500, 5, true, false});
  QueryEngine engine(KnowledgeBase(random.triples), builtinRuleset());
  std::set<Triple> oracle = testing::naiveClosure(random.triples, builtinRuleset());
  for (int i = 0; i < 20; ++i) {
    TriplePattern goal = testing::randomGoal(rng, oracle, random.terms);
    EXPECT_EQ(engine.query(goal, QueryMode::Hybrid), engine.query(goal, QueryMode::Backward));
  }
  const ExpansionCounters& hybrid = engine.counters(QueryMode::Hybrid);
  const ExpansionCounters& backward = engine.counters(QueryMode::Backward);
  EXPECT_EQ(hybrid.expandedFor(rules::kSymmetric), 0u);
  EXPECT_GT(hybrid.prunedFor(rules::kSymmetric), 0u);
  EXPECT_GT(backward.expandedFor(rules::kSymmetric), 0u);
  EXPECT_LT(hybrid.expandedTotal(), backward.expandedTotal());
}

class CrossMode : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(CrossMode, AllModesMatchMaterializeThenFilter) {
  std::mt19937_64 rng(GetParam());
  testing::RandomKb random = testing::randomKb(rng, {500, 5, true, true});
  KnowledgeBase kb(random.triples);
  std::set<Triple> oracle = testing::naiveClosure(random.triples, builtinRuleset());
  QueryEngine goalDirected(kb, builtinRuleset());
  QueryEngine lookups(materialize(kb, builtinRuleset()).kb, builtinRuleset());
  for (int i = 0; i < 25; ++i) {
    TriplePattern goal = testing::randomGoal(rng, oracle, random.terms);
    std::vector<Triple> expected = testing::filterClosure(oracle, goal);
    EXPECT_EQ(goalDirected.query(goal, QueryMode::Backward), expected) << "goal " << i;
    EXPECT_EQ(goalDirected.query(goal, QueryMode::Hybrid), expected) << "goal " << i;
    EXPECT_EQ(lookups.query(goal, QueryMode::Materialized), expected) << "goal " << i;
  }
}

INSTANTIATE_TEST_SUITE_P(BackwardChainer, CrossMode, ::testing::Range<std::uint64_t>(1, 13));

TEST(BackwardChainer, PlainModeMatchesRuleOnlyOracle) {
  QueryOptions plain;
  plain.canonicalSameAs = false;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    std::mt19937_64 rng(seed + 300);
    testing::RandomKb random = testing::randomKb(rng, {300, 4, true, true});
    std::set<Triple> oracle =
        testing::naiveClosure(random.triples, builtinRuleset(), testing::OracleOptions{false});
    QueryEngine engine(KnowledgeBase(random.triples), builtinRuleset(), plain);
    for (int i = 0; i < 15; ++i) {
      TriplePattern goal = testing::randomGoal(rng, oracle, random.terms);
      EXPECT_EQ(engine.query(goal, QueryMode::Hybrid), testing::filterClosure(oracle, goal));
    }
  }
}

TEST(BackwardChainer, TablingIsTransparent) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    std::mt19937_64 rng(seed + 70);
    testing::RandomKb random = testing::randomKb(rng, {250, 4, false, true});
    KnowledgeBase kb(random.triples);
    std::set<Triple> oracle = testing::naiveClosure(random.triples, builtinRuleset());
    std::vector<Rule> rules = withoutSameAsRules();
    for (int i = 0; i < 10; ++i) {
      TriplePattern goal = testing::randomGoal(rng, oracle, random.terms);
      ExpansionCounters with, without;
      Tabling t1, t2;
      auto a = tiReason(goal, kb, rules, nullptr, t1, {128, true, false, false}, &with);
      auto b = tiReason(goal, kb, rules, nullptr, t2, {128, false, false, false}, &without);
      EXPECT_EQ(a, b);
      EXPECT_EQ(a, testing::filterClosure(oracle, goal));
      EXPECT_LE(with.expandedTotal(), without.expandedTotal());
    }
  }
}

TEST(BackwardChainer, SubclassCycleTerminates) {
  TermId a = id(0), c1 = id(1), c2 = id(2), c3 = id(3);
  std::vector<Triple> triples{{a, vocab::kType, c1},
                              {c1, vocab::kSubClassOf, c2},
                              {c2, vocab::kSubClassOf, c3},
                              {c3, vocab::kSubClassOf, c1}};
  KnowledgeBase kb(triples);
  std::set<Triple> oracle = testing::naiveClosure(triples, builtinRuleset());
  for (bool tabling : {true, false}) {
    Tabling table;
    TriplePattern goal{var("s"), vocab::kType, var("c")};
    auto answers = tiReason(goal, kb, withoutSameAsRules(), nullptr, table, {128, tabling, false, false});
    EXPECT_EQ(answers, testing::filterClosure(oracle, goal));
    TriplePattern sub{var("x"), vocab::kSubClassOf, var("y")};
    Tabling table2;
    EXPECT_EQ(tiReason(sub, kb, withoutSameAsRules(), nullptr, table2, {128, tabling, false, false}),
              testing::filterClosure(oracle, sub));
  }
}

TEST(BackwardChainer, TableEntriesAreCompleteAfterSolve) {
  std::mt19937_64 rng(8);
  testing::RandomKb random = testing::randomKb(rng, {400, 5, false, true});
  KnowledgeBase kb(random.triples);
  Tabling table;
  BackwardChainer chainer(kb, withoutSameAsRules(), nullptr, table, {128, true, false, false});
  chainer.solve({var("s"), vocab::kType, var("o")});
  EXPECT_GT(table.memo().size(), 0u);
  EXPECT_EQ(table.completeCount(), table.memo().size());
  ExpansionCounters counters;
  BackwardChainer again(kb, withoutSameAsRules(), nullptr, table, {128, true, false, false}, &counters);
  again.solve({var("s"), vocab::kType, var("o")});
  EXPECT_EQ(counters.expandedTotal(), 0u);
  EXPECT_GT(counters.tableHits, 0u);
}

TEST(BackwardChainer, DepthLimitReportsChain) {
  std::vector<Triple> triples{{id(0), vocab::kType, id(10)}};
  for (std::uint64_t k = 10; k < 30; ++k) triples.push_back({id(k), vocab::kSubClassOf, id(k + 1)});
  KnowledgeBase kb(triples);
  Tabling table;
  try {
    tiReason({var("s"), vocab::kType, id(30)}, kb, withoutSameAsRules(), nullptr, table,
             {5, true, false, false});
    FAIL();
  } catch (const DepthLimitError& e) {
    EXPECT_GT(e.chain().size(), 5u);
    EXPECT_NE(std::string(e.what()).find("5"), std::string::npos);
  }
  EXPECT_EQ(table.completeCount(), table.memo().size());
  Tabling fresh;
  auto answers = tiReason({var("s"), vocab::kType, id(30)}, kb, withoutSameAsRules(), nullptr, fresh,
                          {128, true, false, false});
  EXPECT_EQ(answers, (std::vector<Triple>{{id(0), vocab::kType, id(30)}}));
}

TEST(BackwardChainer, EmptyKbAllModesEmpty) {
  KnowledgeBase empty;
  QueryEngine engine(empty, builtinRuleset());
  TriplePattern goal{var("s"), var("p"), var("o")};
  EXPECT_TRUE(engine.query(goal, QueryMode::Backward).empty());
  EXPECT_TRUE(engine.query(goal, QueryMode::Hybrid).empty());
  EXPECT_THROW(engine.query(goal, QueryMode::Materialized), ModeError);
  EXPECT_TRUE(hybridQuery(goal, materialize(empty, builtinRuleset()).kb, QueryMode::Materialized).empty());
}

TEST(BackwardChainer, InsertIsVisibleAndMonotone) {
  std::mt19937_64 rng(14);
  testing::RandomKb random = testing::randomKb(rng, {300, 4, true, true});
  std::vector<Triple> initial(random.triples.begin(), random.triples.begin() + random.triples.size() / 2);
  std::vector<Triple> rest(random.triples.begin() + random.triples.size() / 2, random.triples.end());
  QueryEngine engine(KnowledgeBase(initial), builtinRuleset());
  std::set<Triple> oracle = testing::naiveClosure(random.triples, builtinRuleset());
  std::vector<TriplePattern> goals;
  for (int i = 0; i < 15; ++i) goals.push_back(testing::randomGoal(rng, oracle, random.terms));
  std::vector<std::vector<Triple>> before;
  for (const auto& g : goals) before.push_back(engine.query(g, QueryMode::Hybrid));
  engine.insert(rest);
  for (std::size_t i = 0; i < goals.size(); ++i) {
    auto after = engine.query(goals[i], QueryMode::Hybrid);
    EXPECT_TRUE(std::includes(after.begin(), after.end(), before[i].begin(), before[i].end()));
    EXPECT_EQ(after, testing::filterClosure(oracle, goals[i]));
  }
}

TEST(BackwardChainer, InsertClearsMaterializedFlag) {
  StudentFixture f;
  QueryEngine engine(materialize(f.kb, builtinRuleset()).kb, builtinRuleset());
  EXPECT_NO_THROW(engine.query(f.goal, QueryMode::Materialized));
  std::vector<Triple> more{{id(9), vocab::kType, f.student}};
  engine.insert(more);
  EXPECT_THROW(engine.query(f.goal, QueryMode::Materialized), ModeError);
  EXPECT_EQ(engine.query(f.goal, QueryMode::Hybrid).size(), 2u);
}

TEST(BackwardChainer, QueryModeNames) {
  for (QueryMode m : {QueryMode::Materialized, QueryMode::Backward, QueryMode::Hybrid}) {
    EXPECT_EQ(parseQueryMode(toString(m)), m);
  }
  EXPECT_FALSE(parseQueryMode("forward"));
}

TEST(BackwardChainer, SameAsAnswersExpandClasses) {
  TermId a = id(0), b = id(1), c = id(2), knows = id(3), d = id(4);
  KnowledgeBase kb(std::vector<Triple>{{a, vocab::kSameAs, b}, {b, vocab::kSameAs, c}, {a, knows, d}});
  QueryEngine engine(kb, builtinRuleset());
  auto answers = engine.query({var("s"), knows, d}, QueryMode::Hybrid);
  EXPECT_EQ(answers, (std::vector<Triple>{{a, knows, d}, {b, knows, d}, {c, knows, d}}));
  auto equal = engine.query({c, vocab::kSameAs, var("o")}, QueryMode::Backward);
  EXPECT_EQ(equal, (std::vector<Triple>{{c, vocab::kSameAs, a}, {c, vocab::kSameAs, b}, {c, vocab::kSameAs, c}}));
}

}  // namespace
}  // namespace rdfr
