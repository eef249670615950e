#include "rdfr/backward_chainer.h"

#include <algorithm>
#include <limits>

#include "rdfr/ntriples.h"

namespace rdfr {

namespace {

std::string rawSlot(const Slot& slot) {
  if (const Variable* v = variableOf(slot)) return "?" + v->name;
  return std::to_string(raw(std::get<TermId>(slot)));
}

std::string rawPattern(const TriplePattern& p) {
  return "(" + rawSlot(p.s) + " " + rawSlot(p.p) + " " + rawSlot(p.o) + ")";
}

void sortUnique(std::vector<Triple>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Merges `fresh` into the sorted `answers`; true when it grew.
bool mergeAnswers(std::vector<Triple>& answers, std::vector<Triple> fresh) {
  sortUnique(fresh);
  std::vector<Triple> merged;
  merged.reserve(answers.size() + fresh.size());
  std::set_union(answers.begin(), answers.end(), fresh.begin(), fresh.end(),
                 std::back_inserter(merged));
  bool grew = merged.size() > answers.size();
  answers = std::move(merged);
  return grew;
}

std::vector<Triple> dataMatches(const KnowledgeBase& kb, const TriplePattern& goal) {
  std::vector<Triple> out;
  kb.forEachMatch(goal, [&](const Triple& t) {
    if (matches(goal, t)) out.push_back(t);
  });
  return out;
}

}  // namespace

bool isTerminological(const TriplePattern& pattern) {
  const TermId* p = boundId(pattern.p);
  const TermId* o = boundId(pattern.o);
  if (p && (*p == vocab::kSubClassOf || *p == vocab::kSubPropertyOf || *p == vocab::kSameAs)) {
    return true;
  }
  if (p && *p == vocab::kType && o && *o == vocab::kSymmetricProperty) return true;
  return o && vocab::isReserved(*o);
}

std::vector<TriplePattern> TerminologicalStore::shapes() {
  return {
      {var("0"), vocab::kSubClassOf, var("1")},
      {var("0"), vocab::kSubPropertyOf, var("1")},
      {var("0"), vocab::kType, vocab::kSymmetricProperty},
  };
}

bool TerminologicalStore::covers(const TriplePattern& pattern) { return isTBoxResident(pattern); }

void TerminologicalStore::put(const TriplePattern& shape, std::vector<Triple> answers) {
  sortUnique(answers);
  closed_[normalizeVariables(shape)] = std::move(answers);
}

std::vector<Triple> TerminologicalStore::lookup(const TriplePattern& pattern) const {
  std::vector<Triple> out;
  const TermId* p = boundId(pattern.p);
  if (!p) return out;
  TriplePattern shape = *p == vocab::kType ? TriplePattern{var("0"), vocab::kType, vocab::kSymmetricProperty}
                                           : TriplePattern{var("0"), *p, var("1")};
  auto it = closed_.find(shape);
  if (it == closed_.end()) return out;
  const auto& stored = it->second;
  auto begin = stored.begin();
  auto end = stored.end();
  if (const TermId* s = boundId(pattern.s)) {
    begin = std::lower_bound(stored.begin(), stored.end(), Triple{*s, TermId{}, TermId{}});
    end = std::lower_bound(begin, stored.end(), Triple{termId(raw(*s) + 1), TermId{}, TermId{}});
  }
  for (auto i = begin; i != end; ++i) {
    if (matches(pattern, *i)) out.push_back(*i);
  }
  return out;
}

std::size_t TerminologicalStore::tripleCount() const {
  std::size_t n = 0;
  for (const auto& [shape, triples] : closed_) n += triples.size();
  return n;
}

std::size_t Tabling::completeCount() const {
  return static_cast<std::size_t>(std::count_if(
      memo_.begin(), memo_.end(), [](const auto& entry) { return entry.second.complete; }));
}

std::size_t ExpansionCounters::expandedFor(const std::string& rule) const {
  auto it = expanded.find(rule);
  return it == expanded.end() ? 0 : it->second;
}

std::size_t ExpansionCounters::prunedFor(const std::string& rule) const {
  auto it = pruned.find(rule);
  return it == pruned.end() ? 0 : it->second;
}

std::size_t ExpansionCounters::expandedTotal() const {
  std::size_t n = 0;
  for (const auto& [rule, count] : expanded) n += count;
  return n;
}

DepthLimitError::DepthLimitError(std::size_t limit, std::vector<TriplePattern> chain)
    : std::runtime_error([&] {
        std::string msg = "goal depth limit " + std::to_string(limit) + " exceeded; chain:";
        for (const auto& p : chain) msg += " " + rawPattern(p);
        return msg;
      }()),
      chain_(std::move(chain)) {}

BackwardChainer::BackwardChainer(const KnowledgeBase& kb, const std::vector<Rule>& rules,
                                 const TerminologicalStore* store, Tabling& table,
                                 BackwardOptions options, ExpansionCounters* counters)
    : kb_(kb),
      rules_(rules),
      store_(store),
      table_(table),
      options_(options),
      counters_(counters ? counters : &scratch_) {}

std::vector<Triple> BackwardChainer::solve(const TriplePattern& goal) {
  std::size_t low = std::numeric_limits<std::size_t>::max();
  try {
    std::vector<Triple> answers = solveKey(normalizeVariables(goal), low);
    if (!options_.tabling) table_.clear();
    return answers;
  } catch (...) {
    // Unfinished entries would pose as partial answers later.
    stack_.clear();
    onStack_.clear();
    partial_.clear();
    visited_.clear();
    std::erase_if(table_.memo(), [](const auto& entry) { return !entry.second.complete; });
    throw;
  }
}

bool BackwardChainer::storeAnswers(const TriplePattern& pattern) const {
  return options_.useStore && store_ && TerminologicalStore::covers(pattern);
}

void BackwardChainer::settle(const TriplePattern& key) {
  visited_.erase(key);
  table_.memo()[key].complete = true;
}

std::vector<Triple> BackwardChainer::solveKey(const TriplePattern& key, std::size_t& callerLow) {
  auto& memo = table_.memo();
  if (auto it = memo.find(key); it != memo.end() && it->second.complete) {
    ++counters_->tableHits;
    return it->second.answers;
  }
  if (auto it = onStack_.find(key); it != onStack_.end()) {
    // Cyclic goal: contribute what is known so far; the cycle's first goal
    // iterates until nothing grows.
    stack_[it->second].hasDependents = true;
    callerLow = std::min(callerLow, it->second);
    return memo[key].answers;
  }
  if (auto it = visited_.find(key); it != visited_.end()) {
    // Already expanded in the current iteration of its cycle.
    const auto [frame, iteration] = it->second;
    if (frame < stack_.size() && stack_[frame].iteration == iteration) {
      stack_[frame].hasDependents = true;
      callerLow = std::min(callerLow, frame);
      return memo[key].answers;
    }
  }
  if (stack_.size() >= options_.depthLimit) {
    std::vector<TriplePattern> chain;
    for (const Frame& f : stack_) chain.push_back(f.key);
    chain.push_back(key);
    throw DepthLimitError(options_.depthLimit, std::move(chain));
  }

  const std::size_t index = stack_.size();
  stack_.push_back({key, index, false});
  onStack_[key] = index;
  ++counters_->goals;
  const std::size_t partialMark = partial_.size();
  memo[key];

  for (;;) {
    const std::size_t growthBefore = growth_;
    stack_[index].hasDependents = false;
    stack_[index].iteration = ++iterations_;
    std::size_t low = index;
    std::vector<Triple> fresh = expandOnce(key, low);
    if (mergeAnswers(memo[key].answers, std::move(fresh))) ++growth_;
    stack_[index].low = std::min(stack_[index].low, low);
    if (stack_[index].low < index) break;
    if (!stack_[index].hasDependents || growth_ == growthBefore) break;
  }

  const Frame frame = stack_.back();
  stack_.pop_back();
  onStack_.erase(key);
  std::vector<Triple> answers = memo[key].answers;
  if (frame.low < index) {
    partial_.push_back(key);
    visited_[key] = {frame.low, stack_[frame.low].iteration};
    callerLow = std::min(callerLow, frame.low);
  } else {
    for (std::size_t i = partialMark; i < partial_.size(); ++i) settle(partial_[i]);
    partial_.resize(partialMark);
    settle(key);
  }
  return answers;
}

std::vector<Triple> BackwardChainer::solveSubgoal(const TriplePattern& sub, std::size_t& low) {
  const TermId* p = boundId(sub.p);
  if (!p || *p != vocab::kSameAs || (!boundId(sub.s) && !boundId(sub.o))) {
    return solveKey(normalizeVariables(sub), low);
  }
  // Bound sameAs goals walk equivalence classes one member at a time; the
  // open goal covers the class once.
  std::vector<Triple> found;
  for (const Triple& t : solveKey({var("0"), vocab::kSameAs, var("1")}, low)) {
    if (matches(sub, t)) found.push_back(t);
  }
  return found;
}

std::vector<TriplePattern> BackwardChainer::orderedAntecedents(const Rule& rule,
                                                               const Binding& binding) const {
  std::vector<TriplePattern> out;
  for (const auto& a : rule.antecedents) out.push_back(substitute(a, binding));
  std::stable_partition(out.begin(), out.end(), isTerminological);
  return out;
}

const TriplePattern* BackwardChainer::prunedBy(const std::vector<TriplePattern>& antecedents) const {
  if (!options_.pruning || !store_ || !options_.useStore) return nullptr;
  for (const auto& a : antecedents) {
    if (TerminologicalStore::covers(a) && store_->lookup(a).empty()) return &a;
  }
  return nullptr;
}

std::vector<Triple> BackwardChainer::expandOnce(const TriplePattern& goal, std::size_t& low) {
  if (storeAnswers(goal)) return store_->lookup(goal);
  std::vector<Triple> answers = dataMatches(kb_, goal);
  for (const Rule& rule : rules_) {
    std::optional<Binding> head = unifyConsequent(rule, goal);
    if (!head) continue;
    std::vector<TriplePattern> antecedents = orderedAntecedents(rule, *head);
    if (prunedBy(antecedents)) {
      ++counters_->pruned[rule.name];
      continue;
    }
    ++counters_->expanded[rule.name];
    std::vector<Binding> bindings{*head};
    for (const TriplePattern& antecedent : antecedents) {
      std::vector<Binding> next;
      for (const Binding& b : bindings) {
        TriplePattern sub = substitute(antecedent, b);
        std::vector<Triple> found = storeAnswers(sub) ? store_->lookup(sub) : solveSubgoal(sub, low);
        for (const Triple& t : found) {
          Binding extended = b;
          if (unifyWithTriple(sub, t, extended)) next.push_back(std::move(extended));
        }
      }
      bindings = std::move(next);
      if (bindings.empty()) break;
    }
    for (const Triple& t : applyRule(rule, bindings)) {
      if (matches(goal, t)) answers.push_back(t);
    }
  }
  sortUnique(answers);
  return answers;
}

ReasoningTree BackwardChainer::explain(const TriplePattern& goal, std::size_t nodeBudget) {
  ReasoningTree tree;
  std::set<TriplePattern> path;
  std::set<TriplePattern> expanded;
  tree.root = explainGoal(goal, path, expanded, nodeBudget, tree.nodeCount);
  return tree;
}

ReasoningNode BackwardChainer::explainGoal(const TriplePattern& goal, std::set<TriplePattern>& path,
                                           std::set<TriplePattern>& expanded, std::size_t& budget,
                                           std::size_t& nodes) {
  ReasoningNode node;
  node.kind = ReasoningNode::Kind::Or;
  node.pattern = goal;
  node.answers = solve(goal).size();
  ++nodes;
  const TriplePattern key = normalizeVariables(goal);
  if (path.contains(key)) {
    node.cyclic = true;
    return node;
  }
  if (expanded.contains(key)) {
    node.tabled = true;
    return node;
  }
  if (budget == 0) {
    node.truncated = true;
    return node;
  }
  --budget;
  expanded.insert(key);
  path.insert(key);

  auto leaf = [&](const TriplePattern& pattern, ReasoningNode::Source source) {
    ReasoningNode l;
    l.kind = ReasoningNode::Kind::Leaf;
    l.pattern = pattern;
    l.source = source;
    l.matches = source == ReasoningNode::Source::Store ? store_->lookup(pattern)
                                                       : dataMatches(kb_, pattern);
    ++nodes;
    return l;
  };

  if (storeAnswers(goal)) {
    node.children.push_back(leaf(goal, ReasoningNode::Source::Store));
    path.erase(key);
    return node;
  }
  node.children.push_back(leaf(goal, ReasoningNode::Source::Data));
  for (const Rule& rule : rules_) {
    std::optional<Binding> head = unifyConsequent(rule, goal);
    if (!head) continue;
    ReasoningNode branch;
    branch.kind = ReasoningNode::Kind::And;
    branch.rule = rule.name;
    branch.pattern = substitute(rule.consequent, *head);
    ++nodes;
    std::vector<TriplePattern> antecedents = orderedAntecedents(rule, *head);
    if (const TriplePattern* empty = prunedBy(antecedents)) {
      branch.pruned = true;
      branch.reason = "schema antecedent has no match in the terminological store";
      branch.children.push_back(leaf(*empty, ReasoningNode::Source::Store));
    } else {
      for (const auto& antecedent : antecedents) {
        if (storeAnswers(antecedent)) {
          branch.children.push_back(leaf(antecedent, ReasoningNode::Source::Store));
        } else {
          branch.children.push_back(explainGoal(antecedent, path, expanded, budget, nodes));
        }
      }
    }
    node.children.push_back(std::move(branch));
  }
  path.erase(key);
  return node;
}

std::vector<Triple> tiReason(const TriplePattern& goal, const KnowledgeBase& kb,
                             const std::vector<Rule>& rules, const TerminologicalStore* store,
                             Tabling& table, const BackwardOptions& options,
                             ExpansionCounters* counters) {
  BackwardChainer chainer(kb, rules, store, table, options, counters);
  return chainer.solve(goal);
}

TerminologicalStore precomputeTerminological(const KnowledgeBase& kb, const std::vector<Rule>& rules,
                                             const BackwardOptions& options) {
  BackwardOptions pure = options;
  pure.useStore = false;
  pure.pruning = false;
  Tabling table;
  BackwardChainer chainer(kb, rules, nullptr, table, pure);
  TerminologicalStore store;
  for (const auto& shape : TerminologicalStore::shapes()) store.put(shape, chainer.solve(shape));
  return store;
}

namespace {

void renderNode(const ReasoningNode& node, const Dictionary& dict, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  switch (node.kind) {
    case ReasoningNode::Kind::Or:
      out += "OR " + formatPattern(node.pattern, dict) + "  [" + std::to_string(node.answers) +
             (node.answers == 1 ? " answer]" : " answers]");
      if (node.cyclic) out += " (cycle)";
      if (node.tabled) out += " (tabled)";
      if (node.truncated) out += " (truncated)";
      break;
    case ReasoningNode::Kind::And:
      out += "AND " + node.rule + " => " + formatPattern(node.pattern, dict);
      if (node.pruned) out += "  PRUNED: " + node.reason;
      break;
    case ReasoningNode::Kind::Leaf:
      out += "LEAF " + formatPattern(node.pattern, dict) + "  [" +
             (node.source == ReasoningNode::Source::Store ? "store" : "data") + ", " +
             std::to_string(node.matches.size()) +
             (node.matches.size() == 1 ? " match]" : " matches]");
      break;
  }
  out += '\n';
  for (const auto& child : node.children) renderNode(child, dict, depth + 1, out);
}

}  // namespace

std::string formatTree(const ReasoningTree& tree, const Dictionary& dict) {
  std::string out;
  renderNode(tree.root, dict, 0, out);
  return out;
}

}  // namespace rdfr
