#include "rdfr/materializer.h"

#include <algorithm>
#include <set>

namespace rdfr {

namespace {

std::vector<TermId> reachableFrom(TermId start, const std::map<TermId, std::vector<TermId>>& edges) {
  std::set<TermId> seen;
  std::vector<TermId> stack{start};
  while (!stack.empty()) {
    TermId node = stack.back();
    stack.pop_back();
    auto it = edges.find(node);
    if (it == edges.end()) continue;
    for (TermId next : it->second) {
      if (seen.insert(next).second) stack.push_back(next);
    }
  }
  return {seen.begin(), seen.end()};
}

std::map<TermId, std::vector<TermId>> closeEdges(std::map<TermId, std::vector<TermId>> edges,
                                                 bool transitive) {
  for (auto& [node, targets] : edges) {
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  }
  if (!transitive) return edges;
  std::map<TermId, std::vector<TermId>> closed;
  for (const auto& [node, targets] : edges) closed[node] = reachableFrom(node, edges);
  return closed;
}

void appendEdges(const std::map<TermId, std::vector<TermId>>& edges, TermId predicate,
                 const TriplePattern& pattern, std::vector<Triple>& out) {
  auto emitFrom = [&](TermId s, const std::vector<TermId>& targets) {
    for (TermId o : targets) {
      Triple t{s, predicate, o};
      if (matches(pattern, t)) out.push_back(t);
    }
  };
  if (const TermId* s = boundId(pattern.s)) {
    if (auto it = edges.find(*s); it != edges.end()) emitFrom(*s, it->second);
    return;
  }
  for (const auto& [s, targets] : edges) emitFrom(s, targets);
}

std::size_t partitionsFor(const JobOptions& options) {
  if (options.partitions > 0) return options.partitions;
  return 2 * std::max<std::size_t>(1, options.mapreduce.workers);
}

std::size_t splitsFor(std::size_t records, const JobOptions& options) {
  if (records == 0) return 0;
  return std::min(records, 4 * std::max<std::size_t>(1, options.mapreduce.workers));
}

std::span<const Triple> splitOf(std::span<const Triple> records, std::size_t splits,
                                std::size_t i) {
  std::size_t begin = records.size() * i / splits;
  std::size_t end = records.size() * (i + 1) / splits;
  return records.subspan(begin, end - begin);
}

std::string describe(const Triple& t) {
  return "(" + std::to_string(raw(t.s)) + " " + std::to_string(raw(t.p)) + " " +
         std::to_string(raw(t.o)) + ")";
}

// Runs `fn` on every triple of a split, naming the failing triple on error.
template <typename Fn>
void mapTriples(const std::string& job, std::span<const Triple> split, Fn&& fn) {
  for (const Triple& t : split) {
    try {
      fn(t);
    } catch (const std::exception& e) {
      throw mr::JobError(job + ": mapper failed on triple " + describe(t) + ": " + e.what());
    }
  }
}

std::vector<Triple> decodeKeys(const std::vector<mr::KeyValue>& records) {
  std::vector<Triple> out;
  out.reserve(records.size());
  for (const auto& kv : records) out.push_back(decodeTriple(kv.key));
  return out;
}

// Reducer emitting each distinct key once.
void emitKeyOnce(std::string_view key, mr::ValueStream&, mr::Emitter& out) {
  out.emit(std::string(key), {});
}

std::string encodeId(TermId id) {
  std::string out;
  appendBigEndian(out, raw(id));
  return out;
}

bool isSameAsPattern(const TriplePattern& pattern) {
  const TermId* p = boundId(pattern.p);
  return p && *p == vocab::kSameAs;
}

std::vector<std::string> variablesOf(const TriplePattern& pattern) {
  std::vector<std::string> out;
  for (const Slot* slot : pattern.slots()) {
    if (const Variable* v = variableOf(*slot)) out.push_back(v->name);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Triple> reduceSideJoin(const Rule& rule, const MaterializationState& state,
                                   const JobOptions& options) {
  const TriplePattern& left = rule.antecedents[0];
  const TriplePattern& right = rule.antecedents[1];
  std::vector<std::string> leftVars = variablesOf(left);
  std::vector<std::string> rightVars = variablesOf(right);
  std::vector<std::string> shared;
  std::set_intersection(leftVars.begin(), leftVars.end(), rightVars.begin(), rightVars.end(),
                        std::back_inserter(shared));
  if (shared.empty()) {
    throw UnsupportedRuleError("rule " + rule.name + " joins instance patterns without a shared variable");
  }

  mr::JobSpec spec;
  spec.name = rule.name;
  spec.partitions = partitionsFor(options);
  std::span<const Triple> base = state.base;
  const std::size_t splits = splitsFor(base.size(), options);
  auto mapSplit = [&](std::size_t i, mr::Emitter& out) {
    mapTriples(spec.name, splitOf(base, splits, i), [&](const Triple& t) {
      const char fresh = std::binary_search(state.delta.begin(), state.delta.end(), t) ? 1 : 0;
      for (char side : {'L', 'R'}) {
        Binding b;
        if (!unifyWithTriple(side == 'L' ? left : right, t, b)) continue;
        std::string key;
        for (const auto& name : shared) appendBigEndian(key, raw(*b.get(name)));
        std::string value{side, fresh};
        value += encodeTriple(t);
        out.emit(std::move(key), std::move(value));
      }
    });
  };
  spec.reducer = [&](std::string_view, mr::ValueStream& values, mr::Emitter& out) {
    std::vector<std::pair<Triple, bool>> lefts, rights;
    std::string_view v;
    while (values.next(v)) {
      auto& side = v[0] == 'L' ? lefts : rights;
      side.emplace_back(decodeTriple(v, 2), v[1] == 1);
    }
    for (const auto& [l, lFresh] : lefts) {
      for (const auto& [r, rFresh] : rights) {
        if (!lFresh && !rFresh) continue;
        Binding b;
        if (!unifyWithTriple(left, l, b) || !unifyWithTriple(right, r, b)) continue;
        for (const Triple& t : applyRule(rule, std::span<const Binding>(&b, 1))) {
          out.emit(encodeTriple(t), {});
        }
      }
    }
  };
  auto joined = mr::runJobOnSplits(spec, splits, mapSplit, options.mapreduce);

  mr::JobSpec dedup;
  dedup.name = rule.name + "-distinct";
  dedup.partitions = spec.partitions;
  dedup.mapper = [](const mr::KeyValue& kv, mr::Emitter& out) { out.emit(kv.key, {}); };
  dedup.reducer = emitKeyOnce;
  return decodeKeys(mr::runJob(dedup, joined, options.mapreduce));
}

}  // namespace

std::vector<Triple> TBoxClosure::lookup(const TriplePattern& pattern) const {
  std::vector<Triple> out;
  const TermId* p = boundId(pattern.p);
  if (!p) return out;
  if (*p == vocab::kSubClassOf) {
    appendEdges(superclassesOf, vocab::kSubClassOf, pattern, out);
  } else if (*p == vocab::kSubPropertyOf) {
    appendEdges(superpropertiesOf, vocab::kSubPropertyOf, pattern, out);
  } else if (*p == vocab::kType) {
    for (TermId s : symmetricProperties) {
      Triple t{s, vocab::kType, vocab::kSymmetricProperty};
      if (matches(pattern, t)) out.push_back(t);
    }
  }
  return out;
}

std::vector<Triple> TBoxClosure::triples() const {
  std::vector<Triple> out;
  for (const auto& [s, targets] : superclassesOf) {
    for (TermId o : targets) out.push_back({s, vocab::kSubClassOf, o});
  }
  for (const auto& [s, targets] : superpropertiesOf) {
    for (TermId o : targets) out.push_back({s, vocab::kSubPropertyOf, o});
  }
  for (TermId s : symmetricProperties) out.push_back({s, vocab::kType, vocab::kSymmetricProperty});
  std::sort(out.begin(), out.end());
  return out;
}

TBoxClosure buildTBoxClosure(std::span<const Triple> tbox, bool transitiveClasses,
                             bool transitiveProperties) {
  std::map<TermId, std::vector<TermId>> classEdges;
  std::map<TermId, std::vector<TermId>> propertyEdges;
  TBoxClosure closure;
  for (const Triple& t : tbox) {
    if (t.p == vocab::kSubClassOf) {
      classEdges[t.s].push_back(t.o);
    } else if (t.p == vocab::kSubPropertyOf) {
      propertyEdges[t.s].push_back(t.o);
    } else if (t.p == vocab::kType && t.o == vocab::kSymmetricProperty) {
      closure.symmetricProperties.push_back(t.s);
    }
  }
  closure.superclassesOf = closeEdges(std::move(classEdges), transitiveClasses);
  closure.superpropertiesOf = closeEdges(std::move(propertyEdges), transitiveProperties);
  auto& sym = closure.symmetricProperties;
  std::sort(sym.begin(), sym.end());
  sym.erase(std::unique(sym.begin(), sym.end()), sym.end());
  return closure;
}

std::vector<Triple> subclassTypeJob(const MaterializationState& state, const TBoxClosure& closure,
                                    const JobOptions& options, SubclassJobFlags flags) {
  mr::JobSpec spec;
  spec.name = "subclass-type";
  spec.partitions = partitionsFor(options);
  std::span<const Triple> source = state.delta;
  const std::size_t splits = splitsFor(source.size(), options);
  auto mapSplit = [&](std::size_t i, mr::Emitter& out) {
    mapTriples(spec.name, splitOf(source, splits, i), [&](const Triple& t) {
      char flag;
      if (t.p == vocab::kType && flags.emitTypes) {
        flag = 0;
      } else if (t.p == vocab::kSubClassOf && flags.emitSubclasses) {
        flag = 1;
      } else {
        return;
      }
      std::string key(1, flag);
      appendBigEndian(key, raw(t.s));
      out.emit(std::move(key), encodeId(t.o));
    });
  };
  spec.reducer = [&](std::string_view key, mr::ValueStream& values, mr::Emitter& out) {
    const bool typeGroup = key[0] == 0;
    const TermId subject = termId(readBigEndian(key, 1));
    std::vector<TermId> classes;
    std::string_view v;
    while (values.next(v)) {
      TermId c = termId(readBigEndian(v));
      if (classes.empty() || classes.back() != c) classes.push_back(c);
    }
    std::set<TermId> supers;
    for (TermId c : classes) {
      auto it = closure.superclassesOf.find(c);
      if (it != closure.superclassesOf.end()) supers.insert(it->second.begin(), it->second.end());
    }
    const TermId predicate = typeGroup ? vocab::kType : vocab::kSubClassOf;
    for (TermId super : supers) {
      if (std::binary_search(classes.begin(), classes.end(), super)) continue;
      out.emit(encodeTriple({subject, predicate, super}), {});
    }
  };
  return decodeKeys(mr::runJobOnSplits(spec, splits, mapSplit, options.mapreduce));
}

std::vector<Triple> genericRuleJob(const Rule& rule, const MaterializationState& state,
                                   const TBoxClosure& closure, const JobOptions& options) {
  std::vector<std::size_t> instance;
  for (std::size_t i = 0; i < rule.antecedents.size(); ++i) {
    if (!isTBoxResident(rule.antecedents[i])) instance.push_back(i);
  }
  if (instance.size() >= 2) {
    bool allSameAs = std::all_of(rule.antecedents.begin(), rule.antecedents.end(), isSameAsPattern);
    if (instance.size() == 2 && rule.antecedents.size() == 2 && allSameAs) {
      return reduceSideJoin(rule, state, options);
    }
    throw UnsupportedRuleError("rule " + rule.name +
                               " joins several instance patterns; only one is supported");
  }
  const std::size_t streamed = instance.empty() ? 0 : instance.front();
  std::vector<TriplePattern> rest;
  for (std::size_t i = 0; i < rule.antecedents.size(); ++i) {
    if (i != streamed) rest.push_back(rule.antecedents[i]);
  }
  const LookupFn tboxLookup = [&](const TriplePattern& p) { return closure.lookup(p); };

  mr::JobSpec spec;
  spec.name = rule.name;
  spec.partitions = partitionsFor(options);
  std::span<const Triple> source = state.delta;
  const std::size_t splits = splitsFor(source.size(), options);
  auto mapSplit = [&](std::size_t i, mr::Emitter& out) {
    mapTriples(spec.name, splitOf(source, splits, i), [&](const Triple& t) {
      Binding seed;
      if (!unifyWithTriple(rule.antecedents[streamed], t, seed)) return;
      auto bindings = joinAntecedents(tboxLookup, rest, seed);
      for (const Triple& inferred : applyRule(rule, bindings)) {
        out.emit(encodeTriple(inferred), {});
      }
    });
  };
  spec.reducer = emitKeyOnce;
  return decodeKeys(mr::runJobOnSplits(spec, splits, mapSplit, options.mapreduce));
}

std::vector<Triple> duplicateEliminationJob(std::span<const Triple> candidates,
                                            const MaterializationState& state,
                                            const JobOptions& options) {
  constexpr char kInferred = 'I';
  constexpr char kOriginal = 'O';
  mr::JobSpec spec;
  spec.name = "duplicate-elimination";
  spec.partitions = partitionsFor(options);
  std::span<const Triple> base = state.base;
  const std::size_t candidateSplits = splitsFor(candidates.size(), options);
  const std::size_t baseSplits = splitsFor(base.size(), options);
  auto mapSplit = [&](std::size_t i, mr::Emitter& out) {
    const bool inferred = i < candidateSplits;
    std::span<const Triple> split = inferred ? splitOf(candidates, candidateSplits, i)
                                             : splitOf(base, baseSplits, i - candidateSplits);
    mapTriples(spec.name, split, [&](const Triple& t) {
      out.emit(encodeTriple(t), std::string(1, inferred ? kInferred : kOriginal));
    });
  };
  spec.reducer = [](std::string_view key, mr::ValueStream& values, mr::Emitter& out) {
    bool inferred = false;
    bool original = false;
    std::string_view v;
    while (values.next(v)) {
      inferred |= v[0] == kInferred;
      original |= v[0] == kOriginal;
    }
    if (inferred && !original) out.emit(std::string(key), {});
  };
  return decodeKeys(
      mr::runJobOnSplits(spec, candidateSplits + baseSplits, mapSplit, options.mapreduce));
}

RoundLimitError::RoundLimitError(std::size_t limit, const RoundStats& last)
    : std::runtime_error("no fixpoint after " + std::to_string(limit) + " rounds; round " +
                         std::to_string(last.round) + " emitted " + std::to_string(last.emitted) +
                         " and accepted " + std::to_string(last.accepted) + " triples"),
      last_(last) {}

namespace {

struct Plan {
  bool typeSub = false;
  bool subTrans = false;
  bool subPropTrans = false;
  std::vector<const Rule*> generic;
};

Plan planRules(const std::vector<Rule>& rules, bool canonical) {
  Plan plan;
  std::vector<Rule> builtin = builtinRuleset();
  auto shapeOf = [&](const char* name) -> const Rule& {
    return *std::find_if(builtin.begin(), builtin.end(), [&](const Rule& r) { return r.name == name; });
  };
  for (const Rule& rule : rules) {
    if (!rule.safe()) throw UnsupportedRuleError("rule " + rule.name + " is unsafe");
    if (rule.antecedents.empty()) throw UnsupportedRuleError("rule " + rule.name + " has no antecedent");
    if (sameShape(rule, shapeOf(rules::kTypeSub))) {
      plan.typeSub = true;
      continue;
    }
    if (sameShape(rule, shapeOf(rules::kSubTrans))) {
      plan.subTrans = true;
      continue;
    }
    if (sameShape(rule, shapeOf(rules::kSubPropTrans))) plan.subPropTrans = true;
    const bool anySameAs = std::any_of(rule.antecedents.begin(), rule.antecedents.end(), isSameAsPattern);
    if (canonical && anySameAs) {
      // Equalities live in the equivalence map, which is closed under
      // symmetry and transitivity already.
      if (std::all_of(rule.antecedents.begin(), rule.antecedents.end(), isSameAsPattern)) continue;
      throw UnsupportedRuleError("rule " + rule.name +
                                 " mixes owl:sameAs with other antecedents; disable canonicalization");
    }
    std::size_t instance = 0;
    for (const auto& a : rule.antecedents) instance += !isTBoxResident(a);
    if (instance >= 2 && !(instance == 2 && rule.antecedents.size() == 2 && anySameAs &&
                           std::all_of(rule.antecedents.begin(), rule.antecedents.end(), isSameAsPattern))) {
      throw UnsupportedRuleError("rule " + rule.name +
                                 " joins several instance patterns; only one is supported");
    }
    plan.generic.push_back(&rule);
  }
  return plan;
}

bool hasSameAsTriple(std::span<const Triple> triples) {
  return std::any_of(triples.begin(), triples.end(),
                     [](const Triple& t) { return t.p == vocab::kSameAs; });
}

std::vector<Triple> sortedUnion(const std::vector<Triple>& a, const std::vector<Triple>& b) {
  std::vector<Triple> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

MaterializeResult materialize(const KnowledgeBase& input, const std::vector<Rule>& rules,
                              const MaterializeOptions& options) {
  const bool canonical = options.canonicalSameAs;
  Plan plan = planRules(rules, canonical);

  KnowledgeBase start = canonical && hasSameAsTriple(input.triples()) ? canonicalize(input) : input;
  EquivalenceMap eq = start.equivalence();
  if (!eq.finalized()) eq.finalize();

  MaterializationState state;
  state.base.assign(start.triples().begin(), start.triples().end());
  state.delta = state.base;
  std::size_t inferred = 0;

  for (std::size_t round = 1;; ++round) {
    if (round > options.roundLimit) throw RoundLimitError(options.roundLimit, state.stats.back());
    state.round = round;
    TBoxClosure closure;
    {
      std::vector<Triple> tbox;
      for (const Triple& t : state.base) {
        if (isTBoxTriple(t)) tbox.push_back(t);
      }
      closure = buildTBoxClosure(tbox, plan.subTrans, plan.subPropTrans);
    }

    std::vector<Triple> candidates;
    if (plan.typeSub || plan.subTrans) {
      auto out = subclassTypeJob(state, closure, options.jobs, {plan.typeSub, plan.subTrans});
      candidates.insert(candidates.end(), out.begin(), out.end());
    }
    for (const Rule* rule : plan.generic) {
      auto out = genericRuleJob(*rule, state, closure, options.jobs);
      candidates.insert(candidates.end(), out.begin(), out.end());
    }
    const std::size_t emitted = candidates.size();
    if (canonical) {
      // Equalities the map already knows are not new.
      std::erase_if(candidates, [&](const Triple& t) {
        return t.p == vocab::kSameAs && eq.contains(t.s) && eq.contains(t.o) &&
               eq.find(t.s) == eq.find(t.o);
      });
    }
    std::vector<Triple> accepted = duplicateEliminationJob(candidates, state, options.jobs);
    state.stats.push_back({round, emitted, emitted - accepted.size(), accepted.size()});
    inferred += accepted.size();
    if (accepted.empty()) break;

    const bool tboxChanged = std::any_of(accepted.begin(), accepted.end(), isTBoxTriple);
    if (canonical && hasSameAsTriple(accepted)) {
      std::vector<Triple> all = sortedUnion(state.base, accepted);
      for (const auto& [member, rep] : eq.assignments()) all.push_back({member, vocab::kSameAs, rep});
      KnowledgeBase merged = canonicalize(std::span<const Triple>(all));
      state.base.assign(merged.triples().begin(), merged.triples().end());
      eq = std::move(merged.equivalence());
      state.delta = state.base;
      continue;
    }
    state.base = sortedUnion(state.base, accepted);
    state.delta = tboxChanged ? state.base : std::move(accepted);
  }

  MaterializeResult result{KnowledgeBase(state.base), std::move(state.stats), inferred};
  result.kb.equivalence() = std::move(eq);
  result.kb.setMaterialized(true);
  return result;
}

}  // namespace rdfr
