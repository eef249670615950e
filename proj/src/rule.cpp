#include "rdfr/rule.h"

#include <algorithm>
#include <map>

namespace rdfr {

namespace {

TriplePattern tp(Slot s, Slot p, Slot o) { return {std::move(s), std::move(p), std::move(o)}; }

void collectVariables(const TriplePattern& pattern, std::vector<std::string>& out) {
  for (const Slot* slot : pattern.slots()) {
    if (const Variable* v = variableOf(*slot)) {
      if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
    }
  }
}

}  // namespace

std::vector<std::string> Rule::unsafeVariables() const {
  std::vector<std::string> body;
  for (const auto& a : antecedents) collectVariables(a, body);
  std::vector<std::string> head;
  collectVariables(consequent, head);
  std::vector<std::string> unsafe;
  for (const auto& v : head) {
    if (std::find(body.begin(), body.end(), v) == body.end()) unsafe.push_back(v);
  }
  return unsafe;
}

std::vector<Rule> builtinRuleset() {
  using namespace vocab;
  std::vector<Rule> out;
  out.push_back({rules::kSameAsTrans,
                 {tp(var("v"), kSameAs, var("w")), tp(var("w"), kSameAs, var("u"))},
                 tp(var("v"), kSameAs, var("u")),
                 false});
  out.push_back({rules::kTypeSub,
                 {tp(var("s"), kType, var("x")), tp(var("x"), kSubClassOf, var("y"))},
                 tp(var("s"), kType, var("y")),
                 false});
  out.push_back({rules::kSubTrans,
                 {tp(var("x"), kSubClassOf, var("y")), tp(var("y"), kSubClassOf, var("z"))},
                 tp(var("x"), kSubClassOf, var("z")),
                 false});
  out.push_back({rules::kSubProp,
                 {tp(var("s"), var("p"), var("o")), tp(var("p"), kSubPropertyOf, var("q"))},
                 tp(var("s"), var("q"), var("o")),
                 false});
  out.push_back({rules::kSubPropTrans,
                 {tp(var("p"), kSubPropertyOf, var("q")), tp(var("q"), kSubPropertyOf, var("r"))},
                 tp(var("p"), kSubPropertyOf, var("r")),
                 true});
  out.push_back({rules::kSymmetric,
                 {tp(var("p"), kType, kSymmetricProperty), tp(var("v"), var("p"), var("u"))},
                 tp(var("u"), var("p"), var("v")),
                 false});
  out.push_back({rules::kSameAsSymm,
                 {tp(var("v"), kSameAs, var("w"))},
                 tp(var("w"), kSameAs, var("v")),
                 true});
  return out;
}

bool sameShape(const Rule& a, const Rule& b) {
  if (a.antecedents.size() != b.antecedents.size()) return false;
  auto canonical = [](const Rule& r) {
    std::map<std::string, std::string> names;
    auto rename = [&](const TriplePattern& pattern) {
      auto slot = [&](const Slot& s) -> Slot {
        const Variable* v = variableOf(s);
        if (!v) return s;
        auto [it, inserted] = names.try_emplace(v->name, std::to_string(names.size()));
        return Variable{it->second};
      };
      Slot s = slot(pattern.s);
      Slot p = slot(pattern.p);
      Slot o = slot(pattern.o);
      return TriplePattern{s, p, o};
    };
    std::vector<TriplePattern> out;
    for (const auto& ant : r.antecedents) out.push_back(rename(ant));
    out.push_back(rename(r.consequent));
    return out;
  };
  return canonical(a) == canonical(b);
}

std::optional<Binding> unifyConsequent(const Rule& rule, const TriplePattern& query) {
  Binding binding;
  auto head = rule.consequent.slots();
  auto goal = query.slots();
  for (int i = 0; i < 3; ++i) {
    const TermId* q = boundId(*goal[i]);
    if (!q) continue;
    if (const TermId* c = boundId(*head[i])) {
      if (*c != *q) return std::nullopt;
    } else if (!binding.bind(variableOf(*head[i])->name, *q)) {
      return std::nullopt;
    }
  }
  return binding;
}

TriplePattern substitute(const TriplePattern& pattern, const Binding& binding) {
  auto slot = [&](const Slot& s) -> Slot {
    if (const Variable* v = variableOf(s)) {
      if (auto id = binding.get(v->name)) return *id;
    }
    return s;
  };
  return {slot(pattern.s), slot(pattern.p), slot(pattern.o)};
}

std::vector<Triple> applyRule(const Rule& rule, std::span<const Binding> bindings) {
  std::vector<Triple> out;
  out.reserve(bindings.size());
  for (const Binding& b : bindings) {
    TriplePattern head = substitute(rule.consequent, b);
    if (!head.ground()) {
      throw UnsafeBindingError("binding leaves a consequent variable of " + rule.name + " unbound");
    }
    out.push_back(head.toTriple());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Binding> joinAntecedents(const LookupFn& lookup,
                                     std::span<const TriplePattern> antecedents,
                                     const Binding& seed) {
  std::vector<Binding> current{seed};
  for (const TriplePattern& antecedent : antecedents) {
    std::vector<Binding> next;
    for (const Binding& b : current) {
      TriplePattern instantiated = substitute(antecedent, b);
      for (const Triple& t : lookup(instantiated)) {
        Binding extended = b;
        if (unifyWithTriple(instantiated, t, extended)) next.push_back(std::move(extended));
      }
    }
    current = std::move(next);
    if (current.empty()) break;
  }
  return current;
}

}  // namespace rdfr
