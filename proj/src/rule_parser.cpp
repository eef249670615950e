#include "rdfr/rule_parser.h"

#include <fstream>
#include <sstream>

#include "rdfr/ntriples.h"

namespace rdfr {

RuleSyntaxError::RuleSyntaxError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

namespace {

Slot resolveSlot(const LexedTerm& lexed, const Dictionary& dict, std::size_t column) {
  if (lexed.variable) return Variable{lexed.term.lexical};
  if (auto problem = validateTerm(lexed.term); !problem.empty()) {
    throw TermSyntaxError(column, problem);
  }
  if (auto id = dict.find(lexed.term)) return *id;
  return kUnknownTerm;
}

// Reads three terms starting at `pos`, plus an optional '.'.
TriplePattern lexPattern(std::string_view text, std::size_t& pos, const Dictionary& dict) {
  Slot slots[3];
  for (int i = 0; i < 3; ++i) {
    skipSpaces(text, pos);
    std::size_t start = pos;
    LexedTerm lexed = lexTerm(text, pos, true);
    if (i == 1 && !lexed.variable && !lexed.term.isIri()) {
      throw TermSyntaxError(start, "predicate must be an IRI or a variable");
    }
    slots[i] = resolveSlot(lexed, dict, start);
  }
  skipSpaces(text, pos);
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    skipSpaces(text, pos);
  }
  return {std::move(slots[0]), std::move(slots[1]), std::move(slots[2])};
}

Rule parseRuleLine(std::string_view line, const Dictionary& dict) {
  std::size_t colon = line.find(':');
  std::size_t pos = 0;
  skipSpaces(line, pos);
  if (colon == std::string_view::npos || colon == pos) {
    throw TermSyntaxError(pos, "expected 'name:' before the rule body");
  }
  std::string name(line.substr(pos, colon - pos));
  while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
  if (name.find_first_of(" \t<>\"?") != std::string::npos) {
    throw TermSyntaxError(pos, "invalid rule name '" + name + "'");
  }
  pos = colon + 1;

  Rule rule;
  rule.name = std::move(name);
  for (;;) {
    rule.antecedents.push_back(lexPattern(line, pos, dict));
    if (pos < line.size() && line[pos] == ',') {
      ++pos;
      continue;
    }
    if (line.substr(pos, 2) == "->") {
      pos += 2;
      break;
    }
    throw TermSyntaxError(pos, "expected ',' or '->'");
  }
  std::size_t consequentStart = pos;
  rule.consequent = lexPattern(line, pos, dict);
  if (pos < line.size() && line[pos] != '#') throw TermSyntaxError(pos, "trailing characters");

  for (const Slot* slot : rule.consequent.slots()) {
    if (const TermId* id = boundId(*slot); id && *id == kUnknownTerm) {
      throw TermSyntaxError(consequentStart, "consequent mentions a term absent from the data");
    }
  }
  if (auto unsafe = rule.unsafeVariables(); !unsafe.empty()) {
    throw TermSyntaxError(consequentStart,
                          "consequent variable ?" + unsafe.front() + " occurs in no antecedent");
  }
  return rule;
}

}  // namespace

TriplePattern parsePattern(std::string_view text, const Dictionary& dict) {
  std::size_t pos = 0;
  try {
    TriplePattern pattern = lexPattern(text, pos, dict);
    if (pos < text.size()) throw TermSyntaxError(pos, "trailing characters");
    return pattern;
  } catch (const TermSyntaxError& e) {
    throw RuleSyntaxError(1, e.column() + 1, e.what());
  }
}

std::vector<Rule> parseRules(std::string_view text, const Dictionary& dict) {
  std::vector<Rule> rules;
  std::size_t lineNo = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    ++lineNo;
    begin = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    try {
      rules.push_back(parseRuleLine(line, dict));
    } catch (const TermSyntaxError& e) {
      throw RuleSyntaxError(lineNo, e.column() + 1, e.what());
    }
  }
  return rules;
}

std::vector<Rule> parseRuleFile(const std::string& path, const Dictionary& dict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open rule file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseRules(buffer.str(), dict);
}

}  // namespace rdfr
