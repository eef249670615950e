#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rdfr/dictionary.h"
#include "rdfr/rule.h"

namespace rdfr {

class RuleSyntaxError : public std::runtime_error {
 public:
  RuleSyntaxError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Stands in for a constant the dictionary has never seen. No stored triple
// carries it, so a pattern mentioning it matches nothing.
inline constexpr TermId kUnknownTerm = termId(~std::uint64_t{0});

// One pattern: three terms in N-Triples syntax or `?name` variables, with an
// optional trailing '.'. Constants are resolved against `dict` without
// interning; unknown ones become kUnknownTerm.
TriplePattern parsePattern(std::string_view text, const Dictionary& dict);

// Rule file text, one rule per line:
//   name: pattern, pattern -> pattern
// Blank lines and lines starting with '#' are skipped. Rules must be safe
// and their consequent may only mention known constants.
std::vector<Rule> parseRules(std::string_view text, const Dictionary& dict);
std::vector<Rule> parseRuleFile(const std::string& path, const Dictionary& dict);

}  // namespace rdfr
