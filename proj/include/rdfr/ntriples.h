#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rdfr/dictionary.h"
#include "rdfr/triple.h"

namespace rdfr {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

// Syntax error inside one line; column is 0-based.
class TermSyntaxError : public std::runtime_error {
 public:
  TermSyntaxError(std::size_t column, const std::string& message)
      : std::runtime_error(message), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

struct ParseOptions {
  // Skip and count malformed lines instead of failing on the first one.
  bool lenient = false;
  // Prepended to every blank node label; gives each input file its own
  // blank node scope. Empty keeps labels as written.
  std::string blankNodePrefix;
};

struct ParsedStatement {
  Triple triple;
  std::size_t line = 0;
};

struct ParseResult {
  std::vector<ParsedStatement> statements;
  std::size_t skippedLines = 0;
  // Lenient mode keeps the first few errors for diagnostics.
  std::vector<ParseError> errors;
};

// Reads one N-Triples term starting at `pos` (which must point at the first
// character of the term) and advances `pos` past it. Also understands `?var`
// when `allowVariables` is set, returning it as a Term with kind Iri and
// `variable` set to true. The prefixes rdf:, rdfs:, owl: and xsd: inside
// angle brackets are expanded to their namespaces.
struct LexedTerm {
  Term term;
  bool variable = false;
};
LexedTerm lexTerm(std::string_view line, std::size_t& pos, bool allowVariables = false);

// Expands `rdf:`, `rdfs:`, `owl:` and `xsd:` prefixed IRIs; returns the
// input otherwise.
std::string expandKnownPrefix(std::string_view iri);

void skipSpaces(std::string_view line, std::size_t& pos);

ParseResult parseNTriples(std::istream& in, Dictionary& dict, const ParseOptions& options = {});
ParseResult parseNTriples(std::string_view text, Dictionary& dict,
                          const ParseOptions& options = {});

// Splits `text` at line boundaries and parses the pieces concurrently.
// Statement order and line numbers match the sequential parser.
ParseResult parseNTriplesParallel(std::string_view text, Dictionary& dict,
                                  const ParseOptions& options, std::size_t workers);

// N-Triples rendering of a single term.
std::string formatTerm(const Term& term);

// Writes `triples` sorted by (s, p, o) id order, one line per triple.
void serializeNTriples(std::span<const Triple> triples, const Dictionary& dict, std::ostream& out);
std::string serializeNTriples(std::span<const Triple> triples, const Dictionary& dict);

}  // namespace rdfr
