#include "rdfr/ntriples.h"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "rdfr/parallel.h"

namespace rdfr {

namespace {

constexpr std::size_t kMaxKeptErrors = 16;

using LexError = TermSyntaxError;

bool isLangChar(char c, bool first) {
  return std::isalpha(static_cast<unsigned char>(c)) ||
         (!first && std::isdigit(static_cast<unsigned char>(c)));
}

bool isBlankLabelChar(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c >= 0x80;
}

bool isVariableChar(unsigned char c) { return std::isalnum(c) || c == '_'; }

void appendUtf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Reads a \uXXXX or \UXXXXXXXX escape; pos points at the 'u' / 'U'.
std::uint32_t readUnicodeEscape(std::string_view line, std::size_t& pos) {
  std::size_t digits = line[pos] == 'u' ? 4 : 8;
  std::size_t start = pos;
  ++pos;
  if (pos + digits > line.size()) throw LexError{start, "truncated unicode escape"};
  std::uint32_t cp = 0;
  for (std::size_t i = 0; i < digits; ++i, ++pos) {
    char c = line[pos];
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      throw LexError{pos, "invalid hex digit in unicode escape"};
    }
    cp = cp * 16 + static_cast<std::uint32_t>(v);
  }
  if (cp > 0x10FFFF) throw LexError{start, "unicode escape out of range"};
  return cp;
}

std::string lexIri(std::string_view line, std::size_t& pos) {
  std::size_t start = pos;
  ++pos;  // '<'
  std::string value;
  while (pos < line.size() && line[pos] != '>') {
    unsigned char c = static_cast<unsigned char>(line[pos]);
    if (c == '\\') {
      ++pos;
      if (pos >= line.size() || (line[pos] != 'u' && line[pos] != 'U')) {
        throw LexError{pos - 1, "only \\u and \\U escapes are allowed in IRIs"};
      }
      appendUtf8(value, readUnicodeEscape(line, pos));
      continue;
    }
    if (c <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
        c == '`') {
      throw LexError{pos, "character not allowed in IRI"};
    }
    value.push_back(static_cast<char>(c));
    ++pos;
  }
  if (pos >= line.size()) throw LexError{start, "unterminated IRI"};
  ++pos;  // '>'
  if (value.empty()) throw LexError{start, "empty IRI"};
  return expandKnownPrefix(value);
}

std::string lexQuoted(std::string_view line, std::size_t& pos) {
  std::size_t start = pos;
  ++pos;  // '"'
  std::string value;
  while (pos < line.size() && line[pos] != '"') {
    char c = line[pos];
    if (c == '\\') {
      ++pos;
      if (pos >= line.size()) throw LexError{pos - 1, "dangling escape"};
      switch (line[pos]) {
        case 't': value.push_back('\t'); ++pos; break;
        case 'b': value.push_back('\b'); ++pos; break;
        case 'n': value.push_back('\n'); ++pos; break;
        case 'r': value.push_back('\r'); ++pos; break;
        case 'f': value.push_back('\f'); ++pos; break;
        case '"': value.push_back('"'); ++pos; break;
        case '\'': value.push_back('\''); ++pos; break;
        case '\\': value.push_back('\\'); ++pos; break;
        case 'u':
        case 'U': appendUtf8(value, readUnicodeEscape(line, pos)); break;
        default: throw LexError{pos - 1, "unknown escape sequence"};
      }
      continue;
    }
    if (c == '\n' || c == '\r') throw LexError{pos, "raw line break in literal"};
    value.push_back(c);
    ++pos;
  }
  if (pos >= line.size()) throw LexError{start, "unterminated literal"};
  ++pos;  // closing '"'
  return value;
}

void appendEscapedIri(std::string& out, std::string_view iri) {
  static const char* hex = "0123456789ABCDEF";
  for (unsigned char c : iri) {
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`' || c == '\\') {
      out += "\\u00";
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
}

void appendEscapedLiteral(std::string& out, std::string_view text) {
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
}

bool isSkippable(std::string_view line) {
  std::size_t pos = 0;
  skipSpaces(line, pos);
  return pos >= line.size() || line[pos] == '#';
}

// Per-task cache in front of the shared dictionary; keeps lock traffic low
// during parallel loads.
class TermCache {
 public:
  explicit TermCache(Dictionary& dict) : dict_(dict) {}

  TermId intern(const Term& term) {
    if (auto it = cache_.find(term); it != cache_.end()) return it->second;
    TermId id = dict_.intern(term);
    if (cache_.size() < 1u << 16) cache_.emplace(term, id);
    return id;
  }

 private:
  Dictionary& dict_;
  std::unordered_map<Term, TermId, TermHash> cache_;
};

Triple parseStatementLine(std::string_view line, TermCache& cache, const ParseOptions& options) {
  std::size_t pos = 0;
  std::array<Term, 3> terms;
  for (int i = 0; i < 3; ++i) {
    skipSpaces(line, pos);
    if (pos >= line.size()) throw LexError{pos, "expected a term"};
    std::size_t termStart = pos;
    terms[i] = lexTerm(line, pos).term;
    if (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '.') {
      throw LexError{pos, "expected whitespace after term"};
    }
    if (i == 1 && !terms[i].isIri()) throw LexError{termStart, "predicate must be an IRI"};
    if (terms[i].isBlank() && !options.blankNodePrefix.empty()) {
      terms[i].lexical = options.blankNodePrefix + terms[i].lexical;
    }
    if (auto problem = validateTerm(terms[i]); !problem.empty()) {
      throw LexError{termStart, problem};
    }
  }
  skipSpaces(line, pos);
  if (pos >= line.size() || line[pos] != '.') throw LexError{pos, "expected '.'"};
  ++pos;
  skipSpaces(line, pos);
  if (pos < line.size() && line[pos] != '#') throw LexError{pos, "trailing characters"};
  return {cache.intern(terms[0]), cache.intern(terms[1]), cache.intern(terms[2])};
}

// Parses complete lines of `text`; `firstLine` is the 1-based number of its
// first line.
ParseResult parseChunk(std::string_view text, std::size_t firstLine, Dictionary& dict,
                       const ParseOptions& options) {
  ParseResult result;
  TermCache cache(dict);
  std::size_t lineNo = firstLine;
  std::size_t begin = 0;
  while (begin < text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!isSkippable(line)) {
      try {
        result.statements.push_back({parseStatementLine(line, cache, options), lineNo});
      } catch (const LexError& e) {
        ParseError error(lineNo, e.column() + 1, e.what());
        if (!options.lenient) throw error;
        ++result.skippedLines;
        if (result.errors.size() < kMaxKeptErrors) result.errors.push_back(error);
      } catch (const InvalidTermError& e) {
        ParseError error(lineNo, 1, e.what());
        if (!options.lenient) throw error;
        ++result.skippedLines;
        if (result.errors.size() < kMaxKeptErrors) result.errors.push_back(error);
      }
    }
    begin = end + 1;
    ++lineNo;
  }
  return result;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

std::string expandKnownPrefix(std::string_view iri) {
  struct Prefix {
    std::string_view prefix;
    std::string_view ns;
  };
  static constexpr Prefix prefixes[] = {{"rdf:", vocab::kRdfNs},
                                        {"rdfs:", vocab::kRdfsNs},
                                        {"owl:", vocab::kOwlNs},
                                        {"xsd:", vocab::kXsdNs}};
  for (const auto& [prefix, ns] : prefixes) {
    if (iri.starts_with(prefix) && !iri.substr(prefix.size()).starts_with("//")) {
      return std::string(ns) + std::string(iri.substr(prefix.size()));
    }
  }
  return std::string(iri);
}

void skipSpaces(std::string_view line, std::size_t& pos) {
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
}

LexedTerm lexTerm(std::string_view line, std::size_t& pos, bool allowVariables) {
  if (pos >= line.size()) throw LexError{pos, "expected a term"};
  char c = line[pos];
  if (c == '<') return {Term::iri(lexIri(line, pos)), false};
  if (c == '_') {
    std::size_t start = pos;
    if (pos + 1 >= line.size() || line[pos + 1] != ':') throw LexError{pos, "expected '_:'"};
    pos += 2;
    std::size_t labelStart = pos;
    while (pos < line.size() && isBlankLabelChar(static_cast<unsigned char>(line[pos]))) ++pos;
    // A trailing '.' terminates the statement rather than the label.
    while (pos > labelStart && line[pos - 1] == '.') --pos;
    if (pos == labelStart) throw LexError{start, "empty blank node label"};
    char first = line[labelStart];
    if (first == '-' || first == '.') throw LexError{labelStart, "invalid blank node label start"};
    return {Term::blank(std::string(line.substr(labelStart, pos - labelStart))), false};
  }
  if (c == '"') {
    std::string value = lexQuoted(line, pos);
    if (pos < line.size() && line[pos] == '@') {
      std::size_t start = ++pos;
      bool first = true;
      while (pos < line.size()) {
        if (isLangChar(line[pos], first)) {
          ++pos;
          first = false;
        } else if (line[pos] == '-' && !first && pos + 1 < line.size() &&
                   std::isalnum(static_cast<unsigned char>(line[pos + 1]))) {
          ++pos;
        } else {
          break;
        }
      }
      if (pos == start) throw LexError{start, "empty language tag"};
      return {Term::langLiteral(std::move(value), std::string(line.substr(start, pos - start))),
              false};
    }
    if (pos + 1 < line.size() && line[pos] == '^' && line[pos + 1] == '^') {
      pos += 2;
      if (pos >= line.size() || line[pos] != '<') throw LexError{pos, "expected datatype IRI"};
      std::string datatype = lexIri(line, pos);
      return {Term::typedLiteral(std::move(value), std::move(datatype)), false};
    }
    return {Term::literal(std::move(value)), false};
  }
  if (c == '?' && allowVariables) {
    std::size_t start = ++pos;
    while (pos < line.size() && isVariableChar(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == start) throw LexError{start, "empty variable name"};
    return {Term::iri(std::string(line.substr(start, pos - start))), true};
  }
  throw LexError{pos, std::string("unexpected character '") + c + "'"};
}

ParseResult parseNTriples(std::string_view text, Dictionary& dict, const ParseOptions& options) {
  return parseChunk(text, 1, dict, options);
}

ParseResult parseNTriples(std::istream& in, Dictionary& dict, const ParseOptions& options) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseNTriples(std::string_view(buffer.str()), dict, options);
}

ParseResult parseNTriplesParallel(std::string_view text, Dictionary& dict,
                                  const ParseOptions& options, std::size_t workers) {
  workers = std::max<std::size_t>(1, workers);
  std::size_t target = std::max<std::size_t>(1, text.size() / (workers * 4));
  std::vector<std::string_view> chunks;
  std::vector<std::size_t> firstLines;
  std::size_t begin = 0;
  std::size_t line = 1;
  while (begin < text.size()) {
    std::size_t end = std::min(text.size(), begin + target);
    if (end < text.size()) {
      std::size_t nl = text.find('\n', end);
      end = nl == std::string_view::npos ? text.size() : nl + 1;
    }
    std::string_view chunk = text.substr(begin, end - begin);
    chunks.push_back(chunk);
    firstLines.push_back(line);
    line += static_cast<std::size_t>(std::count(chunk.begin(), chunk.end(), '\n'));
    begin = end;
  }

  std::vector<ParseResult> parts(chunks.size());
  parallelFor(chunks.size(), workers, [&](std::size_t i) {
    parts[i] = parseChunk(chunks[i], firstLines[i], dict, options);
  });

  ParseResult merged;
  for (auto& part : parts) {
    merged.statements.insert(merged.statements.end(), part.statements.begin(),
                             part.statements.end());
    merged.skippedLines += part.skippedLines;
    for (auto& e : part.errors) {
      if (merged.errors.size() < kMaxKeptErrors) merged.errors.push_back(std::move(e));
    }
  }
  return merged;
}

std::string formatTerm(const Term& term) {
  std::string out;
  switch (term.kind) {
    case TermKind::Iri:
      out.push_back('<');
      appendEscapedIri(out, term.lexical);
      out.push_back('>');
      break;
    case TermKind::BlankNode:
      out = "_:" + term.lexical;
      break;
    case TermKind::Literal:
      out.push_back('"');
      appendEscapedLiteral(out, term.lexical);
      out.push_back('"');
      if (term.datatype) {
        out += "^^<";
        appendEscapedIri(out, *term.datatype);
        out.push_back('>');
      } else if (term.language) {
        out += "@" + *term.language;
      }
      break;
  }
  return out;
}

void serializeNTriples(std::span<const Triple> triples, const Dictionary& dict, std::ostream& out) {
  std::vector<Triple> sorted(triples.begin(), triples.end());
  if (!std::is_sorted(sorted.begin(), sorted.end())) std::sort(sorted.begin(), sorted.end());
  std::string line;
  for (const Triple& t : sorted) {
    line.clear();
    line += formatTerm(dict.resolve(t.s));
    line.push_back(' ');
    line += formatTerm(dict.resolve(t.p));
    line.push_back(' ');
    line += formatTerm(dict.resolve(t.o));
    line += " .\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

std::string serializeNTriples(std::span<const Triple> triples, const Dictionary& dict) {
  std::ostringstream out;
  serializeNTriples(triples, dict, out);
  return out.str();
}

}  // namespace rdfr
