#include "rdfr/loader.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace rdfr {

namespace {

std::string readAll(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

void remapTriples(std::vector<Triple>& triples, const std::vector<TermId>& remap) {
  auto map = [&](TermId id) { return remap.at(raw(id)); };
  for (Triple& t : triples) t = {map(t.s), map(t.p), map(t.o)};
}

namespace {

LoadedData loadDocuments(const std::vector<std::string>& documents,
                         const std::vector<std::string>& names, const LoadOptions& options) {
  LoadedData data;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    ParseOptions parse;
    parse.lenient = options.lenient;
    parse.blankNodePrefix = "f" + std::to_string(i) + "_";
    ParseResult result;
    try {
      result = parseNTriplesParallel(documents[i], data.dictionary, parse, options.workers);
    } catch (const ParseError& e) {
      if (names.empty()) throw;
      throw ParseError(e.line(), e.column(), names[i] + ": " + e.detail());
    }
    data.skippedLines += result.skippedLines;
    for (auto& e : result.errors) data.errors.push_back(std::move(e));
    data.triples.reserve(data.triples.size() + result.statements.size());
    for (const auto& st : result.statements) data.triples.push_back(st.triple);
  }
  remapTriples(data.triples, data.dictionary.seal());
  std::sort(data.triples.begin(), data.triples.end());
  data.triples.erase(std::unique(data.triples.begin(), data.triples.end()), data.triples.end());
  return data;
}

}  // namespace

LoadedData loadNTriplesDocuments(const std::vector<std::string>& documents,
                                 const LoadOptions& options) {
  return loadDocuments(documents, {}, options);
}

LoadedData loadNTriplesFiles(const std::vector<std::string>& paths, const LoadOptions& options) {
  std::vector<std::string> documents;
  documents.reserve(paths.size());
  for (const auto& path : paths) documents.push_back(readAll(path));
  return loadDocuments(documents, paths, options);
}

}  // namespace rdfr
