#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rdfr/dictionary.h"
#include "rdfr/ntriples.h"
#include "rdfr/triple.h"

namespace rdfr {

struct LoadOptions {
  bool lenient = false;
  std::size_t workers = 1;
};

struct LoadedData {
  Dictionary dictionary;  // sealed
  std::vector<Triple> triples;  // sorted, duplicate free, canonical ids
  std::size_t skippedLines = 0;
  std::vector<ParseError> errors;
};

// Parses every path ("-" reads standard input), giving each file its own
// blank node scope, then seals the dictionary and rewrites all triples to
// canonical ids. The result does not depend on `workers`.
LoadedData loadNTriplesFiles(const std::vector<std::string>& paths, const LoadOptions& options);

// Same, over in-memory documents (one blank node scope per document).
LoadedData loadNTriplesDocuments(const std::vector<std::string>& documents,
                                 const LoadOptions& options);

// Rewrites ids through a seal() mapping.
void remapTriples(std::vector<Triple>& triples, const std::vector<TermId>& remap);

}  // namespace rdfr
