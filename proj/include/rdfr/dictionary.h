#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rdfr/term.h"

namespace rdfr {

class InvalidTermError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownTermError : public std::out_of_range {
 public:
  explicit UnknownTermError(TermId id);
  TermId id() const { return id_; }

 private:
  TermId id_;
};

// Bidirectional Term <-> TermId mapping.
//
// Before seal() ids are provisional and depend on interning order; interning
// is safe from many threads. seal() renumbers all data terms by canonical
// term order and returns the old -> new mapping so callers can rewrite the
// triples they already hold. A sealed dictionary only answers lookups.
class Dictionary {
 public:
  Dictionary();

  Dictionary(const Dictionary&) = delete;
  Dictionary& operator=(const Dictionary&) = delete;
  Dictionary(Dictionary&&) noexcept;
  Dictionary& operator=(Dictionary&&) noexcept;

  TermId intern(const Term& term);
  std::optional<TermId> find(const Term& term) const;
  const Term& resolve(TermId id) const;
  bool contains(TermId id) const;

  // Indexed by the raw provisional id; entries below kFirstDataId map to
  // themselves.
  std::vector<TermId> seal();
  bool sealed() const { return sealed_; }

  // Number of non-reserved terms.
  std::size_t dataTermCount() const;
  // Largest assigned id, or the last reserved id when no data term exists.
  TermId maxId() const;

  // Sorted (id, kind, lexical[, annotation]) records; see README for layout.
  void writeBinary(std::ostream& out) const;
  static Dictionary readBinary(std::istream& in);

 private:
  TermId internLocked(const Term& term);

  mutable std::unique_ptr<std::shared_mutex> mutex_;
  std::deque<Term> terms_;  // data terms, index = id - kFirstDataId; stable references
  std::unordered_map<Term, TermId, TermHash> ids_;
  bool sealed_ = false;
};

// Shared reserved table (ids 1..kReservedCount).
const Term& reservedTerm(TermId id);

}  // namespace rdfr
