#include "rdfr/dictionary.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>

#include "binary_io.h"

namespace rdfr {

namespace {

const std::array<Term, vocab::kReservedCount>& reservedTable() {
  static const std::array<Term, vocab::kReservedCount> table = {
      Term::iri(std::string(vocab::kTypeIri)),
      Term::iri(std::string(vocab::kSubClassOfIri)),
      Term::iri(std::string(vocab::kSubPropertyOfIri)),
      Term::iri(std::string(vocab::kSameAsIri)),
      Term::iri(std::string(vocab::kSymmetricPropertyIri)),
  };
  return table;
}

// Snapshot kind tags. Literal annotations get their own tag so the record
// stays a flat (id, kind, lexical) triple plus at most one extra string.
enum class RecordKind : std::uint8_t {
  Iri = 0,
  BlankNode = 1,
  PlainLiteral = 2,
  TypedLiteral = 3,
  LangLiteral = 4,
};

RecordKind recordKindOf(const Term& t) {
  switch (t.kind) {
    case TermKind::Iri:
      return RecordKind::Iri;
    case TermKind::BlankNode:
      return RecordKind::BlankNode;
    case TermKind::Literal:
      if (t.datatype) return RecordKind::TypedLiteral;
      if (t.language) return RecordKind::LangLiteral;
      return RecordKind::PlainLiteral;
  }
  return RecordKind::Iri;
}

}  // namespace

std::string validateTerm(const Term& term) {
  if (term.kind != TermKind::Literal && (term.datatype || term.language)) {
    return "datatype or language tag on a non-literal term";
  }
  if (term.datatype && term.language) {
    return "literal carries both a datatype and a language tag";
  }
  if (term.kind == TermKind::Iri || term.kind == TermKind::BlankNode) {
    if (term.lexical.empty()) {
      return term.kind == TermKind::Iri ? "empty IRI" : "empty blank node label";
    }
    for (std::size_t i = 0; i < term.lexical.size(); ++i) {
      if (std::isspace(static_cast<unsigned char>(term.lexical[i]))) {
        return "whitespace at offset " + std::to_string(i);
      }
    }
  }
  if (term.datatype && term.datatype->empty()) return "empty datatype IRI";
  if (term.language && term.language->empty()) return "empty language tag";
  return {};
}

std::size_t TermHash::operator()(const Term& term) const noexcept {
  std::size_t h = std::hash<std::string>{}(term.lexical);
  h ^= static_cast<std::size_t>(term.kind) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  if (term.datatype) h ^= std::hash<std::string>{}(*term.datatype) * 31;
  if (term.language) h ^= std::hash<std::string>{}(*term.language) * 131;
  return h;
}

UnknownTermError::UnknownTermError(TermId id)
    : std::out_of_range("unknown term id " + std::to_string(raw(id))), id_(id) {}

const Term& reservedTerm(TermId id) {
  if (!vocab::isReserved(id)) throw UnknownTermError(id);
  return reservedTable()[raw(id) - 1];
}

Dictionary::Dictionary() : mutex_(std::make_unique<std::shared_mutex>()) {
  for (std::uint64_t i = 1; i <= vocab::kReservedCount; ++i) {
    ids_.emplace(reservedTable()[i - 1], termId(i));
  }
}

Dictionary::Dictionary(Dictionary&& other) noexcept
    : mutex_(std::move(other.mutex_)),
      terms_(std::move(other.terms_)),
      ids_(std::move(other.ids_)),
      sealed_(other.sealed_) {
  other.mutex_ = std::make_unique<std::shared_mutex>();
}

Dictionary& Dictionary::operator=(Dictionary&& other) noexcept {
  if (this != &other) {
    mutex_ = std::move(other.mutex_);
    terms_ = std::move(other.terms_);
    ids_ = std::move(other.ids_);
    sealed_ = other.sealed_;
    other.mutex_ = std::make_unique<std::shared_mutex>();
  }
  return *this;
}

TermId Dictionary::intern(const Term& term) {
  {
    std::shared_lock lock(*mutex_);
    if (auto it = ids_.find(term); it != ids_.end()) return it->second;
  }
  if (auto problem = validateTerm(term); !problem.empty()) {
    throw InvalidTermError("malformed term '" + term.lexical + "': " + problem);
  }
  std::unique_lock lock(*mutex_);
  return internLocked(term);
}

TermId Dictionary::internLocked(const Term& term) {
  if (auto it = ids_.find(term); it != ids_.end()) return it->second;
  if (sealed_) {
    throw std::logic_error("cannot intern new term '" + term.lexical +
                           "' into a sealed dictionary");
  }
  TermId id = termId(kFirstDataId + terms_.size());
  terms_.push_back(term);
  ids_.emplace(term, id);
  return id;
}

std::optional<TermId> Dictionary::find(const Term& term) const {
  std::shared_lock lock(*mutex_);
  if (auto it = ids_.find(term); it != ids_.end()) return it->second;
  return std::nullopt;
}

bool Dictionary::contains(TermId id) const {
  if (vocab::isReserved(id)) return true;
  std::shared_lock lock(*mutex_);
  return raw(id) >= kFirstDataId && raw(id) - kFirstDataId < terms_.size();
}

const Term& Dictionary::resolve(TermId id) const {
  if (vocab::isReserved(id)) return reservedTerm(id);
  std::shared_lock lock(*mutex_);
  if (raw(id) < kFirstDataId || raw(id) - kFirstDataId >= terms_.size()) {
    throw UnknownTermError(id);
  }
  return terms_[raw(id) - kFirstDataId];
}

std::vector<TermId> Dictionary::seal() {
  std::unique_lock lock(*mutex_);
  std::vector<std::size_t> order(terms_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return terms_[a] < terms_[b]; });

  std::vector<TermId> remap(kFirstDataId + terms_.size());
  for (std::uint64_t i = 0; i < kFirstDataId; ++i) remap[i] = termId(i);
  std::deque<Term> sorted;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    remap[kFirstDataId + order[rank]] = termId(kFirstDataId + rank);
    sorted.push_back(std::move(terms_[order[rank]]));
  }
  terms_ = std::move(sorted);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    ids_[terms_[i]] = termId(kFirstDataId + i);
  }
  sealed_ = true;
  return remap;
}

std::size_t Dictionary::dataTermCount() const {
  std::shared_lock lock(*mutex_);
  return terms_.size();
}

TermId Dictionary::maxId() const {
  std::shared_lock lock(*mutex_);
  if (terms_.empty()) return termId(vocab::kReservedCount);
  return termId(kFirstDataId + terms_.size() - 1);
}

void Dictionary::writeBinary(std::ostream& out) const {
  std::shared_lock lock(*mutex_);
  binio::writeU64(out, terms_.size());
  binio::writeU8(out, sealed_ ? 1 : 0);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& t = terms_[i];
    RecordKind kind = recordKindOf(t);
    binio::writeU64(out, kFirstDataId + i);
    binio::writeU8(out, static_cast<std::uint8_t>(kind));
    binio::writeString(out, t.lexical);
    if (kind == RecordKind::TypedLiteral) binio::writeString(out, *t.datatype);
    if (kind == RecordKind::LangLiteral) binio::writeString(out, *t.language);
  }
}

Dictionary Dictionary::readBinary(std::istream& in) {
  Dictionary dict;
  std::uint64_t count = binio::readU64(in);
  bool sealed = binio::readU8(in) != 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t id = binio::readU64(in);
    if (id != kFirstDataId + i) {
      throw binio::FormatError("dictionary record out of order at id " + std::to_string(id));
    }
    auto kind = static_cast<RecordKind>(binio::readU8(in));
    Term t;
    t.lexical = binio::readString(in);
    switch (kind) {
      case RecordKind::Iri:
        t.kind = TermKind::Iri;
        break;
      case RecordKind::BlankNode:
        t.kind = TermKind::BlankNode;
        break;
      case RecordKind::PlainLiteral:
        t.kind = TermKind::Literal;
        break;
      case RecordKind::TypedLiteral:
        t.kind = TermKind::Literal;
        t.datatype = binio::readString(in);
        break;
      case RecordKind::LangLiteral:
        t.kind = TermKind::Literal;
        t.language = binio::readString(in);
        break;
      default:
        throw binio::FormatError("unknown term kind tag " +
                                 std::to_string(static_cast<int>(kind)));
    }
    dict.ids_.emplace(t, termId(id));
    dict.terms_.push_back(std::move(t));
  }
  dict.sealed_ = sealed;
  return dict;
}

}  // namespace rdfr
