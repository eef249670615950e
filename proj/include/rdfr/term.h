#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace rdfr {

// Dense identifier of an interned term. Ids below kFirstDataId are reserved
// for the schema vocabulary the built-in rules are written against.
enum class TermId : std::uint64_t {};

constexpr std::uint64_t raw(TermId id) { return static_cast<std::uint64_t>(id); }
constexpr TermId termId(std::uint64_t value) { return static_cast<TermId>(value); }

namespace vocab {

inline constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfsNs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwlNs = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema#";

inline constexpr std::string_view kTypeIri = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kSubClassOfIri = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr std::string_view kSubPropertyOfIri =
    "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
inline constexpr std::string_view kSameAsIri = "http://www.w3.org/2002/07/owl#sameAs";
inline constexpr std::string_view kSymmetricPropertyIri =
    "http://www.w3.org/2002/07/owl#SymmetricProperty";

// Fixed reserved assignment. The order is part of the snapshot format.
inline constexpr TermId kType = termId(1);
inline constexpr TermId kSubClassOf = termId(2);
inline constexpr TermId kSubPropertyOf = termId(3);
inline constexpr TermId kSameAs = termId(4);
inline constexpr TermId kSymmetricProperty = termId(5);

inline constexpr std::uint64_t kReservedCount = 5;

constexpr bool isReserved(TermId id) { return raw(id) >= 1 && raw(id) <= kReservedCount; }

}  // namespace vocab

// First id handed out to non-vocabulary terms. 6..15 stay unassigned so the
// reserved table can grow without renumbering existing snapshots.
inline constexpr std::uint64_t kFirstDataId = 16;

enum class TermKind : std::uint8_t { Iri = 0, BlankNode = 1, Literal = 2 };

struct Term {
  TermKind kind = TermKind::Iri;
  std::string lexical;
  std::optional<std::string> datatype;
  std::optional<std::string> language;

  static Term iri(std::string value) { return {TermKind::Iri, std::move(value), {}, {}}; }
  static Term blank(std::string label) { return {TermKind::BlankNode, std::move(label), {}, {}}; }
  static Term literal(std::string value) { return {TermKind::Literal, std::move(value), {}, {}}; }
  static Term typedLiteral(std::string value, std::string datatype) {
    return {TermKind::Literal, std::move(value), std::move(datatype), {}};
  }
  static Term langLiteral(std::string value, std::string language) {
    return {TermKind::Literal, std::move(value), {}, std::move(language)};
  }

  bool isIri() const { return kind == TermKind::Iri; }
  bool isLiteral() const { return kind == TermKind::Literal; }
  bool isBlank() const { return kind == TermKind::BlankNode; }

  // Lexicographic order on (kind, lexical, datatype, language); this is the
  // canonical order used when a dictionary is sealed.
  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;
};

// Empty string when the term satisfies the structural invariants, otherwise a
// description of the violation.
std::string validateTerm(const Term& term);

struct TermHash {
  std::size_t operator()(const Term& term) const noexcept;
};

}  // namespace rdfr
