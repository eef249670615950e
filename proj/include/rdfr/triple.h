#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "rdfr/term.h"

namespace rdfr {

struct Triple {
  TermId s{};
  TermId p{};
  TermId o{};

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = raw(t.s) * 0x9e3779b97f4a7c15ULL;
    h ^= raw(t.p) + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    h ^= raw(t.o) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

// TBox membership: the closed predicate list the built-in rules read
// schema knowledge from. Everything else is ABox.
constexpr bool isTBoxTriple(const Triple& t) {
  return t.p == vocab::kSubClassOf || t.p == vocab::kSubPropertyOf ||
         (t.p == vocab::kType && t.o == vocab::kSymmetricProperty);
}

// Fixed-width big-endian encoding; byte order equals (s, p, o) order.
inline constexpr std::size_t kEncodedTripleSize = 24;

inline void appendBigEndian(std::string& out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t readBigEndian(std::string_view bytes, std::size_t offset = 0) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    v = (v << 8) | static_cast<unsigned char>(bytes[offset + i]);
  }
  return v;
}

inline std::string encodeTriple(const Triple& t) {
  std::string out;
  out.reserve(kEncodedTripleSize);
  appendBigEndian(out, raw(t.s));
  appendBigEndian(out, raw(t.p));
  appendBigEndian(out, raw(t.o));
  return out;
}

inline Triple decodeTriple(std::string_view bytes, std::size_t offset = 0) {
  return {termId(readBigEndian(bytes, offset)), termId(readBigEndian(bytes, offset + 8)),
          termId(readBigEndian(bytes, offset + 16))};
}

}  // namespace rdfr
