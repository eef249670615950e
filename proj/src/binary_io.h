#pragma once

// Little-endian primitives shared by the dictionary dump and snapshot files.

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rdfr::binio {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void writeU8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

inline void writeU32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

inline void writeU64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

inline void writeString(std::ostream& out, const std::string& s) {
  if (s.size() > UINT32_MAX) throw FormatError("string too long for a 32-bit length prefix");
  writeU32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void readExact(std::istream& in, char* buf, std::size_t n) {
  in.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError("unexpected end of input");
}

inline std::uint8_t readU8(std::istream& in) {
  char c;
  readExact(in, &c, 1);
  return static_cast<std::uint8_t>(c);
}

inline std::uint32_t readU32(std::istream& in) {
  unsigned char buf[4];
  readExact(in, reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

inline std::uint64_t readU64(std::istream& in) {
  unsigned char buf[8];
  readExact(in, reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline std::string readString(std::istream& in) {
  std::uint32_t n = readU32(in);
  std::string s(n, '\0');
  if (n > 0) readExact(in, s.data(), n);
  return s;
}

}  // namespace rdfr::binio
