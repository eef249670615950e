#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "rdfr/dictionary.h"
#include "rdfr/knowledge_base.h"

namespace rdfr {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout (integers little endian):
//   "RDFRSNAP" | u32 version | u8 flags (1 = canonical, 2 = materialized)
//   dictionary dump
//   u64 triple count | count x (u64 s, u64 p, u64 o), SPO order
//   u64 assignment count | count x (u64 member, u64 representative)
struct Snapshot {
  Dictionary dictionary;
  KnowledgeBase kb;
  bool canonical = false;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

void writeSnapshot(std::ostream& out, const Dictionary& dict, const KnowledgeBase& kb,
                   bool canonical);
void writeSnapshotFile(const std::string& path, const Dictionary& dict, const KnowledgeBase& kb,
                       bool canonical);

Snapshot readSnapshot(std::istream& in);
Snapshot readSnapshotFile(const std::string& path);

}  // namespace rdfr
