#include "rdfr/snapshot.h"

#include <cstring>
#include <fstream>

#include "binary_io.h"

namespace rdfr {

namespace {

constexpr char kMagic[8] = {'R', 'D', 'F', 'R', 'S', 'N', 'A', 'P'};
constexpr std::uint8_t kCanonicalFlag = 1;
constexpr std::uint8_t kMaterializedFlag = 2;

}  // namespace

void writeSnapshot(std::ostream& out, const Dictionary& dict, const KnowledgeBase& kb,
                   bool canonical) {
  out.write(kMagic, sizeof kMagic);
  binio::writeU32(out, kSnapshotVersion);
  std::uint8_t flags = 0;
  if (canonical) flags |= kCanonicalFlag;
  if (kb.materialized()) flags |= kMaterializedFlag;
  binio::writeU8(out, flags);
  dict.writeBinary(out);
  binio::writeU64(out, kb.triples().size());
  for (const Triple& t : kb.triples()) {
    binio::writeU64(out, raw(t.s));
    binio::writeU64(out, raw(t.p));
    binio::writeU64(out, raw(t.o));
  }
  auto assignments = kb.equivalence().assignments();
  binio::writeU64(out, assignments.size());
  for (const auto& [member, rep] : assignments) {
    binio::writeU64(out, raw(member));
    binio::writeU64(out, raw(rep));
  }
}

void writeSnapshotFile(const std::string& path, const Dictionary& dict, const KnowledgeBase& kb,
                       bool canonical) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("cannot write snapshot " + path);
  writeSnapshot(out, dict, kb, canonical);
  out.close();
  if (!out) throw SnapshotError("failed writing snapshot " + path);
}

Snapshot readSnapshot(std::istream& in) {
  try {
    char magic[sizeof kMagic];
    binio::readExact(in, magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw SnapshotError("not a snapshot file");
    std::uint32_t version = binio::readU32(in);
    if (version != kSnapshotVersion) {
      throw SnapshotError("unsupported snapshot version " + std::to_string(version));
    }
    std::uint8_t flags = binio::readU8(in);
    Snapshot snap;
    snap.canonical = flags & kCanonicalFlag;
    snap.dictionary = Dictionary::readBinary(in);

    auto checkId = [&](std::uint64_t id) {
      if (!snap.dictionary.contains(termId(id))) {
        throw SnapshotError("snapshot references unknown term id " + std::to_string(id));
      }
      return termId(id);
    };
    std::uint64_t count = binio::readU64(in);
    std::vector<Triple> triples;
    triples.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
    for (std::uint64_t i = 0; i < count; ++i) {
      TermId s = checkId(binio::readU64(in));
      TermId p = checkId(binio::readU64(in));
      TermId o = checkId(binio::readU64(in));
      triples.push_back({s, p, o});
    }
    snap.kb = KnowledgeBase(triples);
    std::uint64_t assignments = binio::readU64(in);
    EquivalenceMap& eq = snap.kb.equivalence();
    for (std::uint64_t i = 0; i < assignments; ++i) {
      TermId member = checkId(binio::readU64(in));
      TermId rep = checkId(binio::readU64(in));
      eq.unite(member, rep);
    }
    eq.finalize();
    snap.kb.setMaterialized(flags & kMaterializedFlag);
    return snap;
  } catch (const binio::FormatError& e) {
    throw SnapshotError(std::string("corrupt snapshot: ") + e.what());
  }
}

Snapshot readSnapshotFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open snapshot " + path);
  return readSnapshot(in);
}

}  // namespace rdfr
