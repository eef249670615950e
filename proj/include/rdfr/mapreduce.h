#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rdfr::mr {

struct KeyValue {
  std::string key;
  std::string value;

  friend auto operator<=>(const KeyValue&, const KeyValue&) = default;
  friend bool operator==(const KeyValue&, const KeyValue&) = default;
};

class Emitter {
 public:
  virtual ~Emitter() = default;
  virtual void emit(std::string key, std::string value) = 0;
};

// Values of one key, in (value) order, pulled on demand from the merged
// shuffle runs.
class ValueStream {
 public:
  virtual ~ValueStream() = default;
  // Next value, or false once the key is exhausted. The view stays valid
  // until the following call.
  virtual bool next(std::string_view& value) = 0;
};

using Mapper = std::function<void(const KeyValue& input, Emitter& out)>;
using Reducer = std::function<void(std::string_view key, ValueStream& values, Emitter& out)>;

struct JobSpec {
  std::string name = "job";
  Mapper mapper;
  Reducer reducer;
  std::size_t partitions = 1;
};

struct Config {
  std::size_t workers = 1;
  // Shuffle data kept in memory before sorted runs are spilled to disk.
  std::size_t shuffleBudgetBytes = std::size_t{256} << 20;
  // Empty selects the system temporary directory.
  std::string tempDir;
};

struct JobCounters {
  std::size_t mapInput = 0;
  std::size_t mapOutput = 0;
  std::size_t reduceGroups = 0;
  std::size_t reduceOutput = 0;
  std::size_t spilledRuns = 0;
  std::size_t spilledBytes = 0;
};

// A mapper or reducer threw; the message names the job and the record.
class JobError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::size_t partitionOf(std::string_view key, std::size_t partitions);

// Map every input pair, group emitted pairs by key, reduce once per key.
// Output is sorted by (key, value): it depends only on the input multiset,
// never on partition or worker count.
std::vector<KeyValue> runJob(const JobSpec& spec, std::span<const KeyValue> input,
                             const Config& config = {}, JobCounters* counters = nullptr);

// Same contract for callers whose records are not KeyValue pairs:
// `mapSplit(i, out)` maps input split i (spec.mapper is not used).
using SplitMapper = std::function<void(std::size_t split, Emitter& out)>;
std::vector<KeyValue> runJobOnSplits(const JobSpec& spec, std::size_t splits,
                                     const SplitMapper& mapSplit, const Config& config = {},
                                     JobCounters* counters = nullptr);

}  // namespace rdfr::mr
