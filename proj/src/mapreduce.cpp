#include "rdfr/mapreduce.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <queue>

#include <unistd.h>

#include "binary_io.h"
#include "rdfr/parallel.h"

namespace rdfr::mr {

namespace fs = std::filesystem;

std::size_t partitionOf(std::string_view key, std::size_t partitions) {
  if (partitions <= 1) return 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return static_cast<std::size_t>(h % partitions);
}

namespace {

constexpr std::size_t kRecordOverhead = 2 * sizeof(std::string);

std::size_t recordBytes(const KeyValue& kv) {
  return kv.key.size() + kv.value.size() + kRecordOverhead;
}

std::string printable(std::string_view bytes) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  std::size_t n = std::min<std::size_t>(bytes.size(), 48);
  for (std::size_t i = 0; i < n; ++i) {
    auto c = static_cast<unsigned char>(bytes[i]);
    out.push_back(hex[c >> 4]);
    out.push_back(hex[c & 15]);
  }
  if (n < bytes.size()) out += "...";
  return out.empty() ? "<empty>" : out;
}

// A sorted run of one partition, in memory or spilled to a file.
class RunReader {
 public:
  virtual ~RunReader() = default;
  // Current record, valid while !done().
  virtual const KeyValue& current() const = 0;
  virtual bool done() const = 0;
  virtual void advance() = 0;
};

class MemoryRun : public RunReader {
 public:
  explicit MemoryRun(const std::vector<KeyValue>& records) : records_(records) {}
  const KeyValue& current() const override { return records_[index_]; }
  bool done() const override { return index_ >= records_.size(); }
  void advance() override { ++index_; }

 private:
  const std::vector<KeyValue>& records_;
  std::size_t index_ = 0;
};

class FileRun : public RunReader {
 public:
  explicit FileRun(const fs::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot reopen shuffle run " + path.string());
    advance();
  }
  const KeyValue& current() const override { return record_; }
  bool done() const override { return done_; }
  void advance() override {
    if (in_.peek() == std::char_traits<char>::eof()) {
      done_ = true;
      return;
    }
    record_.key = binio::readString(in_);
    record_.value = binio::readString(in_);
  }

 private:
  std::ifstream in_;
  KeyValue record_;
  bool done_ = false;
};

// Removes spilled run files when the job ends, however it ends.
class SpillDirectory {
 public:
  explicit SpillDirectory(const std::string& tempDir, const std::string& jobName) {
    static std::atomic<std::uint64_t> counter{0};
    fs::path base = tempDir.empty() ? fs::temp_directory_path() : fs::path(tempDir);
    std::string safeName;
    for (char c : jobName) safeName.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    path_ = base / ("rdfr-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                    safeName);
  }
  ~SpillDirectory() {
    std::error_code ec;
    if (created_) fs::remove_all(path_, ec);
  }
  SpillDirectory(const SpillDirectory&) = delete;
  SpillDirectory& operator=(const SpillDirectory&) = delete;

  fs::path newRun() {
    std::lock_guard lock(mutex_);
    if (!created_) {
      fs::create_directories(path_);
      created_ = true;
    }
    return path_ / ("run-" + std::to_string(next_++));
  }

 private:
  fs::path path_;
  std::mutex mutex_;
  bool created_ = false;
  std::size_t next_ = 0;
};

struct PartitionRuns {
  std::mutex mutex;
  std::vector<std::vector<KeyValue>> memory;
  std::vector<fs::path> files;
};

class BufferEmitter : public Emitter {
 public:
  BufferEmitter(std::size_t partitions) : buffers_(partitions) {}
  void emit(std::string key, std::string value) override {
    std::size_t part = partitionOf(key, buffers_.size());
    KeyValue kv{std::move(key), std::move(value)};
    bytes_ += recordBytes(kv);
    ++count_;
    buffers_[part].push_back(std::move(kv));
  }
  std::vector<std::vector<KeyValue>>& buffers() { return buffers_; }
  std::size_t bytes() const { return bytes_; }
  std::size_t count() const { return count_; }
  void resetBytes() { bytes_ = 0; }

 private:
  std::vector<std::vector<KeyValue>> buffers_;
  std::size_t bytes_ = 0;
  std::size_t count_ = 0;
};

class VectorEmitter : public Emitter {
 public:
  void emit(std::string key, std::string value) override {
    out.push_back({std::move(key), std::move(value)});
  }
  std::vector<KeyValue> out;
};

class Shuffle {
 public:
  Shuffle(std::size_t partitions, const Config& config, SpillDirectory& spill)
      : partitions_(partitions), config_(config), spill_(spill), runs_(partitions) {}

  // Sorts and hands over the emitter's buffers, spilling to disk when the
  // in-memory total would exceed the budget.
  void flush(BufferEmitter& emitter, bool finalFlush) {
    std::size_t share = std::max<std::size_t>(1, config_.shuffleBudgetBytes /
                                                     std::max<std::size_t>(1, config_.workers));
    if (!finalFlush && emitter.bytes() <= share) return;
    std::size_t bytes = emitter.bytes();
    bool keep = finalFlush && reserve(bytes);
    for (std::size_t part = 0; part < partitions_; ++part) {
      auto& buffer = emitter.buffers()[part];
      if (buffer.empty()) continue;
      std::sort(buffer.begin(), buffer.end());
      if (keep) {
        std::lock_guard lock(runs_[part].mutex);
        runs_[part].memory.push_back(std::move(buffer));
      } else {
        fs::path path = spill_.newRun();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot create shuffle run " + path.string());
        std::size_t written = 0;
        for (const KeyValue& kv : buffer) {
          binio::writeString(out, kv.key);
          binio::writeString(out, kv.value);
          written += kv.key.size() + kv.value.size() + 8;
        }
        out.close();
        if (!out) throw std::runtime_error("failed writing shuffle run " + path.string());
        spilledRuns_ += 1;
        spilledBytes_ += written;
        std::lock_guard lock(runs_[part].mutex);
        runs_[part].files.push_back(path);
      }
      buffer = {};
    }
    emitter.resetBytes();
  }

  PartitionRuns& partition(std::size_t part) { return runs_[part]; }
  std::size_t spilledRuns() const { return spilledRuns_; }
  std::size_t spilledBytes() const { return spilledBytes_; }

 private:
  bool reserve(std::size_t bytes) {
    std::size_t current = inMemory_.load();
    while (current + bytes <= config_.shuffleBudgetBytes) {
      if (inMemory_.compare_exchange_weak(current, current + bytes)) return true;
    }
    return false;
  }

  std::size_t partitions_;
  const Config& config_;
  SpillDirectory& spill_;
  std::vector<PartitionRuns> runs_;
  std::atomic<std::size_t> inMemory_{0};
  std::atomic<std::size_t> spilledRuns_{0};
  std::atomic<std::size_t> spilledBytes_{0};
};

// K-way merge over the runs of one partition in (key, value) order.
class Merger {
 public:
  explicit Merger(std::vector<std::unique_ptr<RunReader>> runs) : runs_(std::move(runs)) {
    for (std::size_t i = 0; i < runs_.size(); ++i) {
      if (!runs_[i]->done()) heap_.push(i);
    }
  }
  bool done() const { return heap_.empty(); }
  const KeyValue& top() const { return runs_[heap_.top()]->current(); }
  void pop() {
    std::size_t i = heap_.top();
    heap_.pop();
    runs_[i]->advance();
    if (!runs_[i]->done()) heap_.push(i);
  }

 private:
  struct Greater {
    const std::vector<std::unique_ptr<RunReader>>* runs;
    bool operator()(std::size_t a, std::size_t b) const {
      const KeyValue& x = (*runs)[a]->current();
      const KeyValue& y = (*runs)[b]->current();
      if (x != y) return y < x;
      return b < a;
    }
  };
  std::vector<std::unique_ptr<RunReader>> runs_;
  std::priority_queue<std::size_t, std::vector<std::size_t>, Greater> heap_{Greater{&runs_}};
};

class GroupStream : public ValueStream {
 public:
  GroupStream(Merger& merger, std::string key) : merger_(merger), key_(std::move(key)) {}
  bool next(std::string_view& value) override {
    if (pendingPop_) {
      merger_.pop();
      pendingPop_ = false;
    }
    if (merger_.done() || merger_.top().key != key_) return false;
    value = merger_.top().value;
    pendingPop_ = true;
    return true;
  }
  // Skips whatever the reducer left unread.
  void drain() {
    std::string_view ignored;
    while (next(ignored)) {
    }
  }

 private:
  Merger& merger_;
  std::string key_;
  bool pendingPop_ = false;
};

}  // namespace

std::vector<KeyValue> runJobOnSplits(const JobSpec& spec, std::size_t splits,
                                     const SplitMapper& mapSplit, const Config& config,
                                     JobCounters* counters) {
  if (!spec.reducer) throw std::invalid_argument("job " + spec.name + " has no reducer");
  const std::size_t partitions = std::max<std::size_t>(1, spec.partitions);
  const std::size_t workers = std::max<std::size_t>(1, config.workers);
  SpillDirectory spill(config.tempDir, spec.name);
  Shuffle shuffle(partitions, config, spill);
  std::atomic<std::size_t> mapOutput{0};

  parallelFor(splits, workers, [&](std::size_t split) {
    class SpillingEmitter : public BufferEmitter {
     public:
      SpillingEmitter(std::size_t partitions, Shuffle& shuffle)
          : BufferEmitter(partitions), shuffle_(shuffle) {}
      void emit(std::string key, std::string value) override {
        BufferEmitter::emit(std::move(key), std::move(value));
        shuffle_.flush(*this, false);
      }

     private:
      Shuffle& shuffle_;
    };
    SpillingEmitter emitter(partitions, shuffle);
    mapSplit(split, emitter);
    shuffle.flush(emitter, true);
    mapOutput += emitter.count();
  });

  // Shuffle barrier passed: every partition's runs are complete.
  std::vector<std::vector<KeyValue>> reduced(partitions);
  std::vector<std::size_t> groups(partitions, 0);
  parallelFor(partitions, workers, [&](std::size_t part) {
    PartitionRuns& runs = shuffle.partition(part);
    std::vector<std::unique_ptr<RunReader>> readers;
    for (const auto& records : runs.memory) readers.push_back(std::make_unique<MemoryRun>(records));
    for (const auto& path : runs.files) readers.push_back(std::make_unique<FileRun>(path));
    Merger merger(std::move(readers));
    VectorEmitter out;
    while (!merger.done()) {
      std::string key = merger.top().key;
      GroupStream values(merger, key);
      try {
        spec.reducer(key, values, out);
      } catch (const std::exception& e) {
        throw JobError(spec.name + ": reducer failed on key " + printable(key) + ": " + e.what());
      }
      values.drain();
      ++groups[part];
    }
    reduced[part] = std::move(out.out);
  });

  std::vector<KeyValue> output;
  std::size_t total = 0;
  for (const auto& part : reduced) total += part.size();
  output.reserve(total);
  for (auto& part : reduced) {
    std::move(part.begin(), part.end(), std::back_inserter(output));
    part = {};
  }
  std::sort(output.begin(), output.end());

  if (counters) {
    counters->mapOutput = mapOutput.load();
    counters->reduceOutput = output.size();
    counters->reduceGroups = 0;
    for (std::size_t g : groups) counters->reduceGroups += g;
    counters->spilledRuns = shuffle.spilledRuns();
    counters->spilledBytes = shuffle.spilledBytes();
  }
  return output;
}

std::vector<KeyValue> runJob(const JobSpec& spec, std::span<const KeyValue> input,
                             const Config& config, JobCounters* counters) {
  if (!spec.mapper) throw std::invalid_argument("job " + spec.name + " has no mapper");
  const std::size_t workers = std::max<std::size_t>(1, config.workers);
  const std::size_t splits = input.empty() ? 0 : std::min(input.size(), workers * 4);
  auto mapSplit = [&](std::size_t split, Emitter& out) {
    std::size_t begin = input.size() * split / splits;
    std::size_t end = input.size() * (split + 1) / splits;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        spec.mapper(input[i], out);
      } catch (const std::exception& e) {
        throw JobError(spec.name + ": mapper failed on record " + std::to_string(i) + " (key " +
                       printable(input[i].key) + "): " + e.what());
      }
    }
  };
  auto result = runJobOnSplits(spec, splits, mapSplit, config, counters);
  if (counters) counters->mapInput = input.size();
  return result;
}

}  // namespace rdfr::mr
