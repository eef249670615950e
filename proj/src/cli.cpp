#include "rdfr/cli.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdfr/loader.h"
#include "rdfr/materializer.h"
#include "rdfr/ntriples.h"
#include "rdfr/rule_parser.h"
#include "rdfr/snapshot.h"

namespace rdfr {

namespace {

std::size_t parsePositive(const std::string& name, const std::string& text) {
  std::size_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value == 0) {
    throw ConfigError(name + " must be a positive integer, got '" + text + "'");
  }
  return value;
}

bool parseFlag(const std::string& name, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError(name + " must be a boolean, got '" + text + "'");
}

QueryMode parseMode(const std::string& name, const std::string& text) {
  auto mode = parseQueryMode(text);
  if (!mode) throw ConfigError(name + " must be materialized, backward or hybrid, got '" + text + "'");
  return *mode;
}

// Failures caused by the input data rather than the invocation.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Rule> loadRules(const std::string& path, const Dictionary& dict) {
  if (path.empty()) return builtinRuleset();
  return parseRuleFile(path, dict);
}

TriplePattern parseGoal(const std::string& text, const Dictionary& dict) {
  try {
    return parsePattern(text, dict);
  } catch (const RuleSyntaxError& e) {
    throw ConfigError("invalid pattern '" + text + "': " + e.what());
  }
}

void writeTriples(const std::string& path, std::span<const Triple> triples, const Dictionary& dict,
                  std::ostream& stdoutStream) {
  if (path == "-") {
    serializeNTriples(triples, dict, stdoutStream);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  serializeNTriples(triples, dict, out);
  out.close();
  if (!out) throw DataError("failed writing " + path);
}

struct Invocation {
  RunConfig config;
  std::string rulesPath;
  // load
  std::vector<std::string> inputs;
  std::string out;
  // materialize
  std::string snapshot;
  std::string statsPath;
  std::string snapshotOut;
  bool expand = false;
  // query / explain
  std::string pattern;
  std::string mode;
  bool json = false;
};

int cmdLoad(const Invocation& inv, std::ostream& out, std::ostream& err) {
  LoadOptions options;
  options.lenient = inv.config.lenientParse;
  options.workers = inv.config.workers;
  LoadedData data = loadNTriplesFiles(inv.inputs, options);
  for (const auto& e : data.errors) err << "warning: skipped " << e.what() << "\n";
  KnowledgeBase kb(data.triples);
  if (inv.config.canonicalizeSameAs) kb = canonicalize(kb);
  writeSnapshotFile(inv.out, data.dictionary, kb, inv.config.canonicalizeSameAs);
  out << "loaded " << data.triples.size() << " triples";
  if (data.skippedLines > 0) out << " (" << data.skippedLines << " lines skipped)";
  out << "\n";
  return kExitOk;
}

int cmdMaterialize(const Invocation& inv, std::ostream& out) {
  Snapshot snap = readSnapshotFile(inv.snapshot);
  std::vector<Rule> rules = loadRules(inv.rulesPath, snap.dictionary);
  const bool canonical = snap.canonical || inv.config.canonicalizeSameAs;

  MaterializeOptions options;
  options.jobs.mapreduce.workers = inv.config.workers;
  options.jobs.mapreduce.shuffleBudgetBytes = inv.config.shuffleBudgetBytes;
  options.jobs.mapreduce.tempDir = inv.config.tempDir;
  options.roundLimit = inv.config.roundLimit;
  options.canonicalSameAs = canonical;
  MaterializeResult result = materialize(snap.kb, rules, options);

  const EquivalenceMap& eq = result.kb.equivalence();
  std::vector<Triple> triples(result.kb.triples().begin(), result.kb.triples().end());
  if (inv.expand) {
    triples = expandAnswers(eq, triples);
    auto equalities = sameAsClosure(eq);
    triples.insert(triples.end(), equalities.begin(), equalities.end());
  } else {
    for (const auto& [member, rep] : eq.assignments()) {
      if (member != rep) triples.push_back({member, vocab::kSameAs, rep});
    }
  }
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  writeTriples(inv.out, triples, snap.dictionary, out);

  if (!inv.statsPath.empty()) {
    std::ofstream stats(inv.statsPath, std::ios::trunc);
    if (!stats) throw DataError("cannot write " + inv.statsPath);
    for (const RoundStats& r : result.rounds) {
      nlohmann::json line = {{"round", r.round},
                             {"emitted", r.emitted},
                             {"duplicates", r.duplicates},
                             {"accepted", r.accepted}};
      stats << line.dump() << "\n";
    }
  }
  if (!inv.snapshotOut.empty()) {
    writeSnapshotFile(inv.snapshotOut, snap.dictionary, result.kb, canonical);
  }
  if (inv.out != "-") {
    out << "materialized " << triples.size() << " triples in " << result.rounds.size()
        << (result.rounds.size() == 1 ? " round" : " rounds") << " (" << result.inferred
        << " inferred)\n";
  }
  return kExitOk;
}

QueryEngine engineFor(const Invocation& inv, Snapshot& snap) {
  std::vector<Rule> rules = loadRules(inv.rulesPath, snap.dictionary);
  QueryOptions options;
  options.depthLimit = inv.config.depthLimit;
  options.canonicalSameAs = snap.canonical || inv.config.canonicalizeSameAs;
  return QueryEngine(std::move(snap.kb), std::move(rules), options);
}

QueryMode modeOf(const Invocation& inv) {
  return inv.mode.empty() ? inv.config.mode : parseMode("--mode", inv.mode);
}

int cmdQuery(const Invocation& inv, std::ostream& out) {
  QueryMode mode = modeOf(inv);
  Snapshot snap = readSnapshotFile(inv.snapshot);
  TriplePattern goal = parseGoal(inv.pattern, snap.dictionary);
  QueryEngine engine = engineFor(inv, snap);
  std::vector<Triple> answers = engine.query(goal, mode);
  serializeNTriples(answers, snap.dictionary, out);
  return kExitOk;
}

int cmdExplain(const Invocation& inv, std::ostream& out) {
  QueryMode mode = modeOf(inv);
  Snapshot snap = readSnapshotFile(inv.snapshot);
  TriplePattern goal = parseGoal(inv.pattern, snap.dictionary);
  QueryEngine engine = engineFor(inv, snap);
  ReasoningTree tree = engine.explain(goal, mode);
  out << formatTree(tree, snap.dictionary);
  return kExitOk;
}

int cmdStats(const Invocation& inv, std::ostream& out) {
  Snapshot snap = readSnapshotFile(inv.snapshot);
  const KnowledgeBase& kb = snap.kb;
  const EquivalenceMap& eq = kb.equivalence();
  std::vector<std::pair<std::string, nlohmann::json>> fields = {
      {"triples", kb.size()},
      {"tbox", kb.tboxSize()},
      {"abox", kb.aboxSize()},
      {"terms", snap.dictionary.dataTermCount()},
      {"equivalence_classes", eq.classCount()},
      {"equivalence_terms", eq.termCount()},
      {"canonical", snap.canonical},
      {"materialized", kb.materialized()},
  };
  if (inv.json) {
    nlohmann::ordered_json obj;
    for (const auto& [k, v] : fields) obj[k] = v;
    out << obj.dump() << "\n";
  } else {
    for (const auto& [k, v] : fields) out << k << "=" << v.dump() << "\n";
  }
  return kExitOk;
}

}  // namespace

EnvLookup processEnvironment() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

RunConfig runConfigFromEnvironment(const EnvLookup& env) {
  RunConfig config;
  if (auto v = env("RDFR_WORKERS")) config.workers = parsePositive("RDFR_WORKERS", *v);
  if (auto v = env("RDFR_SHUFFLE_BUDGET")) {
    config.shuffleBudgetBytes = parsePositive("RDFR_SHUFFLE_BUDGET", *v);
  }
  if (auto v = env("RDFR_ROUND_LIMIT")) config.roundLimit = parsePositive("RDFR_ROUND_LIMIT", *v);
  if (auto v = env("RDFR_DEPTH_LIMIT")) config.depthLimit = parsePositive("RDFR_DEPTH_LIMIT", *v);
  if (auto v = env("RDFR_MODE")) config.mode = parseMode("RDFR_MODE", *v);
  if (auto v = env("RDFR_LENIENT")) config.lenientParse = parseFlag("RDFR_LENIENT", *v);
  if (auto v = env("RDFR_CANONICALIZE_SAMEAS")) {
    config.canonicalizeSameAs = parseFlag("RDFR_CANONICALIZE_SAMEAS", *v);
  }
  if (auto v = env("RDFR_TEMP_DIR")) config.tempDir = *v;
  return config;
}

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
           const EnvLookup& env) {
  Invocation inv;
  try {
    inv.config = runConfigFromEnvironment(env);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app("Forward and backward RDFS/OWL reasoning over N-Triples", "rdfr");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--workers", inv.config.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--shuffle-budget", inv.config.shuffleBudgetBytes,
                 "In-memory shuffle budget in bytes")
      ->check(CLI::PositiveNumber);
  app.add_option("--round-limit", inv.config.roundLimit, "Maximum materialization rounds")
      ->check(CLI::PositiveNumber);
  app.add_option("--depth-limit", inv.config.depthLimit, "Maximum goal nesting depth")
      ->check(CLI::PositiveNumber);
  app.add_option("--temp-dir", inv.config.tempDir, "Directory for shuffle spill files");
  app.add_option("--rules", inv.rulesPath, "Rule file (default: built-in rules)");
  app.add_flag("--lenient,!--strict", inv.config.lenientParse, "Skip malformed input lines");
  app.add_flag("--canonicalize,!--no-canonicalize", inv.config.canonicalizeSameAs,
               "Represent owl:sameAs classes by one term");

  CLI::App* load = app.add_subcommand("load", "Parse N-Triples files into a snapshot");
  load->add_option("files", inv.inputs, "Input files ('-' for stdin)")->required();
  load->add_option("--out,-o", inv.out, "Snapshot to write")->required();

  CLI::App* mat = app.add_subcommand("materialize", "Compute the forward closure");
  mat->add_option("snapshot", inv.snapshot)->required();
  mat->add_option("--out,-o", inv.out, "N-Triples output ('-' for stdout)")->required();
  mat->add_option("--stats", inv.statsPath, "Per-round statistics as JSON lines");
  mat->add_option("--snapshot-out", inv.snapshotOut, "Also save the closure as a snapshot");
  mat->add_flag("--expand", inv.expand, "Write every owl:sameAs variant instead of representatives");

  CLI::App* query = app.add_subcommand("query", "Answer a triple pattern");
  query->add_option("snapshot", inv.snapshot)->required();
  query->add_option("pattern", inv.pattern, "e.g. '?s <rdf:type> <Person>'")->required();
  query->add_option("--mode", inv.mode, "materialized, backward or hybrid");

  CLI::App* explain = app.add_subcommand("explain", "Print the reasoning tree of a pattern");
  explain->add_option("snapshot", inv.snapshot)->required();
  explain->add_option("pattern", inv.pattern)->required();
  explain->add_option("--mode", inv.mode, "backward or hybrid");

  CLI::App* stats = app.add_subcommand("stats", "Summarize a snapshot");
  stats->add_option("snapshot", inv.snapshot)->required();
  stats->add_flag("--json", inv.json, "Print one JSON object");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("rdfr");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (load->parsed()) return cmdLoad(inv, out, err);
    if (mat->parsed()) return cmdMaterialize(inv, out);
    if (query->parsed()) return cmdQuery(inv, out);
    if (explain->parsed()) return cmdExplain(inv, out);
    if (stats->parsed()) return cmdStats(inv, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace rdfr
