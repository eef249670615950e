#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfr/query_engine.h"

namespace rdfr {

struct RunConfig {
  std::size_t workers = 1;
  std::size_t shuffleBudgetBytes = std::size_t{256} << 20;
  std::size_t roundLimit = 64;
  std::size_t depthLimit = 128;
  QueryMode mode = QueryMode::Hybrid;
  bool lenientParse = false;
  bool canonicalizeSameAs = true;
  std::string tempDir;
};

// Bad configuration value (flag or environment).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Defaults overridden by RDFR_WORKERS, RDFR_SHUFFLE_BUDGET,
// RDFR_ROUND_LIMIT, RDFR_DEPTH_LIMIT, RDFR_MODE, RDFR_LENIENT,
// RDFR_CANONICALIZE_SAMEAS and RDFR_TEMP_DIR.
RunConfig runConfigFromEnvironment(const EnvLookup& env);
EnvLookup processEnvironment();

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// args[0] is the program name.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
           const EnvLookup& env = processEnvironment());

}  // namespace rdfr
