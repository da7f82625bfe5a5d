// Command-line entry point. Every subcommand writes its machine-readable
// results and a manifest into the output directory.
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace hardhex::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kInternal = 3,  // I/O failures and unexpected exceptions
};

struct RunManifest {
  std::string subcommand;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::string tool_version;
  std::string rng;
  std::string started_at;  // UTC, ISO 8601
  std::string finished_at;
  int exit_code = 0;
  std::vector<std::string> outputs;  // relative to the output directory

  nlohmann::ordered_json to_json() const;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Parses argv and runs one subcommand. Human-readable output goes to out,
/// diagnostics and usage text to err.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hardhex::cli
