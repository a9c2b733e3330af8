// Batch driver: `gljac table|verify|jacquet|fourier ...`.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gljac::cli {

enum ExitCode : int { kOk = 0, kIdentityFailure = 1, kInvalidParameters = 2, kBudgetExceeded = 3 };

struct RunConfig {
  std::string command;
  int n = 0;
  int q = 0;
  std::optional<std::int64_t> theta0;
  std::string out = ".";
  std::string format = "json";
  unsigned threads = 0;  // 0 = available parallelism
  std::int64_t max_group_order = 1'000'000;
  std::int64_t max_space = std::int64_t{1} << 22;
  // table
  bool gl2 = false;
  bool oracle = false;
  // fourier
  std::optional<std::string> orbit;
  bool cone = false;

  nlohmann::json to_json() const;
  /// Keys missing from j keep their current value.
  void merge_json(const nlohmann::json& j);
};

/// Parses and runs one command. Diagnostics go to `err`, a one-line summary to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Runs an already-parsed configuration.
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Writes via a temporary file and rename, so readers never see partial output.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace gljac::cli
