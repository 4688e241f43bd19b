#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nms::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3 };

struct RunRequest {
  std::filesystem::path config_path;
  std::filesystem::path out_dir{"out"};
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::vector<std::string> overrides;  // "section.key=value"
  std::optional<std::string> env_seed;  // value of NMS_SEED, if set
};

// Resolves the config (file, then overrides, then NMS_SEED, then flags), runs
// every replication and writes out_dir/rep_NNN/. Diagnostics go to stderr.
int run(const RunRequest& req);

// Parses argv into a RunRequest and calls run().
int main(int argc, char** argv);

}  // namespace nms::cli
