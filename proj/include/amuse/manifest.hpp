#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace amuse {

// Record of one CLI invocation: command, config snapshot, input digests
// (taken before any processing), outputs, timing and status. Emitted even
// when the command fails.
struct RunManifest {
  std::string command;
  std::string tool_version;
  uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  std::string status = "ok";

  std::string to_json() const;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace amuse
