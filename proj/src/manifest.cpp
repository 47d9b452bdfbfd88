#include "amuse/manifest.hpp"

#include "amuse/dataio.hpp"

#include "json.hpp"

namespace amuse {

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["tool_version"] = tool_version;
  j["seed"] = seed;
  j["config"] = config;
  nlohmann::json ins = nlohmann::json::array();
  for (const auto& [path, digest] : inputs) {
    ins.push_back({{"path", path}, {"digest", digest}});
  }
  j["inputs"] = ins;
  j["outputs"] = outputs;
  j["wall_seconds"] = wall_seconds;
  j["status"] = status;
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  write_text_atomic(path, manifest.to_json());
}

}  // namespace amuse
