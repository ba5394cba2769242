#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace tokeval::cli {

/// Everything needed to re-run one invocation and check its results.
struct RunManifest {
  std::string tool = "tokeval";
  std::string version;
  std::string subcommand;
  std::vector<std::string> args;  // argv after the program name, manifest flag removed
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::string stdout_sha256;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);

/// sha256 of a file, or of a directory listing and contents.
std::string digest_path(const std::filesystem::path& path);

}  // namespace tokeval::cli
