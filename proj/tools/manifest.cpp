#include "manifest.hpp"

#include <fstream>

#include "tokeval/digest.hpp"
#include "tokeval/error.hpp"

namespace tokeval::cli {

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["args"] = args;
  j["seed"] = seed;
  j["threads"] = threads;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["stdout_sha256"] = stdout_sha256;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.threads = j.at("threads").get<unsigned>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.stdout_sha256 = j.at("stdout_sha256").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedHeader, std::string("malformed manifest: ") + e.what());
  }
  if (m.tool != "tokeval") fail(ErrorCode::kIncompatible, "manifest written by another tool");
  return m;
}

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << manifest.to_json().dump(2) << '\n';
  if (!out) fail(ErrorCode::kIo, "write failed on " + path.string());
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedHeader, "manifest is not valid JSON: " + std::string(e.what()));
  }
  return RunManifest::from_json(j);
}

std::string digest_path(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return sha256_directory(path);
  return sha256_file(path);
}

}  // namespace tokeval::cli
