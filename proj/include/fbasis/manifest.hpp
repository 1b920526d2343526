#pragma once

/// @file
/// Run manifests: a JSON record of one CLI invocation (command, flags, seeds,
/// SHA-256 digests of inputs and outputs, solver reports).

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fbasis/frechet.hpp"
#include "json.hpp"

namespace fbasis {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  nlohmann::json flags = nlohmann::json::object();
  nlohmann::json seeds = nlohmann::json::object();
  std::vector<FileDigest> inputs;
  nlohmann::json reports = nlohmann::json::object();
  std::vector<FileDigest> outputs;

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  nlohmann::json to_json() const;
  /// Throws Manifest when a required key is missing or mistyped.
  static RunManifest from_json(const nlohmann::json& j);
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

/// Paths (inputs and outputs) whose current digest differs from the record.
std::vector<std::string> verify_manifest(const RunManifest& manifest);

nlohmann::json to_json(const SolverReport& report);

}  // namespace fbasis
