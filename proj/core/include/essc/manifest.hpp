#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace essc {

/// One executed subcommand: enough to replay it.
struct ManifestEntry {
  std::string command;
  std::string config_json;  // canonical
  std::string dataset;
  std::string model;
  std::string analysis_dataset;
  std::vector<std::string> outputs;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  /// Replaces an earlier entry for the same command, otherwise appends.
  void record(ManifestEntry entry);
};

inline constexpr const char* kManifestFile = "manifest.json";

Manifest read_manifest(const std::filesystem::path& out);
void write_manifest(const std::filesystem::path& out, const Manifest& manifest);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace essc
