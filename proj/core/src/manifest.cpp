#include "essc/manifest.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "essc/error.hpp"

namespace essc {

namespace fs = std::filesystem;
using nlohmann::json;

void Manifest::record(ManifestEntry entry) {
  for (auto& e : entries) {
    if (e.command == entry.command) {
      e = std::move(entry);
      return;
    }
  }
  entries.push_back(std::move(entry));
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Manifest read_manifest(const fs::path& out) {
  const fs::path p = out / kManifestFile;
  Manifest m;
  if (!fs::exists(p)) return m;
  try {
    const json j = json::parse(read_file(p));
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.command = e.at("command").get<std::string>();
      entry.config_json = e.at("config").dump(2) + "\n";
      entry.dataset = e.at("dataset").get<std::string>();
      entry.model = e.at("model").get<std::string>();
      entry.analysis_dataset = e.value("analysis_dataset", std::string());
      entry.outputs = e.at("outputs").get<std::vector<std::string>>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw FormatError("malformed manifest " + p.string() + ": " + e.what());
  }
  return m;
}

void write_manifest(const fs::path& out, const Manifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"command", e.command},
                       {"config", json::parse(e.config_json)},
                       {"dataset", e.dataset},
                       {"model", e.model},
                       {"analysis_dataset", e.analysis_dataset},
                       {"outputs", e.outputs}});
  }
  const json j = {{"format", "essc-manifest"}, {"version", 1}, {"entries", entries}};
  write_file_atomic(out / kManifestFile, j.dump(2) + "\n");
}

}  // namespace essc
