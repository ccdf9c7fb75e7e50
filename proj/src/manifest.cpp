#include "dynelab/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dynelab/output.hpp"

namespace dynelab {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read file for checksum: " + path.string());
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

namespace {

std::string to_hex(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex << value;
  return out.str();
}

}  // namespace

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path) {
  nlohmann::ordered_json root;
  root["tool"] = manifest.tool;
  root["command"] = manifest.command;
  root["master_seed"] = manifest.master_seed;
  root["workers"] = manifest.workers;
  root["config"] = nlohmann::ordered_json::parse(manifest.config_json);
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const OutputRecord& rec : manifest.outputs) {
    outputs.push_back({{"path", rec.path},
                       {"bytes", rec.bytes},
                       {"fnv1a64", rec.checksum}});
  }
  root["outputs"] = outputs;
  root["errors"] = manifest.errors;
  root["started_utc"] = manifest.started_utc;
  root["wall_seconds"] = manifest.wall_seconds;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open manifest file: " + path.string());
  }
  out << root.dump(2) << '\n';
  if (!out) {
    throw IoError("manifest write failed: " + path.string());
  }
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read manifest: " + path.string());
  }
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::parse_error& err) {
    throw IoError("manifest parse error: " + std::string(err.what()));
  }
  RunManifest manifest;
  manifest.tool = root.value("tool", "");
  manifest.command = root.value("command", "");
  manifest.master_seed = root.value("master_seed", std::uint64_t{0});
  manifest.workers = root.value("workers", 0);
  if (root.contains("config")) {
    manifest.config_json = root["config"].dump();
  }
  for (const auto& rec : root.value("outputs", nlohmann::json::array())) {
    manifest.outputs.push_back(OutputRecord{
        rec.value("path", ""), rec.value("bytes", std::uintmax_t{0}),
        rec.value("fnv1a64", "")});
  }
  for (const auto& err : root.value("errors", nlohmann::json::array())) {
    manifest.errors.push_back(err.get<std::string>());
  }
  manifest.started_utc = root.value("started_utc", "");
  manifest.wall_seconds = root.value("wall_seconds", 0.0);
  return manifest;
}

std::vector<std::string> verify_manifest(const RunManifest& manifest,
                                         const std::filesystem::path& dir) {
  std::vector<std::string> mismatches;
  for (const OutputRecord& rec : manifest.outputs) {
    const std::filesystem::path file = dir / rec.path;
    if (!std::filesystem::exists(file)) {
      mismatches.push_back(rec.path + ": missing");
      continue;
    }
    if (std::filesystem::file_size(file) != rec.bytes) {
      mismatches.push_back(rec.path + ": size mismatch");
      continue;
    }
    if (to_hex(fnv1a64_file(file)) != rec.checksum) {
      mismatches.push_back(rec.path + ": checksum mismatch");
    }
  }
  return mismatches;
}

}  // namespace dynelab
