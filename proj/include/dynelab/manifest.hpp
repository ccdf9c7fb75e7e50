#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dynelab/config.hpp"

namespace dynelab {

// FNV-1a 64-bit checksum, used to pin emitted files in the run manifest.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

struct OutputRecord {
  std::string path;  // relative to the manifest's directory
  std::uintmax_t bytes = 0;
  std::string checksum;  // fnv1a64, hex
};

struct RunManifest {
  std::string tool;
  std::string command;
  std::uint64_t master_seed = 0;
  int workers = 0;
  std::string config_json;  // re-loadable echo of the resolved config
  std::vector<OutputRecord> outputs;
  std::vector<std::string> errors;
  std::string started_utc;
  double wall_seconds = 0.0;
};

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

// Parses the fields needed to verify a manifest against its directory.
RunManifest read_manifest(const std::filesystem::path& path);

// Recomputes each listed file's checksum; returns the mismatches.
std::vector<std::string> verify_manifest(const RunManifest& manifest,
                                         const std::filesystem::path& dir);

}  // namespace dynelab
