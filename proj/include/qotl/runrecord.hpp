#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qotl {

inline constexpr const char* kToolVersion = "0.1.0";

/// Side-channel metadata for one CLI run: the echoed configuration, wall
/// times, and digests of every emitted file. Timestamps live here and never
/// inside the data files, which stay byte-identical per seed.
struct RunRecord {
  std::string tool;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> outputs;  // file name -> fnv1a digest
  std::string started_at, finished_at;

  void set(const std::string& key, const std::string& value) { config.emplace_back(key, value); }
  void add_output(const std::filesystem::path& path);
};

std::string iso8601_now();

void write_run_record(const std::filesystem::path& path, const RunRecord& record);

}  // namespace qotl
