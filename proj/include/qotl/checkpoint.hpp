#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qotl/adam.hpp"
#include "qotl/ansatz.hpp"

namespace qotl {

/// Ordered key = value text block; doubles round-trip exactly.
class KvWriter {
 public:
  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, std::int64_t value);
  void put(const std::string& key, double value);
  void put_doubles(const std::string& key, const std::vector<double>& values);
  void put_ints(const std::string& key, const std::vector<int>& values);

  const std::string& str() const { return buf_; }
  void write_file(const std::filesystem::path& path) const;

 private:
  std::string buf_;
};

class KvReader {
 public:
  static KvReader from_file(const std::filesystem::path& path);
  static KvReader from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct Checkpoint {
  CircuitSpec spec;
  std::optional<AdamState> opt;
};

void save_checkpoint(const std::filesystem::path& path, const CircuitSpec& spec,
                     const AdamState* opt = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qotl
