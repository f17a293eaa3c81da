#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qotl {

/// Shortest round-trip decimal form; identical across runs by construction.
std::string fmt_double(double value);

using CsvValue = std::variant<std::int64_t, double, std::string>;

/// Comma-separated text with a fixed header; no quoting, so string cells must
/// not contain commas or newlines.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  void row(std::span<const CsvValue> values);
  void row(std::initializer_list<CsvValue> values);

  const std::string& str() const { return buf_; }
  void write_file(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string buf_;
};

std::uint64_t fnv1a64(std::span<const char> bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string digest_hex(std::uint64_t digest);

}  // namespace qotl
