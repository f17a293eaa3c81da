#include "qotl/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace qotl {

std::string fmt_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc{}) throw std::runtime_error("fmt_double: conversion failed");
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(columns.size()) {
  if (columns.empty()) throw std::invalid_argument("CsvWriter: no columns");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += columns[i];
  }
  buf_ += '\n';
}

void CsvWriter::row(std::span<const CsvValue> values) {
  if (values.size() != columns_) throw std::invalid_argument("CsvWriter: arity mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buf_ += ',';
    const auto& v = values[i];
    if (std::holds_alternative<std::int64_t>(v))
      buf_ += std::to_string(std::get<std::int64_t>(v));
    else if (std::holds_alternative<double>(v))
      buf_ += fmt_double(std::get<double>(v));
    else
      buf_ += std::get<std::string>(v);
  }
  buf_ += '\n';
}

void CsvWriter::row(std::initializer_list<CsvValue> values) {
  row(std::span<const CsvValue>(values.begin(), values.size()));
}

void CsvWriter::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("CsvWriter: cannot open " + path.string());
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw std::runtime_error("CsvWriter: write failed for " + path.string());
}

std::uint64_t fnv1a64(std::span<const char> bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("fnv1a64_file: cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(std::span<const char>(data.data(), data.size()));
}

std::string digest_hex(std::uint64_t digest) {
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[digest & 0xF];
    digest >>= 4;
  }
  return out;
}

}  // namespace qotl
