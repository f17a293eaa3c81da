#pragma once

#include <filesystem>
#include <string>

#include <unistd.h>

namespace qotl::test {

/// Unique directory under the system temp root, removed on destruction.
struct ScratchDir {
  std::filesystem::path path;

  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("qotl_" + tag + "_" + std::to_string(++counter) + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace qotl::test
