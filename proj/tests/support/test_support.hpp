// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

namespace sasa::testing {

inline std::filesystem::path fixture(const std::string& relative) {
  return std::filesystem::path(SASA_FIXTURE_DIR) / relative;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(fixture("corpus"))) {
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Surface tokens of ASCII source by regex: identifier/number runs, or a
/// single punctuation character.
inline std::vector<std::string> regex_tokens(const std::string& source) {
  static const std::regex token(R"([A-Za-z0-9_]+|[!-/:-@\[-^`{-~])");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(source.begin(), source.end(), token);
       it != std::sregex_iterator(); ++it) {
    out.push_back(it->str());
  }
  return out;
}

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sasa-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace sasa::testing
