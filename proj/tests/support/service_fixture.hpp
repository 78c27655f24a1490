#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "semdrought/service/config.hpp"

namespace semdrought::testing {

inline std::filesystem::path shipped_config_dir() { return std::filesystem::path(SEMDROUGHT_SOURCE_DIR) / "config"; }

/// The shipped config document without persistence.
inline nlohmann::json shipped_config_json() {
  std::ifstream in(shipped_config_dir() / "semdrought.json");
  auto doc = nlohmann::json::parse(in);
  doc.erase("persistence_dir");
  return doc;
}

inline service::Config shipped_config(const nlohmann::json& overrides = nlohmann::json::object()) {
  auto doc = shipped_config_json();
  doc.merge_patch(overrides);
  return service::config_from_json(doc, shipped_config_dir());
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("semdrought_" + std::to_string(rd()) + "_" + std::to_string(rd()));
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

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace semdrought::testing
