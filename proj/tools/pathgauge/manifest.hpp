#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

namespace pathgauge::cli {

inline constexpr const char* kToolVersion = "0.3.1";
inline constexpr const char* kManifestFile = "manifest.json";

// Provenance for one CLI run. Report files reference it by run_id; the
// manifest lists every report it owns with its digest.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json config_echo);

  void add_input(const std::filesystem::path& path);
  void add_input_text(const std::string& name, const std::string& content);

  // Depends only on the command, resolved config and input digests, so a
  // re-run with identical inputs gets the same id.
  std::string run_id() const;
  nlohmann::json reference() const;

  // Writes `text` to dir/name and records its digest.
  void write_output(const std::filesystem::path& dir, const std::string& name,
                    const std::string& text);
  void finish_and_write(const std::filesystem::path& dir);

 private:
  std::string command_;
  nlohmann::json config_echo_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
  std::chrono::system_clock::time_point started_;
};

}  // namespace pathgauge::cli
