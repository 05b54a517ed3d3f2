#include "manifest.hpp"

#include <ctime>
#include <fstream>

#include "pathgauge/error.hpp"
#include "pathgauge/report.hpp"

namespace pathgauge::cli {

namespace {

std::string iso8601(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

RunManifest::RunManifest(std::string command, nlohmann::json config_echo)
    : command_(std::move(command)),
      config_echo_(std::move(config_echo)),
      started_(std::chrono::system_clock::now()) {}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs_[path.string()] = report::sha256_file(path);
}

void RunManifest::add_input_text(const std::string& name, const std::string& content) {
  inputs_[name] = report::sha256_hex(content);
}

std::string RunManifest::run_id() const {
  nlohmann::json basis{{"command", command_}, {"config", config_echo_}, {"inputs", inputs_}};
  return report::sha256_hex(basis.dump()).substr(0, 16);
}

nlohmann::json RunManifest::reference() const {
  return {{"file", kManifestFile}, {"run_id", run_id()}};
}

void RunManifest::write_output(const std::filesystem::path& dir, const std::string& name,
                               const std::string& text) {
  write_file(dir / name, text);
  outputs_[name] = report::sha256_hex(text);
}

void RunManifest::finish_and_write(const std::filesystem::path& dir) {
  nlohmann::json j{{"run_id", run_id()},
                   {"command", command_},
                   {"tool_version", kToolVersion},
                   {"config_echo", config_echo_},
                   {"input_digests", inputs_},
                   {"outputs", outputs_},
                   {"started", iso8601(started_)},
                   {"finished", iso8601(std::chrono::system_clock::now())}};
  write_file(dir / kManifestFile, j.dump(2) + "\n");
}

}  // namespace pathgauge::cli
