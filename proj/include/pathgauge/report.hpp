#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "pathgauge/estimator.hpp"
#include "pathgauge/ingest.hpp"
#include "pathgauge/model.hpp"
#include "pathgauge/simulator.hpp"

namespace pathgauge::report {

// Shortest decimal that round-trips; never locale dependent.
std::string format_number(double value);
std::string format_number(std::uint64_t value);
// Human output: `digits` significant digits.
std::string format_sig(double value, int digits = 3);

// `n,sd_mbps` or `n,eta_percent[,skipped]`.
void write_table_csv(std::ostream& out, const ErrorTable& table,
                     std::span<const std::uint64_t> skipped = {});
// `window_start,n,mbps`
void write_estimates_csv(std::ostream& out,
                         std::span<const BandwidthEstimate> estimates);

// Accepts either CSV table layout; the header decides the kind. Throws
// Error(kParse) with the offending line number.
ErrorTable read_table_csv(std::istream& in);
ErrorTable read_table_csv_file(const std::filesystem::path& path);

nlohmann::json to_json(const ErrorTable& table);
nlohmann::json to_json(const SimConfig& cfg);
nlohmann::json to_json(const ingest::IngestReport& report);
nlohmann::json to_json(const estimator::AsymmetryReport& report);
nlohmann::json to_json(const simulator::SimResult& result);

// `key = value` lines, '#' comments. Keys: lambda, d_min, true_delta_d,
// delta_w, trials, n_values (comma separated), seed, clock_quantum.
// Unknown keys and malformed values are appended to `errors`; all of them
// are reported rather than stopping at the first.
SimConfig parse_sim_config(std::istream& in, SimConfig base,
                           std::vector<std::string>& errors);

std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace pathgauge::report
