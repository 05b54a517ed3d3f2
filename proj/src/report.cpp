#include "pathgauge/report.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pathgauge/error.hpp"

namespace pathgauge::report {

namespace {

std::string_view trim(std::string_view s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

template <typename T>
bool parse_exact(std::string_view text, T& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_number(std::uint64_t value) { return std::to_string(value); }

std::string format_sig(double value, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

void write_table_csv(std::ostream& out, const ErrorTable& table,
                     std::span<const std::uint64_t> skipped) {
  const bool with_skipped = !skipped.empty();
  if (with_skipped && skipped.size() != table.rows().size())
    throw Error(ErrorCode::kInvalidArgument, "skipped counts do not match table rows");
  if (table.kind() == TableKind::kSdMbps) out << "n,sd_mbps\n";
  else out << (with_skipped ? "n,eta_percent,skipped\n" : "n,eta_percent\n");
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    const auto& r = table.rows()[i];
    out << r.n << ',' << format_number(r.value);
    if (with_skipped) out << ',' << skipped[i];
    out << '\n';
  }
}

void write_estimates_csv(std::ostream& out, std::span<const BandwidthEstimate> estimates) {
  out << "window_start,n,mbps\n";
  for (const auto& e : estimates)
    out << e.window_start << ',' << e.window_n << ',' << format_number(e.mbps()) << '\n';
}

ErrorTable read_table_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<TableKind> kind;
  std::vector<ErrorRow> rows;
  auto fail = [&](const std::string& msg) -> Error {
    return Error(ErrorCode::kParse, "table line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto cols = split(body, ',');
    if (!kind) {
      if (cols.size() >= 2 && cols[0] == "n" && cols[1] == "sd_mbps") kind = TableKind::kSdMbps;
      else if (cols.size() >= 2 && cols[0] == "n" && cols[1] == "eta_percent")
        kind = TableKind::kRelativeErrorPercent;
      else throw fail("expected header 'n,sd_mbps' or 'n,eta_percent'");
      continue;
    }
    if (cols.size() < 2) throw fail("expected at least two columns");
    ErrorRow row;
    if (!parse_exact(cols[0], row.n)) throw fail("malformed n");
    if (!parse_exact(cols[1], row.value)) throw fail("malformed value");
    rows.push_back(row);
  }
  if (!kind) throw Error(ErrorCode::kParse, "table file has no header");
  try {
    return ErrorTable(*kind, std::move(rows));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

ErrorTable read_table_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open table file " + path.string());
  return read_table_csv(in);
}

nlohmann::json to_json(const ErrorTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows()) rows.push_back({{"n", r.n}, {"value", r.value}});
  nlohmann::json j{{"kind", std::string(to_string(table.kind()))}, {"rows", rows}};
  if (table.mean_bandwidth()) j["mean_bandwidth_bps"] = *table.mean_bandwidth();
  return j;
}

nlohmann::json to_json(const SimConfig& cfg) {
  return {{"lambda", cfg.lambda_rate},
          {"d_min", cfg.d_min},
          {"true_delta_d", cfg.true_delta_d},
          {"delta_w", cfg.delta_w},
          {"trials", cfg.trials},
          {"n_values", cfg.n_values},
          {"seed", cfg.rng_seed},
          {"clock_quantum", cfg.clock_quantum}};
}

nlohmann::json to_json(const ingest::IngestReport& r) {
  nlohmann::json rejected = nlohmann::json::object();
  for (const auto& [reason, n] : r.rejected) rejected[std::string(to_string(reason))] = n;
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : r.first_parse_errors)
    errors.push_back({{"line", e.line_no}, {"column", e.column}, {"message", e.message}});
  return {{"lines", r.lines},
          {"accepted", r.accepted},
          {"rejected", rejected},
          {"skipped", r.skipped},
          {"parse_errors", r.parse_errors},
          {"duplicate_seq", r.duplicate_seq},
          {"out_of_order", r.out_of_order},
          {"parse_error_samples", errors}};
}

nlohmann::json to_json(const estimator::AsymmetryReport& r) {
  nlohmann::json ratios = nlohmann::json::array();
  for (const auto& x : r.ratio_per_n) ratios.push_back({{"n", x.n}, {"ratio", x.ratio}});
  return {{"ratio_per_n", ratios},
          {"geometric_mean", r.geometric_mean},
          {"threshold", r.threshold},
          {"asymmetric", r.asymmetric},
          {"summary", r.summary}};
}

nlohmann::json to_json(const simulator::SimResult& r) {
  return {{"config", to_json(r.config)},
          {"metric", std::string(to_string(r.metric))},
          {"eta_table", to_json(r.eta_table)},
          {"trials_used", r.trials_used},
          {"skipped_windows", r.skipped_windows},
          {"skipped_per_n", r.skipped_per_n}};
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (auto part : split(text, ',')) {
    int v = 0;
    if (!parse_exact(part, v))
      throw Error(ErrorCode::kConfig, "malformed integer '" + std::string(part) + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    double v = 0;
    if (!parse_exact(part, v))
      throw Error(ErrorCode::kConfig, "malformed number '" + std::string(part) + "'");
    out.push_back(v);
  }
  return out;
}

SimConfig parse_sim_config(std::istream& in, SimConfig cfg, std::vector<std::string>& errors) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    auto number = [&](auto& field) {
      if (!parse_exact(value, field)) errors.push_back(where + "malformed value for " + key);
    };
    if (key == "lambda") number(cfg.lambda_rate);
    else if (key == "d_min") number(cfg.d_min);
    else if (key == "true_delta_d") number(cfg.true_delta_d);
    else if (key == "delta_w") number(cfg.delta_w);
    else if (key == "trials") number(cfg.trials);
    else if (key == "seed") number(cfg.rng_seed);
    else if (key == "clock_quantum") number(cfg.clock_quantum);
    else if (key == "n_values") {
      try {
        cfg.n_values = parse_int_list(value);
      } catch (const Error& e) {
        errors.push_back(where + e.what());
      }
    } else {
      errors.push_back(where + "unknown key '" + key + "'");
    }
  }
  return cfg;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::kIo, "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

}  // namespace pathgauge::report
